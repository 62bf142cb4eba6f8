#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "dataprog/corpus.hpp"
#include "dataprog/label_matrix.hpp"
#include "json.hpp"

namespace dataprog {

struct GoldRecord {
  std::string doc_id;
  Task task = Task::kSentiment;
  HardLabel label;  // cls for sentiment, present for tags
  std::string reviewer;
  std::optional<HardLabel> revised_from;  // the model's hard label before the first review

  bool operator==(const GoldRecord&) const = default;
};

// Label encoding shared by gold files, exports and the HTTP API: a class
// name for multi-class, {tag: bool} for multi-label.
nlohmann::json label_to_json(const HardLabel& label, const TaskSchema& schema);
HardLabel label_from_json(const nlohmann::json& j, const std::string& doc_id, const TaskSchema& schema);

nlohmann::json gold_to_json(const GoldRecord& record);
GoldRecord gold_from_json(const nlohmann::json& j);

// Current gold state in `<dir>/gold.jsonl` (rewritten atomically) plus an
// append-only `<dir>/audit.jsonl`. One writer at a time, concurrent readers.
class GoldStore {
 public:
  explicit GoldStore(std::filesystem::path dir);

  // Upserts the record for (doc, task). Throws PolicyError for train-split
  // documents and InputError for labels outside the schema. A later revision
  // replaces the label and reviewer but keeps the original revised_from.
  GoldRecord record_review(const Document& doc, Task task, HardLabel label, const std::string& reviewer,
                           const std::optional<HardLabel>& current_prediction);

  std::optional<GoldRecord> find(const std::string& doc_id, Task task) const;
  // Sorted by doc id.
  std::vector<GoldRecord> records(Task task) const;
  std::vector<HardLabel> labels(Task task) const;
  std::size_t audit_entries() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void save_locked() const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<int, std::string>, GoldRecord> records_;
};

}  // namespace dataprog
