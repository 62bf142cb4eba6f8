#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dataprog {

enum class Task { kTags, kSentiment };
enum class LabelMode { kMultiClass, kMultiLabel };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

struct TaskSchema {
  Task task = Task::kSentiment;
  std::vector<std::string> labels;
  LabelMode mode = LabelMode::kMultiClass;

  std::size_t size() const { return labels.size(); }
  std::optional<int> index_of(std::string_view label) const;
  const std::string& label(int index) const { return labels.at(static_cast<std::size_t>(index)); }

  bool operator==(const TaskSchema&) const = default;
};

// [negatif, netral, positif], multi-class.
const TaskSchema& sentiment_schema();
// The 31 hashtag labels, multi-label.
const TaskSchema& tags_schema();
const TaskSchema& builtin_schema(Task task);

// Rejects empty or repeated labels, and builtin tasks whose labels differ
// from the fixed sets.
void validate_schema(const TaskSchema& schema);

nlohmann::json schema_to_json(const TaskSchema& schema);
TaskSchema schema_from_json(const nlohmann::json& j);

}  // namespace dataprog
