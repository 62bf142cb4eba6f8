#include "dataprog/gold.hpp"

#include <algorithm>
#include <ctime>
#include <mutex>
#include <sstream>

#include "dataprog/error.hpp"
#include "dataprog/io.hpp"

namespace dataprog {

namespace {

void check_label(const HardLabel& label, const TaskSchema& schema) {
  if (schema.mode == LabelMode::kMultiClass) {
    if (label.cls < 0 || label.cls >= static_cast<int>(schema.size())) {
      throw InputError("label for \"" + label.doc_id + "\" is not a " + std::string(to_string(schema.task)) + " class");
    }
  } else if (label.present.size() != schema.size()) {
    throw InputError("label for \"" + label.doc_id + "\" must give all " + std::to_string(schema.size()) + " tags");
  }
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::json label_to_json(const HardLabel& label, const TaskSchema& schema) {
  check_label(label, schema);
  if (schema.mode == LabelMode::kMultiClass) return schema.label(label.cls);
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t t = 0; t < schema.size(); ++t) out[schema.labels[t]] = static_cast<bool>(label.present[t]);
  return out;
}

HardLabel label_from_json(const nlohmann::json& j, const std::string& doc_id, const TaskSchema& schema) {
  HardLabel h;
  h.doc_id = doc_id;
  if (schema.mode == LabelMode::kMultiClass) {
    if (!j.is_string()) throw InputError("label for \"" + doc_id + "\" must be a class name");
    auto idx = schema.index_of(j.get<std::string>());
    if (!idx) throw InputError("unknown label \"" + j.get<std::string>() + "\" for \"" + doc_id + "\"");
    h.cls = *idx;
    return h;
  }
  if (!j.is_object()) throw InputError("labels for \"" + doc_id + "\" must be an object of tag booleans");
  h.present.assign(schema.size(), false);
  for (const auto& [tag, value] : j.items()) {
    auto idx = schema.index_of(tag);
    if (!idx) throw InputError("unknown tag \"" + tag + "\" for \"" + doc_id + "\"");
    if (!value.is_boolean()) throw InputError("tag \"" + tag + "\" for \"" + doc_id + "\" must be true or false");
    h.present[static_cast<std::size_t>(*idx)] = value.get<bool>();
  }
  return h;
}

nlohmann::json gold_to_json(const GoldRecord& r) {
  const auto& schema = builtin_schema(r.task);
  return {{"doc_id", r.doc_id},
          {"task", std::string(to_string(r.task))},
          {"label", label_to_json(r.label, schema)},
          {"reviewer", r.reviewer},
          {"revised_from", r.revised_from ? label_to_json(*r.revised_from, schema) : nlohmann::json(nullptr)}};
}

GoldRecord gold_from_json(const nlohmann::json& j) {
  GoldRecord r;
  try {
    r.doc_id = j.at("doc_id").get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.reviewer = j.at("reviewer").get<std::string>();
    const auto& schema = builtin_schema(r.task);
    r.label = label_from_json(j.at("label"), r.doc_id, schema);
    if (j.contains("revised_from") && !j.at("revised_from").is_null()) {
      r.revised_from = label_from_json(j.at("revised_from"), r.doc_id, schema);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed gold record: ") + e.what());
  }
  return r;
}

GoldStore::GoldStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  const auto path = dir_ / "gold.jsonl";
  if (!std::filesystem::exists(path)) return;
  std::istringstream in(read_file(path));
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    try {
      auto r = gold_from_json(nlohmann::json::parse(line));
      records_[{static_cast<int>(r.task), r.doc_id}] = std::move(r);
    } catch (const std::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

GoldRecord GoldStore::record_review(const Document& doc, Task task, HardLabel label, const std::string& reviewer,
                                    const std::optional<HardLabel>& current_prediction) {
  if (doc.split == Split::kTrain) {
    throw PolicyError("document \"" + doc.id + "\" is in the train split; only validation and test are reviewed");
  }
  if (reviewer.empty()) throw InputError("reviewer must not be empty");
  const auto& schema = builtin_schema(task);
  label.doc_id = doc.id;
  check_label(label, schema);

  std::unique_lock lock(mutex_);
  GoldRecord record{doc.id, task, std::move(label), reviewer, std::nullopt};
  auto key = std::make_pair(static_cast<int>(task), doc.id);
  if (auto it = records_.find(key); it != records_.end()) {
    record.revised_from = it->second.revised_from;
  } else if (current_prediction) {
    record.revised_from = *current_prediction;
    record.revised_from->doc_id = doc.id;
    check_label(*record.revised_from, schema);
  }

  std::filesystem::create_directories(dir_);
  auto entry = gold_to_json(record);
  entry["time"] = utc_now();
  append_line_durable(dir_ / "audit.jsonl", entry.dump());
  records_[key] = record;
  save_locked();
  return record;
}

std::optional<GoldRecord> GoldStore::find(const std::string& doc_id, Task task) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find({static_cast<int>(task), doc_id});
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<GoldRecord> GoldStore::records(Task task) const {
  std::shared_lock lock(mutex_);
  std::vector<GoldRecord> out;
  for (const auto& [key, r] : records_) {
    if (key.first == static_cast<int>(task)) out.push_back(r);
  }
  return out;
}

std::vector<HardLabel> GoldStore::labels(Task task) const {
  std::vector<HardLabel> out;
  for (auto& r : records(task)) out.push_back(std::move(r.label));
  return out;
}

std::size_t GoldStore::audit_entries() const {
  std::shared_lock lock(mutex_);
  const auto path = dir_ / "audit.jsonl";
  if (!std::filesystem::exists(path)) return 0;
  const std::string content = read_file(path);
  return static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'));
}

void GoldStore::save_locked() const {
  std::string out;
  for (const auto& [key, r] : records_) out += gold_to_json(r).dump() + "\n";
  write_file_atomic(dir_ / "gold.jsonl", out);
}

}  // namespace dataprog
