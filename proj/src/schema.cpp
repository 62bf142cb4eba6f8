#include "dataprog/schema.hpp"

#include <unordered_set>

#include "dataprog/error.hpp"

namespace dataprog {

std::string_view to_string(Task task) {
  return task == Task::kTags ? "tags" : "sentiment";
}

Task parse_task(std::string_view name) {
  if (name == "tags") return Task::kTags;
  if (name == "sentiment") return Task::kSentiment;
  throw InputError("unknown task \"" + std::string(name) + "\"");
}

std::optional<int> TaskSchema::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

const TaskSchema& sentiment_schema() {
  static const TaskSchema schema{Task::kSentiment, {"negatif", "netral", "positif"},
                                 LabelMode::kMultiClass};
  return schema;
}

const TaskSchema& tags_schema() {
  static const TaskSchema schema{Task::kTags,
                                 {"Aparatur Sipil Negara",
                                  "Lembaga Swadaya Masyarakat",
                                  "bencana alam",
                                  "budidaya",
                                  "masyarakat desa",
                                  "energi",
                                  "foto",
                                  "iklim/cuaca",
                                  "inovasi",
                                  "kebijakan",
                                  "konflik",
                                  "korupsi",
                                  "krisis",
                                  "kumpulan berita",
                                  "lahan",
                                  "mangrove",
                                  "nelayan",
                                  "tentang mongabay",
                                  "pendanaan",
                                  "penelitian",
                                  "penyakit",
                                  "penyelamatan lingkungan",
                                  "perdagangan",
                                  "pertanian",
                                  "perusahaan",
                                  "politik",
                                  "hewan terancam punah",
                                  "sampah",
                                  "sawit",
                                  "tambang",
                                  "trivia"},
                                 LabelMode::kMultiLabel};
  return schema;
}

const TaskSchema& builtin_schema(Task task) {
  return task == Task::kTags ? tags_schema() : sentiment_schema();
}

void validate_schema(const TaskSchema& schema) {
  if (schema.labels.empty()) throw ConfigError("schema has no labels");
  std::unordered_set<std::string> seen;
  for (const auto& label : schema.labels) {
    if (label.empty()) throw ConfigError("schema has an empty label");
    if (label.find(',') != std::string::npos) {
      throw ConfigError("label \"" + label + "\" contains a comma");
    }
    if (!seen.insert(label).second) throw ConfigError("duplicate label \"" + label + "\"");
  }
  if (schema != builtin_schema(schema.task)) {
    throw ConfigError("schema for task \"" + std::string(to_string(schema.task)) +
                      "\" does not match the fixed label set");
  }
}

nlohmann::json schema_to_json(const TaskSchema& schema) {
  return {{"task", std::string(to_string(schema.task))},
          {"mode", schema.mode == LabelMode::kMultiLabel ? "multi_label" : "multi_class"},
          {"labels", schema.labels}};
}

TaskSchema schema_from_json(const nlohmann::json& j) {
  TaskSchema schema;
  try {
    schema.task = parse_task(j.at("task").get<std::string>());
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "multi_label") {
      schema.mode = LabelMode::kMultiLabel;
    } else if (mode == "multi_class") {
      schema.mode = LabelMode::kMultiClass;
    } else {
      throw ConfigError("unknown label mode \"" + mode + "\"");
    }
    schema.labels = j.at("labels").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed schema: ") + e.what());
  }
  validate_schema(schema);
  return schema;
}

}  // namespace dataprog
