#include "dataprog/project.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "dataprog/io.hpp"
#include "dataprog/lf_runtime.hpp"

namespace dataprog {

namespace fs = std::filesystem;
using nlohmann::json;

nlohmann::json manifest_to_json(const Manifest& m) {
  return {{"name", m.name}, {"task", std::string(to_string(m.task))}, {"version", m.version}, {"lfs", m.lfs}};
}

Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.task = parse_task(j.at("task").get<std::string>());
    m.version = j.value("version", std::string());
    m.lfs = j.at("lfs").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

namespace {

const std::vector<TaskSchema>& all_schemas() {
  static const std::vector<TaskSchema> schemas{tags_schema(), sentiment_schema()};
  return schemas;
}

bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 128 || name.front() == '.') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

// LF paths stay inside lfs/: relative, no "..", ".lf" suffix.
void check_lf_path(const std::string& path) {
  fs::path p(path);
  bool ok = !path.empty() && p.is_relative() && p.extension() == ".lf";
  for (const auto& part : p) ok = ok && part != ".." && part != "." && !part.empty();
  if (!ok) throw InputError("LF path \"" + path + "\" must be a relative .lf path inside lfs/");
}

}  // namespace

ManifestCheck check_manifest_sources(Task task, std::span<const LfSource> sources) {
  ManifestCheck out;
  for (const auto& src : sources) {
    try {
      auto spec = lf::parse_lf_spec(src.source, all_schemas(), src.path);
      if (spec.task != task) {
        out.report.diagnostics.push_back({lf::Severity::kError, "unknown-task",
                                          "LF \"" + spec.name + "\" is a " + std::string(to_string(spec.task)) +
                                              " LF in a " + std::string(to_string(task)) + " manifest",
                                          0, 0, src.path});
        continue;
      }
      out.specs.push_back(std::move(spec));
    } catch (const lf::ParseError& e) {
      out.report.diagnostics.push_back(e.diagnostic());
    }
  }
  auto cross = lf::validate_project(out.specs, std::span<const TaskSchema>(&builtin_schema(task), 1), true);
  out.report.diagnostics.insert(out.report.diagnostics.end(), cross.diagnostics.begin(), cross.diagnostics.end());
  return out;
}

std::string_view to_string(PriorMode mode) { return mode == PriorMode::kUniform ? "uniform" : "mv"; }

PriorMode parse_prior_mode(std::string_view name) {
  if (name == "mv") return PriorMode::kMajorityEstimate;
  if (name == "uniform") return PriorMode::kUniform;
  throw InputError("unknown prior \"" + std::string(name) + "\" (expected mv or uniform)");
}

std::string_view to_string(ExportKind kind) {
  switch (kind) {
    case ExportKind::kSoft: return "soft";
    case ExportKind::kHard: return "hard";
    case ExportKind::kGold: return "gold";
  }
  return "soft";
}

ExportKind parse_export_kind(std::string_view name) {
  if (name == "soft") return ExportKind::kSoft;
  if (name == "hard") return ExportKind::kHard;
  if (name == "gold") return ExportKind::kGold;
  throw InputError("unknown export kind \"" + std::string(name) + "\" (expected soft, hard or gold)");
}

struct Project::State {
  std::string id;
  long version = 0;
  std::map<std::string, std::string> manifests;  // name -> path relative to dir
  std::string stage1_manifest;
  Stage1Options stage1;
  std::map<std::string, ModelRecord> models;
  std::map<std::string, std::string> latest_predictions;  // task -> model id
  std::vector<Document> corpus;

  json to_json() const {
    json models_json = json::object();
    for (const auto& [id, r] : models) {
      models_json[id] = {{"task", std::string(to_string(r.task))}, {"manifest", r.manifest},
                         {"kind", std::string(to_string(r.kind))}, {"fingerprint", r.fingerprint},
                         {"path", r.path}};
    }
    return {{"id", id},
            {"version", version},
            {"corpus", "corpus.jsonl"},
            {"manifests", manifests},
            {"stage1",
             {{"manifest", stage1_manifest},
              {"model", std::string(to_string(stage1.model))},
              {"threshold", stage1.threshold},
              {"fire_probability", stage1.defaults.fire_probability},
              {"train", config_to_json(stage1.defaults.train)}}},
            {"models", models_json},
            {"latest_predictions", latest_predictions}};
  }

  static State from_json(const json& j) {
    State s;
    try {
      s.id = j.at("id").get<std::string>();
      s.version = j.at("version").get<long>();
      s.manifests = j.at("manifests").get<std::map<std::string, std::string>>();
      const auto& st = j.at("stage1");
      s.stage1_manifest = st.at("manifest").get<std::string>();
      s.stage1.model = parse_tag_model(st.value("model", std::string("mv")));
      s.stage1.threshold = st.value("threshold", 0.5);
      s.stage1.defaults.fire_probability = st.value("fire_probability", 0.9);
      if (st.contains("train")) s.stage1.defaults.train = config_from_json(st.at("train"));
      const json models = j.value("models", json::object());
      for (const auto& [id, r] : models.items()) {
        s.models[id] = ModelRecord{id,
                                   parse_task(r.at("task").get<std::string>()),
                                   r.at("manifest").get<std::string>(),
                                   parse_tag_model(r.at("kind").get<std::string>()),
                                   r.at("fingerprint").get<std::string>(),
                                   r.at("path").get<std::string>()};
      }
      s.latest_predictions =
          j.value("latest_predictions", json::object()).get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed project.json: ") + e.what());
    }
    return s;
  }
};

Project::~Project() = default;

void Project::init(const fs::path& dir, const std::string& id, const fs::path& lfs_template) {
  if (fs::exists(dir / "project.json")) throw ConfigError("a project already exists in " + dir.string());
  if (!fs::is_directory(lfs_template / "manifests")) {
    throw ConfigError("LF template " + lfs_template.string() + " has no manifests/ directory");
  }
  if (!valid_name(id)) throw InputError("project id \"" + id + "\" may only use letters, digits, '-', '_' and '.'");
  fs::create_directories(dir);
  fs::copy(lfs_template, dir / "lfs", fs::copy_options::recursive | fs::copy_options::overwrite_existing);

  State s;
  s.id = id;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "lfs" / "manifests")) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    Manifest m = manifest_from_json(json::parse(read_file(f)));
    if (!valid_name(m.name)) throw ConfigError("manifest name \"" + m.name + "\" is not a valid name");
    s.manifests[m.name] = fs::relative(f, dir).generic_string();
    if (m.task == Task::kTags && s.stage1_manifest.empty()) s.stage1_manifest = m.name;
  }
  if (s.stage1_manifest.empty()) throw ConfigError("LF template has no tags manifest");
  write_file_atomic(dir / "project.json", s.to_json().dump(2) + "\n");
}

Project::Project(fs::path dir) : dir_(std::move(dir)) {
  const auto path = dir_ / "project.json";
  if (!fs::exists(path)) throw ConfigError("no project at " + dir_.string() + " (run init first)");
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  state_ = std::make_unique<State>(State::from_json(j));
  if (fs::exists(dir_ / "corpus.jsonl")) state_->corpus = load_corpus(dir_ / "corpus.jsonl");
  gold_ = std::make_unique<GoldStore>(dir_ / "gold");
}

std::string Project::id() const {
  std::shared_lock lock(mutex_);
  return state_->id;
}

long Project::version() const {
  std::shared_lock lock(mutex_);
  return state_->version;
}

json Project::summary() const {
  std::shared_lock lock(mutex_);
  json split_counts = {{"train", 0}, {"validation", 0}, {"test", 0}};
  for (const auto& d : state_->corpus) split_counts[std::string(to_string(d.split))] = split_counts[std::string(to_string(d.split))].get<int>() + 1;
  json j = state_->to_json();
  j["documents"] = state_->corpus.size();
  j["splits"] = split_counts;
  j["schemas"] = {schema_to_json(tags_schema()), schema_to_json(sentiment_schema())};
  json gold_counts = json::object();
  for (Task t : {Task::kTags, Task::kSentiment}) gold_counts[std::string(to_string(t))] = gold_->records(t).size();
  j["gold"] = gold_counts;
  return j;
}

void Project::save_state_locked() {
  write_file_atomic(dir_ / "project.json", state_->to_json().dump(2) + "\n");
}

void Project::require_version_locked(long base_version) const {
  if (base_version != state_->version) {
    throw ConflictError("project is at version " + std::to_string(state_->version) + ", request was based on " +
                            std::to_string(base_version),
                        state_->version);
  }
}

std::size_t Project::ingest(const fs::path& raw, std::size_t max_tokens, std::optional<SplitSpec> counts,
                            std::uint64_t seed) {
  if (max_tokens == 0) throw ConfigError("max tokens must be at least 1");
  auto articles = load_raw_articles(raw);
  std::vector<Document> docs;
  for (const auto& a : articles) {
    auto chunks = chunk_article(a, max_tokens);
    docs.insert(docs.end(), std::make_move_iterator(chunks.begin()), std::make_move_iterator(chunks.end()));
  }
  SplitSpec spec = counts ? *counts : default_split_spec(docs.size(), seed);
  spec.seed = seed;
  docs = assign_splits(std::move(docs), spec);
  validate_corpus(docs);

  std::unique_lock lock(mutex_);
  save_corpus(docs, dir_ / "corpus.jsonl");
  state_->corpus = std::move(docs);
  ++state_->version;
  save_state_locked();
  return state_->corpus.size();
}

std::vector<Document> Project::documents() const {
  std::shared_lock lock(mutex_);
  return state_->corpus;
}

std::optional<Document> Project::document(const std::string& id) const {
  std::shared_lock lock(mutex_);
  for (const auto& d : state_->corpus) {
    if (d.id == id) return d;
  }
  return std::nullopt;
}

std::vector<std::string> Project::manifest_names() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, _] : state_->manifests) out.push_back(name);
  return out;
}

std::string Project::resolve_manifest(Task task, const std::string& name) const {
  std::shared_lock lock(mutex_);
  if (name.empty()) {
    if (task == Task::kTags) return state_->stage1_manifest;
    throw InputError("choose a sentiment manifest with --manifest");
  }
  if (state_->manifests.contains(name)) return name;
  const std::string qualified = std::string(to_string(task)) + "-" + name;
  if (state_->manifests.contains(qualified)) return qualified;
  throw InputError("unknown manifest \"" + name + "\"");
}

Manifest Project::manifest(const std::string& name) const {
  std::shared_lock lock(mutex_);
  auto it = state_->manifests.find(name);
  if (it == state_->manifests.end()) throw InputError("unknown manifest \"" + name + "\"");
  return manifest_from_json(json::parse(read_file(dir_ / it->second)));
}

std::vector<LfSource> Project::manifest_sources(const std::string& name) const {
  const Manifest m = manifest(name);
  std::vector<LfSource> out;
  for (const auto& path : m.lfs) out.push_back({path, read_file(dir_ / "lfs" / path)});
  return out;
}

ManifestCheck Project::check_manifest(const std::string& name) const {
  const Manifest m = manifest(name);
  return check_manifest_sources(m.task, manifest_sources(name));
}

std::vector<lf::LabelFunctionSpec> Project::load_specs_locked(const std::string& name) const {
  auto it = state_->manifests.find(name);
  if (it == state_->manifests.end()) throw InputError("unknown manifest \"" + name + "\"");
  const Manifest m = manifest_from_json(json::parse(read_file(dir_ / it->second)));
  std::vector<LfSource> sources;
  for (const auto& path : m.lfs) sources.push_back({path, read_file(dir_ / "lfs" / path)});
  auto check = check_manifest_sources(m.task, sources);
  if (!check.report.ok()) {
    const auto first = std::find_if(check.report.diagnostics.begin(), check.report.diagnostics.end(),
                                    [](const lf::Diagnostic& d) { return d.severity == lf::Severity::kError; });
    throw InputError("manifest \"" + name + "\" has " + std::to_string(check.report.error_count()) +
                     " error(s); first: " + lf::format_diagnostic(*first));
  }
  return std::move(check.specs);
}

PutManifestResult Project::put_manifest(const std::string& name, long base_version,
                                        std::span<const LfSource> sources) {
  std::unique_lock lock(mutex_);
  require_version_locked(base_version);
  auto it = state_->manifests.find(name);
  if (it == state_->manifests.end()) throw InputError("unknown manifest \"" + name + "\"");
  Manifest m = manifest_from_json(json::parse(read_file(dir_ / it->second)));
  for (const auto& s : sources) check_lf_path(s.path);

  PutManifestResult result;
  auto check = check_manifest_sources(m.task, sources);
  result.report = check.report;
  result.version = state_->version;
  if (!check.report.ok()) return result;

  m.lfs.clear();
  for (const auto& s : sources) {
    fs::create_directories((dir_ / "lfs" / s.path).parent_path());
    write_file_atomic(dir_ / "lfs" / s.path, s.source);
    m.lfs.push_back(s.path);
  }
  write_file_atomic(dir_ / it->second, manifest_to_json(m).dump(2) + "\n");
  result.version = ++state_->version;
  save_state_locked();

  if (m.task == Task::kTags) {
    auto matrix = apply_lfs(state_->corpus, check.specs, tags_schema());
    result.analysis = dataprog::analyze(matrix);
    result.tag_density = dataprog::tag_density(matrix);
  } else {
    result.analysis = dataprog::analyze(pipeline_locked(name).sentiment);
  }
  return result;
}

PipelineResult Project::pipeline_locked(const std::string& sentiment_manifest) const {
  auto tag_specs = load_specs_locked(state_->stage1_manifest);
  std::vector<lf::LabelFunctionSpec> sentiment_specs;
  if (!sentiment_manifest.empty()) sentiment_specs = load_specs_locked(sentiment_manifest);
  return run_pipeline(state_->corpus, tag_specs, sentiment_specs, state_->stage1);
}

PipelineResult Project::pipeline(const std::string& sentiment_manifest) const {
  std::shared_lock lock(mutex_);
  return pipeline_locked(sentiment_manifest);
}

PipelineResult Project::apply(const std::string& sentiment_manifest) {
  std::unique_lock lock(mutex_);
  auto r = pipeline_locked(sentiment_manifest);
  fs::create_directories(dir_ / "matrices");
  write_file_atomic(dir_ / "matrices" / (state_->stage1_manifest + ".tsv"), matrix_to_tsv(r.tags));
  if (!sentiment_manifest.empty()) {
    write_file_atomic(dir_ / "matrices" / (sentiment_manifest + ".tsv"), matrix_to_tsv(r.sentiment));
  }
  return r;
}

const LabelMatrix& Project::task_matrix(const PipelineResult& r, Task task) const {
  return task == Task::kTags ? r.tags : r.sentiment;
}

AnalysisReport Project::analyze(Task task, const std::string& manifest) const {
  std::shared_lock lock(mutex_);
  if (task == Task::kTags) {
    auto specs = load_specs_locked(manifest.empty() ? state_->stage1_manifest : manifest);
    return dataprog::analyze(apply_lfs(state_->corpus, specs, tags_schema()));
  }
  return dataprog::analyze(pipeline_locked(manifest).sentiment);
}

double Project::tag_density() const {
  std::shared_lock lock(mutex_);
  auto specs = load_specs_locked(state_->stage1_manifest);
  return dataprog::tag_density(apply_lfs(state_->corpus, specs, tags_schema()));
}

namespace {

json model_file_json(const ModelRecord& r, const FitRequest& req, const json& params) {
  return {{"id", r.id},
          {"task", std::string(to_string(r.task))},
          {"manifest", r.manifest},
          {"kind", std::string(to_string(r.kind))},
          {"fingerprint", r.fingerprint},
          {"prior", std::string(to_string(req.prior))},
          {"config", config_to_json(req.config)},
          {"params", params}};
}

}  // namespace

ModelRecord Project::fit(const FitRequest& req) {
  std::unique_lock lock(mutex_);
  validate_config(req.config);
  const std::string manifest = req.task == Task::kTags ? state_->stage1_manifest : req.manifest;
  if (req.task == Task::kSentiment && manifest.empty()) throw InputError("choose a sentiment manifest");
  const auto r = pipeline_locked(req.task == Task::kTags ? std::string() : manifest);
  const LabelMatrix& matrix = task_matrix(r, req.task);

  ModelRecord rec;
  rec.id = manifest + "-" + std::string(to_string(req.model));
  rec.task = req.task;
  rec.manifest = manifest;
  rec.kind = req.model;
  rec.fingerprint = matrix_fingerprint(matrix);
  rec.path = "models/" + rec.id + ".json";

  json params;
  if (req.task == Task::kTags) {
    TagVoteDefaults defaults = state_->stage1.defaults;
    defaults.train = req.config;
    params = tag_params_to_json(fit_tag_model(matrix, req.model, defaults));
  } else {
    const ClassPrior prior =
        req.prior == PriorMode::kUniform ? uniform_prior(matrix.schema.size()) : mv_estimated_prior(matrix);
    if (req.model == TagModelKind::kMajority) {
      params = {{"prior", prior.p}, {"lf_names", matrix.lf_names}};
    } else {
      params = params_to_json(fit_covariance_model(matrix, prior, req.config));
    }
  }
  fs::create_directories(dir_ / "models");
  write_file_atomic(dir_ / rec.path, model_file_json(rec, req, params).dump(2) + "\n");
  state_->models[rec.id] = rec;
  ++state_->version;
  save_state_locked();
  return rec;
}

std::vector<ModelRecord> Project::models() const {
  std::shared_lock lock(mutex_);
  std::vector<ModelRecord> out;
  for (const auto& [_, r] : state_->models) out.push_back(r);
  return out;
}

ModelRecord Project::model_locked(const std::string& id) const {
  auto it = state_->models.find(id);
  if (it == state_->models.end()) throw InputError("unknown model \"" + id + "\" (run fit first)");
  return it->second;
}

ModelRecord Project::model(const std::string& id) const {
  std::shared_lock lock(mutex_);
  return model_locked(id);
}

std::vector<Prediction> Project::predict_locked(const ModelRecord& rec, std::optional<double> threshold) const {
  const auto r = pipeline_locked(rec.task == Task::kTags ? std::string() : rec.manifest);
  const LabelMatrix& matrix = task_matrix(r, rec.task);
  if (matrix_fingerprint(matrix) != rec.fingerprint) {
    throw ModelError("model \"" + rec.id + "\" was fitted on a different label matrix (corpus or LFs changed); refit it");
  }
  const json file = json::parse(read_file(dir_ / rec.path));
  const json& params = file.at("params");
  std::vector<SoftLabelRecord> soft;
  if (rec.task == Task::kTags) {
    soft = predict_tags(tag_params_from_json(params), matrix);
  } else if (rec.kind == TagModelKind::kMajority) {
    soft = majority_vote(matrix, ClassPrior{params.at("prior").get<std::vector<double>>()});
  } else {
    soft = predict_proba(params_from_json(params), matrix);
  }
  const auto& schema = builtin_schema(rec.task);
  auto hard = harden(soft, schema, threshold.value_or(state_->stage1.threshold));
  std::vector<Prediction> out;
  out.reserve(soft.size());
  for (std::size_t i = 0; i < soft.size(); ++i) {
    out.push_back({std::move(soft[i]), std::move(hard[i]), state_->corpus[i].split});
  }
  return out;
}

namespace {

json prediction_to_json(const Prediction& p, const TaskSchema& schema) {
  return {{"id", p.soft.doc_id},
          {"split", std::string(to_string(p.split))},
          {"probs", p.soft.probs},
          {schema.mode == LabelMode::kMultiClass ? "label" : "labels", label_to_json(p.hard, schema)}};
}

}  // namespace

std::vector<Prediction> Project::predict(const std::string& model_id, std::optional<double> threshold) {
  std::unique_lock lock(mutex_);
  const auto rec = model_locked(model_id);
  auto preds = predict_locked(rec, threshold);
  const auto& schema = builtin_schema(rec.task);
  std::string out;
  for (const auto& p : preds) out += prediction_to_json(p, schema).dump() + "\n";
  fs::create_directories(dir_ / "predictions");
  write_file_atomic(dir_ / "predictions" / (rec.id + ".jsonl"), out);
  state_->latest_predictions[std::string(to_string(rec.task))] = rec.id;
  ++state_->version;
  save_state_locked();
  return preds;
}

std::vector<Prediction> Project::stored_predictions_locked(const std::string& model_id) const {
  const auto rec = model_locked(model_id);
  const auto path = dir_ / "predictions" / (rec.id + ".jsonl");
  std::vector<Prediction> out;
  if (!fs::exists(path)) return out;
  const auto& schema = builtin_schema(rec.task);
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Prediction p;
    p.soft.doc_id = j.at("id").get<std::string>();
    p.soft.task = rec.task;
    p.soft.probs = j.at("probs").get<std::vector<double>>();
    p.split = parse_split(j.at("split").get<std::string>());
    p.hard = label_from_json(j.at(schema.mode == LabelMode::kMultiClass ? "label" : "labels"), p.soft.doc_id, schema);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Prediction> Project::stored_predictions(const std::string& model_id) const {
  std::shared_lock lock(mutex_);
  return stored_predictions_locked(model_id);
}

MetricsReport Project::evaluate(const std::string& model_id, std::optional<Split> split,
                               std::optional<double> threshold) const {
  std::shared_lock lock(mutex_);
  const auto rec = model_locked(model_id);
  const double t = threshold.value_or(state_->stage1.threshold);
  const auto preds = predict_locked(rec, t);
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : preds) by_id[p.soft.doc_id] = &p;

  std::vector<HardLabel> gold;
  std::vector<HardLabel> hard;
  std::vector<SoftLabelRecord> soft;
  for (auto& g : gold_->labels(rec.task)) {
    auto it = by_id.find(g.doc_id);
    if (it == by_id.end()) throw InputError("gold document \"" + g.doc_id + "\" is not in the corpus");
    if (split && it->second->split != *split) continue;
    hard.push_back(it->second->hard);
    soft.push_back(it->second->soft);
    gold.push_back(std::move(g));
  }
  if (gold.empty()) {
    throw InputError("no gold labels for " + std::string(to_string(rec.task)) +
                     (split ? " in the " + std::string(to_string(*split)) + " split" : std::string()));
  }
  const auto& schema = builtin_schema(rec.task);
  if (schema.mode == LabelMode::kMultiClass) return evaluate_multiclass(hard, gold, schema);
  return evaluate_multilabel(soft, gold, schema, t);
}

std::string Project::export_dataset(const std::string& model_id, Split split, ExportKind kind,
                                    std::optional<double> threshold) {
  std::unique_lock lock(mutex_);
  const auto rec = model_locked(model_id);
  const auto& schema = builtin_schema(rec.task);
  const char* label_key = schema.mode == LabelMode::kMultiClass ? "label" : "labels";
  std::string out;
  if (kind == ExportKind::kGold) {
    std::unordered_map<std::string, const Document*> docs;
    for (const auto& d : state_->corpus) docs[d.id] = &d;
    for (const auto& g : gold_->records(rec.task)) {
      auto it = docs.find(g.doc_id);
      if (it == docs.end() || it->second->split != split) continue;
      out += json{{"id", g.doc_id}, {"input", render_input(*it->second)}, {label_key, label_to_json(g.label, schema)}}
                 .dump() +
             "\n";
    }
  } else {
    const auto preds = predict_locked(rec, threshold);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto& p = preds[i];
      if (p.split != split) continue;
      json line = {{"id", p.soft.doc_id}, {"input", render_input(state_->corpus[i])}};
      if (kind == ExportKind::kSoft) {
        line["soft_label"] = p.soft.probs;
      } else {
        line[label_key] = label_to_json(p.hard, schema);
      }
      out += line.dump() + "\n";
    }
  }
  fs::create_directories(dir_ / "exports");
  write_file_atomic(dir_ / "exports" /
                        (rec.id + "-" + std::string(to_string(split)) + "-" + std::string(to_string(kind)) + ".jsonl"),
                    out);
  return out;
}

GoldRecord Project::review(const std::string& doc_id, Task task, const json& label, const std::string& reviewer) {
  std::unique_lock lock(mutex_);
  const Document* doc = nullptr;
  for (const auto& d : state_->corpus) {
    if (d.id == doc_id) doc = &d;
  }
  if (!doc) throw InputError("unknown document \"" + doc_id + "\"");
  const auto& schema = builtin_schema(task);
  HardLabel revised = label_from_json(label, doc_id, schema);

  std::optional<HardLabel> current;
  if (auto it = state_->latest_predictions.find(std::string(to_string(task)));
      it != state_->latest_predictions.end() && state_->models.contains(it->second)) {
    for (auto& p : stored_predictions_locked(it->second)) {
      if (p.soft.doc_id == doc_id) current = std::move(p.hard);
    }
  }
  auto record = gold_->record_review(*doc, task, std::move(revised), reviewer, current);
  ++state_->version;
  save_state_locked();
  return record;
}

Stage1Options Project::stage1() const {
  std::shared_lock lock(mutex_);
  return state_->stage1;
}

std::string Project::stage1_manifest() const {
  std::shared_lock lock(mutex_);
  return state_->stage1_manifest;
}

}  // namespace dataprog
