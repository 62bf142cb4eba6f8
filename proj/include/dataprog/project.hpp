#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "dataprog/analysis.hpp"
#include "dataprog/corpus.hpp"
#include "dataprog/evaluation.hpp"
#include "dataprog/gold.hpp"
#include "dataprog/label_model.hpp"
#include "dataprog/lf_dsl.hpp"
#include "dataprog/pipeline.hpp"

namespace dataprog {

// A named LF set. `lfs` are paths of .lf files relative to the project's
// lfs/ directory, one LF per file.
struct Manifest {
  std::string name;
  Task task = Task::kSentiment;
  std::string version;
  std::vector<std::string> lfs;

  bool operator==(const Manifest&) const = default;
};

nlohmann::json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);

struct LfSource {
  std::string path;
  std::string source;
};

// Parse and cross-LF diagnostics for a manifest. `specs` holds every LF that
// parsed; the set is usable only when report.ok().
struct ManifestCheck {
  std::vector<lf::LabelFunctionSpec> specs;
  lf::ValidationReport report;
};

ManifestCheck check_manifest_sources(Task task, std::span<const LfSource> sources);

enum class PriorMode { kMajorityEstimate, kUniform };

std::string_view to_string(PriorMode mode);
PriorMode parse_prior_mode(std::string_view name);

struct FitRequest {
  Task task = Task::kSentiment;
  std::string manifest;  // sentiment manifest; ignored for tags
  TagModelKind model = TagModelKind::kCovariance;
  PriorMode prior = PriorMode::kMajorityEstimate;
  TrainConfig config;
};

// Registry entry; the model file holds the parameters as well.
struct ModelRecord {
  std::string id;
  Task task = Task::kSentiment;
  std::string manifest;
  TagModelKind kind = TagModelKind::kCovariance;
  std::string fingerprint;  // of the matrix the model was fitted on
  std::string path;         // relative to the project directory

  bool operator==(const ModelRecord&) const = default;
};

struct Prediction {
  SoftLabelRecord soft;
  HardLabel hard;
  Split split = Split::kTrain;
};

enum class ExportKind { kSoft, kHard, kGold };

std::string_view to_string(ExportKind kind);
ExportKind parse_export_kind(std::string_view name);

struct PutManifestResult {
  long version = 0;
  lf::ValidationReport report;
  std::optional<AnalysisReport> analysis;  // present when the manifest was saved
  std::optional<double> tag_density;       // tags manifest only
};

// One project directory:
//   project.json              id, version, manifests, stage-1 options, model registry
//   corpus.jsonl              chunked, split documents
//   lfs/manifests/<name>.json  lfs/<...>.lf
//   matrices/<manifest>.tsv   models/<id>.json   predictions/<id>.jsonl
//   gold/gold.jsonl           gold/audit.jsonl   exports/
// Every file is replaced atomically. Mutations take an exclusive lock and
// bump the version; reads share the lock.
class Project {
 public:
  // Creates a project from a directory of shipped LFs (with manifests/).
  static void init(const std::filesystem::path& dir, const std::string& id,
                   const std::filesystem::path& lfs_template);

  explicit Project(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::string id() const;
  long version() const;
  nlohmann::json summary() const;

  // Raw articles → chunks → splits → corpus.jsonl. `counts` overrides the
  // default 80/10/10 split.
  std::size_t ingest(const std::filesystem::path& raw, std::size_t max_tokens,
                     std::optional<SplitSpec> counts, std::uint64_t seed);

  std::vector<Document> documents() const;
  std::optional<Document> document(const std::string& id) const;

  std::vector<std::string> manifest_names() const;
  // Accepts a full name ("sentiment-v1") or a version within a task ("v1").
  std::string resolve_manifest(Task task, const std::string& name) const;
  Manifest manifest(const std::string& name) const;
  std::vector<LfSource> manifest_sources(const std::string& name) const;
  ManifestCheck check_manifest(const std::string& name) const;
  // Rejects a stale base_version with ConflictError. Invalid LF sources leave
  // the project untouched and come back as diagnostics.
  PutManifestResult put_manifest(const std::string& name, long base_version,
                                 std::span<const LfSource> sources);

  // Stage-1 tags matrix plus the sentiment matrix for the given manifest.
  PipelineResult pipeline(const std::string& sentiment_manifest) const;
  // Writes matrices/<tags>.tsv and matrices/<sentiment>.tsv.
  PipelineResult apply(const std::string& sentiment_manifest);
  AnalysisReport analyze(Task task, const std::string& manifest) const;
  double tag_density() const;

  ModelRecord fit(const FitRequest& request);
  std::vector<ModelRecord> models() const;
  ModelRecord model(const std::string& id) const;
  // Refuses a model whose recorded fingerprint differs from the current
  // matrix. Writes predictions/<id>.jsonl.
  // `threshold` hardens multi-label outputs; defaults to the project's.
  std::vector<Prediction> predict(const std::string& model_id, std::optional<double> threshold = std::nullopt);
  // Last written predictions for the model, empty if none.
  std::vector<Prediction> stored_predictions(const std::string& model_id) const;

  MetricsReport evaluate(const std::string& model_id, std::optional<Split> split,
                         std::optional<double> threshold = std::nullopt) const;
  // Writes exports/<model>-<split>-<kind>.jsonl and returns its content.
  std::string export_dataset(const std::string& model_id, Split split, ExportKind kind,
                             std::optional<double> threshold = std::nullopt);

  GoldRecord review(const std::string& doc_id, Task task, const nlohmann::json& label,
                    const std::string& reviewer);
  const GoldStore& gold() const { return *gold_; }

  Stage1Options stage1() const;
  std::string stage1_manifest() const;

 private:
  struct State;

  void save_state_locked();
  void require_version_locked(long base_version) const;
  std::vector<lf::LabelFunctionSpec> load_specs_locked(const std::string& name) const;
  PipelineResult pipeline_locked(const std::string& sentiment_manifest) const;
  const LabelMatrix& task_matrix(const PipelineResult& r, Task task) const;
  std::vector<Prediction> predict_locked(const ModelRecord& record, std::optional<double> threshold) const;
  std::vector<Prediction> stored_predictions_locked(const std::string& model_id) const;
  ModelRecord model_locked(const std::string& id) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<State> state_;
  std::unique_ptr<GoldStore> gold_;

 public:
  ~Project();
};

}  // namespace dataprog
