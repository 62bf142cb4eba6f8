#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dataprog/label_matrix.hpp"
#include "json.hpp"

namespace dataprog {

inline constexpr double kProbFloor = 1e-6;

struct ClassPrior {
  std::vector<double> p;

  bool operator==(const ClassPrior&) const = default;
};

// Floors every weight at kProbFloor and normalizes.
ClassPrior make_prior(std::vector<double> weights);
ClassPrior uniform_prior(std::size_t k);
// Class distribution of majority-vote hard labels over rows with ≥1 vote;
// uniform when no row is covered.
ClassPrior mv_estimated_prior(const LabelMatrix& matrix);

struct TrainConfig {
  double l2 = 0.01;
  int epochs = 2;
  std::size_t batch_size = 5000;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  double init_accuracy = 0.7;   // a0 in the accuracy-prior initialisation
  double init_noise = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  bool operator==(const TrainConfig&) const = default;
};

void validate_config(const TrainConfig& config);

// mu[(j, c), y] ≈ P(LF j votes c, Y = y), stored row-major as ((j·k + c)·k + y).
struct LabelModelParams {
  std::vector<std::string> lf_names;
  TaskSchema schema;
  std::size_t k = 0;
  std::vector<double> mu;
  ClassPrior prior;
  std::vector<std::pair<long, double>> train_log;  // (optimizer step, full-data loss)

  std::size_t num_lfs() const { return lf_names.size(); }
  double at(std::size_t j, std::size_t c, std::size_t y) const { return mu[(j * k + c) * k + y]; }
  double& at(std::size_t j, std::size_t c, std::size_t y) { return mu[(j * k + c) * k + y]; }

  bool operator==(const LabelModelParams&) const = default;
};

// probs[y] = votes for y / non-abstain votes; all-abstain rows get the prior.
std::vector<SoftLabelRecord> majority_vote(const LabelMatrix& matrix, const ClassPrior& prior);

// Fits mu by mini-batch Adam on the off-diagonal second-moment objective.
// Always-abstain LFs are pruned first (their mu stays zero). Throws ModelError
// when fewer than two LFs vote.
LabelModelParams fit_covariance_model(const LabelMatrix& matrix, const ClassPrior& prior,
                                      const TrainConfig& config);

// probs[y] ∝ p[y] · Π_{j votes} mu[(j, vote_j), y] / p[y]; all-abstain rows
// get the prior. Throws ModelError on LF-name or schema mismatch.
std::vector<SoftLabelRecord> predict_proba(const LabelModelParams& params,
                                           const LabelMatrix& matrix);

// Multi-class: argmax, lowest index on ties. Multi-label: prob ≥ threshold.
std::vector<HardLabel> harden(std::span<const SoftLabelRecord> soft, const TaskSchema& schema,
                              double threshold = 0.5);

// Building blocks of the covariance model, exposed for gradient checks.
namespace cm {

// O = ΨᵀΨ / |rows| over the augmented one-hot indicator Ψ (abstain = zeros),
// (m·k) × (m·k) row-major.
std::vector<double> second_moment(const LabelMatrix& matrix, std::span<const std::size_t> rows);

// Σ_{j≠j'} ‖O_jj' − μ_j diag(1/p) μ_j'ᵀ‖²_F + l2‖μ‖²_F
double objective(std::span<const double> mu, std::span<const double> moments, std::size_t m,
                 std::size_t k, std::span<const double> prior, double l2);

// Writes ∂objective/∂μ into `grad` and returns the objective.
double gradient(std::span<const double> mu, std::span<const double> moments, std::size_t m,
                std::size_t k, std::span<const double> prior, double l2, std::span<double> grad);

// Clamp to [ε, 1−ε], then rescale each (j, y) group so Σ_c μ ≤ p[y].
void project(std::span<double> mu, std::size_t m, std::size_t k, std::span<const double> prior);

}  // namespace cm

enum class TagModelKind { kMajority, kCovariance };

std::string_view to_string(TagModelKind kind);
TagModelKind parse_tag_model(std::string_view name);

struct TagVoteDefaults {
  double fire_probability = 0.9;  // calibrated fallback p(present | some LF fired)
  TrainConfig train;
};

// One binary present/absent model per tag.
struct TagModelParams {
  enum class Mode { kNone, kVote, kCovariance, kCalibrated };
  struct PerTag {
    Mode mode = Mode::kNone;
    std::vector<std::size_t> columns;  // LF columns targeting this tag
    double base_rate = 0;              // fired fraction over the fitting corpus
    double fire_probability = 0;
    std::optional<LabelModelParams> model;

    bool operator==(const PerTag&) const = default;
  };
  TagModelKind kind = TagModelKind::kMajority;
  std::vector<std::string> lf_names;
  TaskSchema schema;
  std::vector<PerTag> tags;

  bool operator==(const TagModelParams&) const = default;
};

TagModelParams fit_tag_model(const LabelMatrix& matrix, TagModelKind kind,
                             const TagVoteDefaults& defaults);
std::vector<SoftLabelRecord> predict_tags(const TagModelParams& params, const LabelMatrix& matrix);
// fit_tag_model followed by predict_tags on the same matrix.
std::vector<SoftLabelRecord> tag_vote(const LabelMatrix& matrix, TagModelKind kind,
                                      const TagVoteDefaults& defaults);

// Binary sub-matrix for one tag: columns targeting it, votes 1 (present) or
// abstain, schema [absent, present].
LabelMatrix tag_submatrix(const LabelMatrix& matrix, std::size_t tag);

nlohmann::json config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const LabelModelParams& params);
LabelModelParams params_from_json(const nlohmann::json& j);
nlohmann::json tag_params_to_json(const TagModelParams& params);
TagModelParams tag_params_from_json(const nlohmann::json& j);

}  // namespace dataprog
