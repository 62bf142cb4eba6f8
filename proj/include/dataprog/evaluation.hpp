#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dataprog/label_matrix.hpp"
#include "json.hpp"

namespace dataprog {

struct BinaryCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  BinaryCounts& operator+=(const BinaryCounts& o) {
    tp += o.tp, fp += o.fp, fn += o.fn, tn += o.tn;
    return *this;
  }
};

// Each is 0 when its denominator is 0.
double precision(const BinaryCounts& c);
double recall(const BinaryCounts& c);
double f1(const BinaryCounts& c);

// Area under the ROC curve with tied scores grouped into one trapezoid step.
// Empty when the labels are all positive or all negative.
std::optional<double> roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

// Scores absent when undefined for the task.
struct MetricsReport {
  Task task = Task::kSentiment;
  std::size_t docs = 0;
  std::optional<double> accuracy;
  std::optional<double> f1_macro;
  std::optional<double> f1_micro;
  std::optional<double> roc_auc;        // micro: pooled (doc, tag) scores
  std::optional<double> roc_auc_macro;  // mean over tags with both gold classes
  std::optional<double> precision_micro;
  std::optional<double> recall_micro;
  std::vector<std::pair<std::string, double>> per_label_f1;  // schema order

  bool operator==(const MetricsReport&) const = default;
};

// Predictions and gold must cover the same doc ids (any order); InputError
// lists the symmetric difference otherwise. A class with no support and no
// predictions has F1 0.
MetricsReport evaluate_multiclass(std::span<const HardLabel> pred, std::span<const HardLabel> gold,
                                  const TaskSchema& schema);

// Per-tag probabilities hardened at `threshold`. Tags with no positive gold
// keep F1 0 in the macro mean and are left out of roc_auc_macro.
MetricsReport evaluate_multilabel(std::span<const SoftLabelRecord> pred,
                                  std::span<const HardLabel> gold, const TaskSchema& schema,
                                  double threshold = 0.5);

nlohmann::json metrics_to_json(const MetricsReport& report);

// Columns Acc, F1, R/A, F1-ma, F1-mi, then per-label F1.
std::string render_metrics_table(const MetricsReport& report);

}  // namespace dataprog
