#include "dataprog/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "dataprog/error.hpp"

namespace dataprog {

double precision(const BinaryCounts& c) {
  return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const BinaryCounts& c) {
  return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1(const BinaryCounts& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::optional<double> roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw InputError("roc_auc: scores and labels differ in length");
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double area = 0.0, tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    double dtp = 0, dfp = 0;
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] ? dtp : dfp) += 1;
    area += dfp * (tp + dtp / 2.0);
    tp += dtp;
    fp += dfp;
  }
  return area / (static_cast<double>(pos) * static_cast<double>(neg));
}

namespace {

// Maps each gold doc id to its index after checking both sides cover the
// same ids exactly once.
template <typename P>
std::vector<std::size_t> align(std::span<const P> pred, std::span<const HardLabel> gold) {
  if (pred.empty() || gold.empty()) throw InputError("evaluation needs non-empty predictions and gold");
  std::unordered_map<std::string, std::size_t> gold_index;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold_index.emplace(gold[i].doc_id, i).second) {
      throw InputError("duplicate gold record for \"" + gold[i].doc_id + "\"");
    }
  }
  std::vector<std::size_t> out;
  std::vector<std::string> only_pred;
  std::unordered_map<std::string, bool> seen;
  for (const auto& p : pred) {
    if (!seen.emplace(p.doc_id, true).second) throw InputError("duplicate prediction for \"" + p.doc_id + "\"");
    auto it = gold_index.find(p.doc_id);
    if (it == gold_index.end()) {
      only_pred.push_back(p.doc_id);
    } else {
      out.push_back(it->second);
    }
  }
  std::vector<std::string> only_gold;
  for (const auto& g : gold) {
    if (!seen.contains(g.doc_id)) only_gold.push_back(g.doc_id);
  }
  if (!only_pred.empty() || !only_gold.empty()) {
    auto list = [](std::vector<std::string> ids) {
      std::sort(ids.begin(), ids.end());
      std::string s;
      for (std::size_t i = 0; i < ids.size() && i < 10; ++i) s += (i ? ", " : "") + ids[i];
      if (ids.size() > 10) s += ", ... (" + std::to_string(ids.size()) + " total)";
      return ids.empty() ? std::string("none") : s;
    };
    throw InputError("prediction and gold ids differ; only in predictions: " + list(only_pred) +
                     "; only in gold: " + list(only_gold));
  }
  return out;
}

}  // namespace

MetricsReport evaluate_multiclass(std::span<const HardLabel> pred, std::span<const HardLabel> gold,
                                  const TaskSchema& schema) {
  if (schema.mode != LabelMode::kMultiClass) throw ConfigError("evaluate_multiclass needs a multi-class schema");
  const auto gi = align(pred, gold);
  const int k = static_cast<int>(schema.size());
  std::vector<BinaryCounts> per(schema.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = pred[i].cls, g = gold[gi[i]].cls;
    if (p < 0 || p >= k) throw InputError("prediction for \"" + pred[i].doc_id + "\" has no valid class");
    if (g < 0 || g >= k) throw InputError("gold for \"" + pred[i].doc_id + "\" has no valid class");
    if (p == g) {
      ++correct;
      ++per[static_cast<std::size_t>(p)].tp;
    } else {
      ++per[static_cast<std::size_t>(p)].fp;
      ++per[static_cast<std::size_t>(g)].fn;
    }
  }
  MetricsReport r;
  r.task = schema.task;
  r.docs = pred.size();
  r.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  BinaryCounts pooled;
  double macro = 0;
  for (std::size_t c = 0; c < per.size(); ++c) {
    pooled += per[c];
    macro += f1(per[c]);
    r.per_label_f1.emplace_back(schema.labels[c], f1(per[c]));
  }
  r.f1_macro = macro / static_cast<double>(per.size());
  r.f1_micro = f1(pooled);
  r.precision_micro = precision(pooled);
  r.recall_micro = recall(pooled);
  return r;
}

MetricsReport evaluate_multilabel(std::span<const SoftLabelRecord> pred,
                                  std::span<const HardLabel> gold, const TaskSchema& schema,
                                  double threshold) {
  if (schema.mode != LabelMode::kMultiLabel) throw ConfigError("evaluate_multilabel needs a multi-label schema");
  if (!(threshold > 0 && threshold < 1)) throw ConfigError("threshold must lie in (0, 1)");
  const auto gi = align(pred, gold);
  const std::size_t t_count = schema.size(), n = pred.size();
  std::vector<BinaryCounts> per(t_count);
  std::vector<std::vector<double>> scores(t_count);
  std::vector<std::vector<bool>> truth(t_count);
  std::size_t exact = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = pred[i];
    const auto& g = gold[gi[i]];
    if (p.probs.size() != t_count) throw InputError("prediction for \"" + p.doc_id + "\" has wrong length");
    if (g.present.size() != t_count) throw InputError("gold for \"" + p.doc_id + "\" has wrong length");
    bool all = true;
    for (std::size_t t = 0; t < t_count; ++t) {
      const double s = p.probs[t];
      if (!(s >= 0.0 && s <= 1.0)) {
        throw InputError("probability " + std::to_string(s) + " for \"" + p.doc_id + "\" is outside [0, 1]");
      }
      const bool hard = s >= threshold, gt = g.present[t];
      auto& c = per[t];
      (hard ? (gt ? c.tp : c.fp) : (gt ? c.fn : c.tn)) += 1;
      all = all && hard == gt;
      scores[t].push_back(s);
      truth[t].push_back(gt);
    }
    exact += all;
  }
  MetricsReport r;
  r.task = schema.task;
  r.docs = n;
  r.accuracy = static_cast<double>(exact) / static_cast<double>(n);
  BinaryCounts pooled;
  double macro = 0, auc_sum = 0;
  std::size_t auc_tags = 0;
  std::vector<double> all_scores;
  std::vector<bool> all_truth;
  all_scores.reserve(n * t_count);
  all_truth.reserve(n * t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    pooled += per[t];
    macro += f1(per[t]);
    r.per_label_f1.emplace_back(schema.labels[t], f1(per[t]));
    if (auto auc = roc_auc(scores[t], truth[t])) {
      auc_sum += *auc;
      ++auc_tags;
    }
    all_scores.insert(all_scores.end(), scores[t].begin(), scores[t].end());
    all_truth.insert(all_truth.end(), truth[t].begin(), truth[t].end());
  }
  r.f1_macro = macro / static_cast<double>(t_count);
  r.f1_micro = f1(pooled);
  r.precision_micro = precision(pooled);
  r.recall_micro = recall(pooled);
  r.roc_auc = roc_auc(all_scores, all_truth);
  if (auc_tags > 0) r.roc_auc_macro = auc_sum / static_cast<double>(auc_tags);
  return r;
}

nlohmann::json metrics_to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [label, score] : r.per_label_f1) per[label] = score;
  return {{"task", std::string(to_string(r.task))},
          {"docs", r.docs},
          {"accuracy", opt(r.accuracy)},
          {"f1_macro", opt(r.f1_macro)},
          {"f1_micro", opt(r.f1_micro)},
          {"roc_auc_micro", opt(r.roc_auc)},
          {"roc_auc_macro", opt(r.roc_auc_macro)},
          {"precision_micro", opt(r.precision_micro)},
          {"recall_micro", opt(r.recall_micro)},
          {"per_label_f1", per}};
}

std::string render_metrics_table(const MetricsReport& r) {
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
    return std::string(buf);
  };
  // F1 is the task's headline F1: macro for sentiment, micro for tags.
  const bool tags = r.task == Task::kTags;
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %8s %8s %8s %8s %8s\n", "task", "Acc", "F1", "R/A", "F1-ma", "F1-mi");
  out += line;
  std::snprintf(line, sizeof line, "%-8s %8s %8s %8s %8s %8s\n", std::string(to_string(r.task)).c_str(),
                pct(r.accuracy).c_str(), pct(tags ? r.f1_micro : r.f1_macro).c_str(), pct(r.roc_auc).c_str(),
                pct(r.f1_macro).c_str(), pct(r.f1_micro).c_str());
  out += line;
  if (r.roc_auc_macro) out += "roc_auc_macro " + pct(r.roc_auc_macro) + "\n";
  std::size_t width = 5;
  for (const auto& [label, _] : r.per_label_f1) width = std::max(width, label.size());
  out += "\n";
  for (const auto& [label, score] : r.per_label_f1) {
    std::snprintf(line, sizeof line, "%-*s %8s\n", static_cast<int>(width), label.c_str(), pct(score).c_str());
    out += line;
  }
  return out;
}

}  // namespace dataprog
