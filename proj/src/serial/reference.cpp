#include "dataprog/serial/reference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dataprog/lf_runtime.hpp"

namespace dataprog::serial {

LabelMatrix apply_lfs(std::span<const Document> docs, std::span<const lf::LabelFunctionSpec> specs,
                      const TaskSchema& schema) {
  LabelMatrix matrix;
  matrix.schema = schema;
  for (const auto& d : docs) matrix.doc_ids.push_back(d.id);
  std::vector<CompiledLf> lfs;
  for (const auto& spec : specs) {
    lfs.emplace_back(spec, schema);
    matrix.lf_names.push_back(lfs.back().name());
    matrix.lf_targets.push_back(lfs.back().target());
  }
  matrix.votes.assign(docs.size() * lfs.size(), kAbstain);
  for (std::size_t j = 0; j < lfs.size(); ++j) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (lfs[j].evaluate(make_context(docs[i]))) matrix.at(i, j) = lfs[j].target();
    }
  }
  return matrix;
}

AnalysisReport analyze(const LabelMatrix& matrix) {
  const std::size_t n = matrix.rows(), m = matrix.cols();
  auto frac = [n](std::size_t c) { return n == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(n); };
  std::size_t covered = 0, overlapped = 0, conflicted = 0;
  std::vector<std::size_t> cov(m), over(m), conf(m);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> votes;
    for (std::size_t j = 0; j < m; ++j) {
      if (matrix.at(i, j) != kAbstain) votes.push_back(matrix.at(i, j));
    }
    const std::set<int> distinct(votes.begin(), votes.end());
    covered += votes.size() >= 1;
    overlapped += votes.size() >= 2;
    conflicted += distinct.size() >= 2;
    for (std::size_t j = 0; j < m; ++j) {
      const int v = matrix.at(i, j);
      if (v == kAbstain) continue;
      ++cov[j];
      bool other = false, disagree = false;
      for (std::size_t o = 0; o < m; ++o) {
        if (o == j || matrix.at(i, o) == kAbstain) continue;
        other = true;
        disagree = disagree || matrix.at(i, o) != v;
      }
      over[j] += other;
      conf[j] += disagree;
    }
  }
  AnalysisReport r;
  r.rows = n;
  r.coverage = frac(covered);
  r.overlaps = frac(overlapped);
  r.conflicts = frac(conflicted);
  r.conflict_coverage_ratio =
      covered == 0 ? 0.0
                   : std::round(static_cast<double>(conflicted) / static_cast<double>(covered) * 1e4) / 1e4;
  for (std::size_t j = 0; j < m; ++j) {
    r.per_lf.push_back({matrix.lf_names[j], frac(cov[j]), frac(over[j]), frac(conf[j])});
  }
  return r;
}

std::vector<SoftLabelRecord> majority_vote(const LabelMatrix& matrix, const ClassPrior& prior) {
  const std::size_t k = matrix.schema.size();
  std::vector<SoftLabelRecord> out;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    SoftLabelRecord rec{matrix.doc_ids[i], matrix.schema.task, std::vector<double>(k, 0.0)};
    double total = 0;
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      if (matrix.at(i, j) == kAbstain) continue;
      rec.probs[static_cast<std::size_t>(matrix.at(i, j))] += 1;
      total += 1;
    }
    if (total == 0) {
      rec.probs = prior.p;
    } else {
      for (double& p : rec.probs) p /= total;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SoftLabelRecord> predict_proba(const LabelModelParams& params, const LabelMatrix& matrix) {
  const std::size_t k = params.k;
  std::vector<SoftLabelRecord> out;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    SoftLabelRecord rec{matrix.doc_ids[i], matrix.schema.task, {}};
    std::vector<double> score(k);
    bool voted = false;
    for (std::size_t y = 0; y < k; ++y) {
      const double py = std::max(params.prior.p[y], kProbFloor);
      score[y] = py;
      for (std::size_t j = 0; j < matrix.cols(); ++j) {
        const int v = matrix.at(i, j);
        if (v == kAbstain) continue;
        voted = true;
        score[y] *= std::max(params.at(j, static_cast<std::size_t>(v), y), kProbFloor) / py;
      }
    }
    if (!voted) {
      rec.probs = params.prior.p;
    } else {
      double total = 0;
      for (double s : score) total += s;
      for (double& s : score) s /= total;
      rec.probs = score;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<double> second_moment(const LabelMatrix& matrix, std::span<const std::size_t> rows) {
  const std::size_t m = matrix.cols(), k = matrix.schema.size(), d = m * k;
  std::vector<std::vector<double>> psi;
  for (std::size_t i : rows) {
    std::vector<double> r(d, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      if (matrix.at(i, j) != kAbstain) r[j * k + static_cast<std::size_t>(matrix.at(i, j))] = 1.0;
    }
    psi.push_back(std::move(r));
  }
  std::vector<double> o(d * d, 0.0);
  if (rows.empty()) return o;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      double s = 0;
      for (const auto& r : psi) s += r[a] * r[b];
      o[a * d + b] = s / static_cast<double>(rows.size());
    }
  }
  return o;
}

}  // namespace dataprog::serial
