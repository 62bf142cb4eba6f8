#include "dataprog/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dataprog/error.hpp"

namespace dataprog {

namespace {

struct Counts {
  std::size_t covered = 0, overlapped = 0, conflicted = 0;
  std::vector<std::size_t> lf_cov, lf_over, lf_conf;

  explicit Counts(std::size_t m) : lf_cov(m), lf_over(m), lf_conf(m) {}

  void merge(const Counts& o) {
    covered += o.covered;
    overlapped += o.overlapped;
    conflicted += o.conflicted;
    for (std::size_t j = 0; j < lf_cov.size(); ++j) {
      lf_cov[j] += o.lf_cov[j];
      lf_over[j] += o.lf_over[j];
      lf_conf[j] += o.lf_conf[j];
    }
  }
};

void count_row(std::span<const int> row, Counts& c) {
  std::size_t voters = 0;
  int first = kAbstain;
  bool disagree = false;
  for (int v : row) {
    if (v == kAbstain) continue;
    if (voters == 0) {
      first = v;
    } else if (v != first) {
      disagree = true;
    }
    ++voters;
  }
  if (voters == 0) return;
  ++c.covered;
  if (voters >= 2) ++c.overlapped;
  if (disagree) ++c.conflicted;
  for (std::size_t j = 0; j < row.size(); ++j) {
    int v = row[j];
    if (v == kAbstain) continue;
    ++c.lf_cov[j];
    if (voters >= 2) ++c.lf_over[j];
    if (disagree) {
      // Conflict for LF j: some other voter differs from j's vote.
      for (int w : row) {
        if (w != kAbstain && w != v) {
          ++c.lf_conf[j];
          break;
        }
      }
    }
  }
}

double frac(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

AnalysisReport analyze(const LabelMatrix& matrix) {
  const std::size_t n = matrix.rows(), m = matrix.cols();
  Counts total(m);
  const auto rows = static_cast<std::ptrdiff_t>(n);

  // Integer counts make the reduction order-independent.
#pragma omp parallel
  {
    Counts local(m);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < rows; ++i) count_row(matrix.row(static_cast<std::size_t>(i)), local);
#pragma omp critical(dataprog_analyze_merge)
    total.merge(local);
  }

  AnalysisReport report;
  report.rows = n;
  report.coverage = frac(total.covered, n);
  report.overlaps = frac(total.overlapped, n);
  report.conflicts = frac(total.conflicted, n);
  report.conflict_coverage_ratio =
      total.covered == 0 ? 0.0 : std::round(frac(total.conflicted, total.covered) * 1e4) / 1e4;
  for (std::size_t j = 0; j < m; ++j) {
    report.per_lf.push_back({matrix.lf_names[j], frac(total.lf_cov[j], n),
                             frac(total.lf_over[j], n), frac(total.lf_conf[j], n)});
  }
  return report;
}

double tag_density(const LabelMatrix& matrix) {
  if (matrix.schema.mode != LabelMode::kMultiLabel) {
    throw ConfigError("tag density needs a multi-label matrix");
  }
  const std::size_t n = matrix.rows(), m = matrix.cols(), t = matrix.schema.size();
  if (n == 0 || t == 0) return 0.0;
  std::size_t covered_pairs = 0;
  std::vector<char> fired(t);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(fired.begin(), fired.end(), 0);
    for (std::size_t j = 0; j < m; ++j) {
      int v = matrix.at(i, j);
      if (v != kAbstain) fired[static_cast<std::size_t>(v)] = 1;
    }
    covered_pairs += static_cast<std::size_t>(std::count(fired.begin(), fired.end(), 1));
  }
  return static_cast<double>(covered_pairs) / static_cast<double>(n * t);
}

nlohmann::json report_to_json(const AnalysisReport& report) {
  nlohmann::json per_lf = nlohmann::json::array();
  for (const auto& s : report.per_lf) {
    per_lf.push_back({{"lf_name", s.lf_name},
                      {"coverage", s.coverage},
                      {"overlaps", s.overlaps},
                      {"conflicts", s.conflicts}});
  }
  return {{"rows", report.rows},
          {"coverage", report.coverage},
          {"overlaps", report.overlaps},
          {"conflicts", report.conflicts},
          {"conflict_coverage_ratio", report.conflict_coverage_ratio},
          {"per_lf", per_lf}};
}

AnalysisReport report_from_json(const nlohmann::json& j) {
  AnalysisReport r;
  r.rows = j.at("rows").get<std::size_t>();
  r.coverage = j.at("coverage").get<double>();
  r.overlaps = j.at("overlaps").get<double>();
  r.conflicts = j.at("conflicts").get<double>();
  r.conflict_coverage_ratio = j.at("conflict_coverage_ratio").get<double>();
  for (const auto& s : j.at("per_lf")) {
    r.per_lf.push_back({s.at("lf_name").get<std::string>(), s.at("coverage").get<double>(),
                        s.at("overlaps").get<double>(), s.at("conflicts").get<double>()});
  }
  return r;
}

std::string render_report_table(const AnalysisReport& report) {
  std::size_t width = 9;  // "aggregate"
  for (const auto& s : report.per_lf) width = std::max(width, s.lf_name.size());
  std::string out;
  char buf[128];
  auto row = [&](const std::string& name, double cov, double over, double conf) {
    out += name;
    out.append(width - std::min(width, name.size()) + 2, ' ');
    std::snprintf(buf, sizeof buf, "%9.2f %9.2f %9.2f\n", cov * 100, over * 100, conf * 100);
    out += buf;
  };
  out += "name";
  out.append(width - 4 + 2, ' ');
  std::snprintf(buf, sizeof buf, "%9s %9s %9s\n", "coverage", "overlaps", "conflicts");
  out += buf;
  for (const auto& s : report.per_lf) row(s.lf_name, s.coverage, s.overlaps, s.conflicts);
  row("aggregate", report.coverage, report.overlaps, report.conflicts);
  std::snprintf(buf, sizeof buf, "conflicts/coverage: %.4f  (rows: %zu)\n",
                report.conflict_coverage_ratio, report.rows);
  out += buf;
  return out;
}

}  // namespace dataprog
