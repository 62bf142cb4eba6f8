#pragma once

#include <string>
#include <vector>

#include "dataprog/label_matrix.hpp"
#include "json.hpp"

namespace dataprog {

// Row fractions. Aggregate: coverage = ≥1 vote, overlaps = ≥2 votes,
// conflicts = ≥2 votes that are not all equal. Per LF the same, conditioned
// on that LF voting (overlap/conflict with at least one other LF).
struct LfStats {
  std::string lf_name;
  double coverage = 0;
  double overlaps = 0;
  double conflicts = 0;

  bool operator==(const LfStats&) const = default;
};

struct AnalysisReport {
  std::size_t rows = 0;
  double coverage = 0;
  double overlaps = 0;
  double conflicts = 0;
  double conflict_coverage_ratio = 0;  // rounded to 4 decimals; 0 when coverage is 0
  std::vector<LfStats> per_lf;

  bool operator==(const AnalysisReport&) const = default;
};

AnalysisReport analyze(const LabelMatrix& matrix);

// Mean over (document, schema tag) pairs of "some LF for that tag fired".
// Throws ConfigError for multi-class matrices.
double tag_density(const LabelMatrix& matrix);

nlohmann::json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& j);

// Aligned text table: name, coverage, overlaps, conflicts (percentages).
std::string render_report_table(const AnalysisReport& report);

}  // namespace dataprog
