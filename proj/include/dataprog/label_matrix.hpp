#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dataprog/schema.hpp"

namespace dataprog {

inline constexpr int kAbstain = -1;

// n documents × m labeling functions; votes are class indices or kAbstain,
// stored row-major. lf_targets[j] is the class LF j votes when it fires.
struct LabelMatrix {
  std::vector<std::string> doc_ids;
  std::vector<std::string> lf_names;
  std::vector<int> lf_targets;
  std::vector<int> votes;
  TaskSchema schema;

  std::size_t rows() const { return doc_ids.size(); }
  std::size_t cols() const { return lf_names.size(); }
  int at(std::size_t i, std::size_t j) const { return votes[i * cols() + j]; }
  int& at(std::size_t i, std::size_t j) { return votes[i * cols() + j]; }
  std::span<const int> row(std::size_t i) const {
    return std::span<const int>(votes).subspan(i * cols(), cols());
  }

  bool operator==(const LabelMatrix&) const = default;
};

// Throws InputError when dimensions disagree, a vote is out of range, or
// (multi-label) a non-abstain vote differs from its column's target.
void check_matrix(const LabelMatrix& matrix);

// Columns [j...] as a new matrix with the same rows.
LabelMatrix select_columns(const LabelMatrix& matrix, std::span<const std::size_t> columns);

// Tab-separated: header "doc_id" + LF names, then one row per document with
// class index or -1 per cell. LF on "\n", no trailing spaces.
std::string matrix_to_tsv(const LabelMatrix& matrix);

// Content hash of the TSV rendering plus the schema and LF targets.
std::string matrix_fingerprint(const LabelMatrix& matrix);

// Probability vector for one document: k class probabilities (multi-class)
// or one presence probability per tag (multi-label).
struct SoftLabelRecord {
  std::string doc_id;
  Task task = Task::kSentiment;
  std::vector<double> probs;

  bool operator==(const SoftLabelRecord&) const = default;
};

struct HardLabel {
  std::string doc_id;
  int cls = kAbstain;          // multi-class
  std::vector<bool> present;   // multi-label, schema order

  bool operator==(const HardLabel&) const = default;
};

}  // namespace dataprog
