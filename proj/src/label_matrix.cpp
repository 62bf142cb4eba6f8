#include "dataprog/label_matrix.hpp"

#include "dataprog/error.hpp"
#include "dataprog/io.hpp"

namespace dataprog {

void check_matrix(const LabelMatrix& matrix) {
  const std::size_t n = matrix.rows(), m = matrix.cols();
  if (matrix.lf_targets.size() != m) throw InputError("label matrix: lf_targets size mismatch");
  if (matrix.votes.size() != n * m) throw InputError("label matrix: vote grid size mismatch");
  const int k = static_cast<int>(matrix.schema.size());
  for (std::size_t j = 0; j < m; ++j) {
    if (matrix.lf_targets[j] < 0 || matrix.lf_targets[j] >= k) {
      throw InputError("label matrix: LF \"" + matrix.lf_names[j] + "\" has invalid target");
    }
  }
  const bool single_polarity = matrix.schema.mode == LabelMode::kMultiLabel;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      int v = matrix.at(i, j);
      if (v < kAbstain || v >= k) {
        throw InputError("label matrix: vote " + std::to_string(v) + " out of range at row " +
                         std::to_string(i));
      }
      if (single_polarity && v != kAbstain && v != matrix.lf_targets[j]) {
        throw InputError("label matrix: LF \"" + matrix.lf_names[j] +
                         "\" voted a label other than its target");
      }
    }
  }
}

LabelMatrix select_columns(const LabelMatrix& matrix, std::span<const std::size_t> columns) {
  LabelMatrix out;
  out.doc_ids = matrix.doc_ids;
  out.schema = matrix.schema;
  for (std::size_t j : columns) {
    out.lf_names.push_back(matrix.lf_names.at(j));
    out.lf_targets.push_back(matrix.lf_targets.at(j));
  }
  out.votes.reserve(matrix.rows() * columns.size());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (std::size_t j : columns) out.votes.push_back(matrix.at(i, j));
  }
  return out;
}

std::string matrix_to_tsv(const LabelMatrix& matrix) {
  std::string out = "doc_id";
  for (const auto& name : matrix.lf_names) {
    out.push_back('\t');
    out += name;
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out += matrix.doc_ids[i];
    for (int v : matrix.row(i)) {
      out.push_back('\t');
      out += std::to_string(v);
    }
    out.push_back('\n');
  }
  return out;
}

std::string matrix_fingerprint(const LabelMatrix& matrix) {
  std::string payload = std::string(to_string(matrix.schema.task)) + "\n";
  for (const auto& label : matrix.schema.labels) payload += label + "\t";
  payload += "\n";
  for (int t : matrix.lf_targets) payload += std::to_string(t) + "\t";
  payload += "\n";
  payload += matrix_to_tsv(matrix);
  return fnv1a_hex(payload);
}

}  // namespace dataprog
