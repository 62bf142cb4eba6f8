#pragma once

// Single-threaded, unoptimised versions of the parallel kernels. Tests and
// benchmarks compare against these; nothing in the pipeline calls them.

#include <span>
#include <vector>

#include "dataprog/analysis.hpp"
#include "dataprog/corpus.hpp"
#include "dataprog/label_model.hpp"
#include "dataprog/lf_dsl.hpp"

namespace dataprog::serial {

// One LF at a time, one document at a time, fresh context per cell.
LabelMatrix apply_lfs(std::span<const Document> docs, std::span<const lf::LabelFunctionSpec> specs,
                      const TaskSchema& schema);

// Counts each statistic directly from its definition.
AnalysisReport analyze(const LabelMatrix& matrix);

std::vector<SoftLabelRecord> majority_vote(const LabelMatrix& matrix, const ClassPrior& prior);

// Product form p[y] · Π mu/p[y] without the log-space trick.
std::vector<SoftLabelRecord> predict_proba(const LabelModelParams& params, const LabelMatrix& matrix);

// Materialises Ψ and forms ΨᵀΨ / n entry by entry.
std::vector<double> second_moment(const LabelMatrix& matrix, std::span<const std::size_t> rows);

}  // namespace dataprog::serial
