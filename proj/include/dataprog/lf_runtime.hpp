#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dataprog/corpus.hpp"
#include "dataprog/label_matrix.hpp"
#include "dataprog/lf_dsl.hpp"

namespace dataprog {

// Per-document view the evaluator reads: the four addressable fields, their
// case-folded forms, and the split/trimmed tag list.
struct DocContext {
  std::array<std::string, 4> fields;  // indexed by lf::Field
  std::array<std::string, 4> folded;
  std::vector<std::string> tags;
};

// Field title_and_text is title + " | " + text.
DocContext make_context(const Document& doc);

// Splits a comma-joined tag string, trimming entries and dropping empties.
std::vector<std::string> split_tags(std::string_view raw);

// A validated LF with regexes compiled and keywords pre-folded. Immutable and
// safe to evaluate from several threads.
class CompiledLf {
 public:
  CompiledLf(const lf::LabelFunctionSpec& spec, const TaskSchema& schema);
  ~CompiledLf();
  CompiledLf(CompiledLf&&) noexcept;
  CompiledLf& operator=(CompiledLf&&) noexcept;

  const std::string& name() const { return name_; }
  int target() const { return target_; }
  bool evaluate(const DocContext& doc) const;

  struct Node;

 private:
  std::string name_;
  int target_ = 0;
  std::unique_ptr<Node> root_;
};

std::vector<CompiledLf> compile_all(std::span<const lf::LabelFunctionSpec> specs,
                                    const TaskSchema& schema);

// votes[i][j] = target of LF j if its body holds on doc i, else kAbstain.
// Rows are evaluated in parallel; output is identical for any thread count.
LabelMatrix apply_lfs(std::span<const Document> docs,
                      std::span<const lf::LabelFunctionSpec> specs, const TaskSchema& schema);

// Sets each document's tags to the comma-joined names of its predicted-true
// tags, in schema order. Throws InputError if a document has no prediction.
std::vector<Document> attach_stage1_tags(std::span<const Document> docs,
                                         std::span<const HardLabel> predictions,
                                         const TaskSchema& tags_schema);

}  // namespace dataprog
