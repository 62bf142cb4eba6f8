#pragma once

#include <span>
#include <string>
#include <vector>

#include "dataprog/corpus.hpp"
#include "dataprog/error.hpp"
#include "dataprog/label_model.hpp"
#include "dataprog/lf_dsl.hpp"

namespace dataprog {

// Carries the failing stage ("tags", "stage1-model", "attach-tags",
// "sentiment") in front of the underlying message.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : Error(stage + " stage: " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct Stage1Options {
  TagModelKind model = TagModelKind::kMajority;
  double threshold = 0.5;
  TagVoteDefaults defaults;
};

struct PipelineResult {
  LabelMatrix tags;
  std::vector<SoftLabelRecord> tag_soft;
  std::vector<HardLabel> tag_hard;
  std::vector<Document> augmented;  // input docs with stage-1 tags attached
  LabelMatrix sentiment;

  bool operator==(const PipelineResult&) const = default;
};

// Tags LFs over the raw documents, stage-1 tag model, hardening, tags
// attached to every document, then sentiment LFs over the augmented
// documents.
PipelineResult run_pipeline(std::span<const Document> docs,
                            std::span<const lf::LabelFunctionSpec> tag_specs,
                            std::span<const lf::LabelFunctionSpec> sentiment_specs,
                            const Stage1Options& options);

}  // namespace dataprog
