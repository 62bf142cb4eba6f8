#include "dataprog/pipeline.hpp"

#include "dataprog/lf_runtime.hpp"

namespace dataprog {

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(std::span<const Document> docs,
                            std::span<const lf::LabelFunctionSpec> tag_specs,
                            std::span<const lf::LabelFunctionSpec> sentiment_specs,
                            const Stage1Options& options) {
  PipelineResult r;
  r.tags = stage("tags", [&] { return apply_lfs(docs, tag_specs, tags_schema()); });
  r.tag_soft = stage("stage1-model", [&] { return tag_vote(r.tags, options.model, options.defaults); });
  r.tag_hard = stage("stage1-model", [&] { return harden(r.tag_soft, tags_schema(), options.threshold); });
  r.augmented = stage("attach-tags", [&] { return attach_stage1_tags(docs, r.tag_hard, tags_schema()); });
  r.sentiment = stage("sentiment", [&] { return apply_lfs(r.augmented, sentiment_specs, sentiment_schema()); });
  return r;
}

}  // namespace dataprog
