#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dataprog/lf_runtime.hpp"
#include "dataprog/pipeline.hpp"
#include "support.hpp"

using namespace dataprog;

namespace {

std::vector<Document> corpus() {
  std::vector<Document> out;
  for (const auto& a : testing::synthetic_articles(40, 13)) {
    for (auto& c : chunk_article(a, 300)) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TEST_CASE("sentiment LFs see the hardened stage-1 tags") {
  const auto docs = corpus();
  const auto tags = testing::shipped_specs("tags");
  const auto sent = testing::shipped_specs("sentiment-v1");
  for (auto model : {TagModelKind::kMajority, TagModelKind::kCovariance}) {
    Stage1Options opt;
    opt.model = model;
    const auto r = run_pipeline(docs, tags, sent, opt);
    CHECK(r.tags == apply_lfs(docs, tags, tags_schema()));
    CHECK(r.tag_soft == tag_vote(r.tags, model, opt.defaults));
    CHECK(r.tag_hard == harden(r.tag_soft, tags_schema(), opt.threshold));
    CHECK(r.augmented == attach_stage1_tags(docs, r.tag_hard, tags_schema()));
    CHECK(r.sentiment == apply_lfs(r.augmented, sent, sentiment_schema()));
    CHECK(r == run_pipeline(docs, tags, sent, opt));
  }
}

TEST_CASE("a higher stage-1 threshold attaches fewer tags") {
  const auto docs = corpus();
  const auto tags = testing::shipped_specs("tags");
  const auto sent = testing::shipped_specs("sentiment-v0");
  Stage1Options lo, hi;
  lo.threshold = 0.3;
  hi.threshold = 0.9;
  const auto a = run_pipeline(docs, tags, sent, lo), b = run_pipeline(docs, tags, sent, hi);
  std::size_t na = 0, nb = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    na += split_tags(*a.augmented[i].tags).size();
    nb += split_tags(*b.augmented[i].tags).size();
    for (const auto& t : split_tags(*b.augmented[i].tags)) {
      CHECK(a.augmented[i].tags->find(t) != std::string::npos);
    }
  }
  CHECK(nb < na);
}

TEST_CASE("failures name the stage") {
  const auto docs = corpus();
  auto tags = testing::shipped_specs("tags");
  const auto sent = testing::shipped_specs("sentiment-v1");
  Stage1Options opt;
  opt.threshold = 1.5;
  try {
    run_pipeline(docs, tags, sent, opt);
    FAIL("bad threshold accepted");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "stage1-model");
    CHECK(std::string(e.what()).rfind("stage1-model stage: ", 0) == 0);
  }

  auto bad = sent;
  bad[0].target_label = "senang";
  try {
    run_pipeline(docs, tags, bad, Stage1Options{});
    FAIL("bad sentiment LF accepted");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "sentiment");
  }
}

TEST_CASE("a single document through both stages") {
  Document d;
  d.id = "one_0";
  d.title = "Konflik Tambang Emas di Desa";
  d.text = "Warga desa menolak perusahaan tambang. Konflik lahan terus berlanjut.";
  d.split = Split::kTest;
  const std::vector<Document> docs{d};
  const auto r = run_pipeline(docs, testing::shipped_specs("tags"), testing::shipped_specs("sentiment-v1"),
                              Stage1Options{});
  const auto tags = split_tags(*r.augmented[0].tags);
  for (const char* want : {"masyarakat desa", "konflik", "lahan", "tambang"}) {
    CHECK_MESSAGE(std::find(tags.begin(), tags.end(), want) != tags.end(), want << " missing from " << *r.augmented[0].tags);
  }
  const auto& s = r.sentiment;
  bool negatif = false;
  for (std::size_t j = 0; j < s.cols(); ++j) negatif = negatif || s.at(0, j) == 0;
  CHECK(negatif);
}
