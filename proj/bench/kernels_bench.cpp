// Parallel kernels against their serial references on synthetic data.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <numeric>

#include "dataprog/analysis.hpp"
#include "dataprog/label_model.hpp"
#include "dataprog/lf_runtime.hpp"
#include "dataprog/serial/reference.hpp"
#include "support.hpp"

namespace {

using namespace dataprog;

const std::vector<Document>& docs() {
  static const std::vector<Document> d = [] {
    std::vector<Document> out;
    for (const auto& a : testing::synthetic_articles(400, 7)) {
      for (auto& c : chunk_article(a)) out.push_back(std::move(c));
    }
    return out;
  }();
  return d;
}

const std::vector<lf::LabelFunctionSpec>& tag_specs() {
  static const auto s = testing::shipped_specs("tags");
  return s;
}

LabelMatrix votes(std::size_t n) {
  Rng rng(3);
  return testing::conditionally_independent(n, {0.9, 0.8, 0.75, 0.7, 0.65, 0.85, 0.6, 0.7}, 0.6, 3,
                                            rng)
      .matrix;
}

LabelModelParams fitted(const LabelMatrix& m) {
  TrainConfig cfg;
  cfg.epochs = 20;
  return fit_covariance_model(m, uniform_prior(3), cfg);
}

void BM_ApplyParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(apply_lfs(docs(), tag_specs(), tags_schema()));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(docs().size()));
}
void BM_ApplySerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::apply_lfs(docs(), tag_specs(), tags_schema()));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(docs().size()));
}

void BM_AnalyzeParallel(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(analyze(m));
}
void BM_AnalyzeSerial(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::analyze(m));
}

void BM_MajorityParallel(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(majority_vote(m, uniform_prior(3)));
}
void BM_MajoritySerial(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::majority_vote(m, uniform_prior(3)));
}

void BM_PredictParallel(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  const auto p = fitted(m);
  for (auto _ : st) benchmark::DoNotOptimize(predict_proba(p, m));
}
void BM_PredictSerial(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  const auto p = fitted(m);
  for (auto _ : st) benchmark::DoNotOptimize(serial::predict_proba(p, m));
}

void BM_MomentsFast(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  std::vector<std::size_t> rows(m.rows());
  std::iota(rows.begin(), rows.end(), 0);
  for (auto _ : st) benchmark::DoNotOptimize(cm::second_moment(m, rows));
}
void BM_MomentsSerial(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  std::vector<std::size_t> rows(m.rows());
  std::iota(rows.begin(), rows.end(), 0);
  for (auto _ : st) benchmark::DoNotOptimize(serial::second_moment(m, rows));
}

void BM_FitCovariance(benchmark::State& st) {
  const auto m = votes(static_cast<std::size_t>(st.range(0)));
  TrainConfig cfg;
  cfg.epochs = 100;
  cfg.batch_size = m.rows();
  for (auto _ : st) benchmark::DoNotOptimize(fit_covariance_model(m, uniform_prior(3), cfg));
}

}  // namespace

BENCHMARK(BM_ApplyParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnalyzeParallel)->Arg(5000)->Arg(50000);
BENCHMARK(BM_AnalyzeSerial)->Arg(5000)->Arg(50000);
BENCHMARK(BM_MajorityParallel)->Arg(5000)->Arg(50000);
BENCHMARK(BM_MajoritySerial)->Arg(5000)->Arg(50000);
BENCHMARK(BM_PredictParallel)->Arg(5000)->Arg(50000);
BENCHMARK(BM_PredictSerial)->Arg(5000)->Arg(50000);
BENCHMARK(BM_MomentsFast)->Arg(5000);
BENCHMARK(BM_MomentsSerial)->Arg(5000);
BENCHMARK(BM_FitCovariance)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
