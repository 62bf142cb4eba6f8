#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dataprog/error.hpp"
#include "dataprog/evaluation.hpp"
#include "support.hpp"

using namespace dataprog;

namespace {

const TaskSchema kAB{Task::kSentiment, {"A", "B"}, LabelMode::kMultiClass};

std::vector<HardLabel> classes(const std::vector<int>& cls) {
  std::vector<HardLabel> out;
  for (std::size_t i = 0; i < cls.size(); ++i) out.push_back({"d" + std::to_string(i), cls[i], {}});
  return out;
}

double pairwise_auc(const std::vector<double>& s, const std::vector<bool>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!y[i] || y[j]) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

struct TagFixture {
  std::vector<SoftLabelRecord> soft;
  std::vector<HardLabel> gold;
};

TagFixture random_tags(std::size_t n, Rng& rng, double noise) {
  TagFixture f;
  const std::size_t t = tags_schema().size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "d" + std::to_string(i);
    HardLabel g{id, kAbstain, std::vector<bool>(t)};
    SoftLabelRecord s{id, Task::kTags, std::vector<double>(t)};
    for (std::size_t k = 0; k < t; ++k) {
      g.present[k] = rng.uniform01() < 0.2;
      s.probs[k] = rng.uniform01() < noise ? rng.uniform01() : (g.present[k] ? 0.9 : 0.1);
    }
    f.soft.push_back(std::move(s));
    f.gold.push_back(std::move(g));
  }
  return f;
}

}  // namespace

TEST_CASE("multiclass worked example") {
  const auto r = evaluate_multiclass(classes({0, 0, 1, 1}), classes({0, 1, 1, 1}), kAB);
  CHECK(*r.accuracy == doctest::Approx(0.75));
  REQUIRE(r.per_label_f1.size() == 2);
  CHECK(r.per_label_f1[0].second == doctest::Approx(2.0 / 3));
  CHECK(r.per_label_f1[1].second == doctest::Approx(0.8));
  CHECK(*r.f1_macro == doctest::Approx(0.7333).epsilon(1e-4));
  CHECK(*r.f1_micro == doctest::Approx(0.75));
}

TEST_CASE("multiclass metrics match confusion counts") {
  Rng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<int> p(n), g(n);
    for (auto& v : p) v = static_cast<int>(rng.below(3));
    for (auto& v : g) v = static_cast<int>(rng.below(3));
    const auto r = evaluate_multiclass(classes(p), classes(g), sentiment_schema());
    double correct = 0, macro = 0;
    for (std::size_t i = 0; i < n; ++i) correct += p[i] == g[i];
    for (int c = 0; c < 3; ++c) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += p[i] == c && g[i] == c;
        fp += p[i] == c && g[i] != c;
        fn += p[i] != c && g[i] == c;
      }
      const double f = tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
      CHECK(r.per_label_f1[static_cast<std::size_t>(c)].second == doctest::Approx(f));
      macro += f / 3;
    }
    CHECK(*r.accuracy == doctest::Approx(correct / static_cast<double>(n)));
    CHECK(*r.f1_micro == doctest::Approx(correct / static_cast<double>(n)));
    CHECK(*r.f1_macro == doctest::Approx(macro));
  }
}

TEST_CASE("evaluation inputs are checked") {
  CHECK_THROWS_AS(evaluate_multiclass(classes({}), classes({}), kAB), InputError);
  auto g = classes({0, 1});
  g[1].doc_id = "zz";
  try {
    evaluate_multiclass(classes({0, 1}), g, kAB);
    FAIL("mismatched ids accepted");
  } catch (const InputError& e) {
    const std::string what = e.what();
    CHECK(what.find("d1") != std::string::npos);
    CHECK(what.find("zz") != std::string::npos);
  }
  auto dup = classes({0, 1});
  dup[1].doc_id = "d0";
  CHECK_THROWS_AS(evaluate_multiclass(dup, dup, kAB), InputError);

  Rng rng(1);
  auto f = random_tags(3, rng, 0);
  f.soft[0].probs[0] = 1.5;
  CHECK_THROWS_AS(evaluate_multilabel(f.soft, f.gold, tags_schema()), InputError);
}

TEST_CASE("roc_auc matches pairwise counting, ties scored one half") {
  const std::vector<double> two{0.9, 0.1};
  CHECK(*roc_auc(two, {true, false}) == 1.0);
  CHECK(*roc_auc(two, {false, true}) == 0.0);
  CHECK(*roc_auc(std::vector<double>{0.5, 0.5}, {true, false}) == 0.5);
  CHECK_FALSE(roc_auc(two, {true, true}).has_value());

  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<double> s(n);
    std::vector<bool> y(n);
    for (auto& v : s) v = static_cast<double>(rng.below(5)) / 4.0;
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.below(2) == 1;
    y[0] = true;
    y[1] = false;
    CHECK(*roc_auc(s, y) == doctest::Approx(pairwise_auc(s, y)));
  }
}

TEST_CASE("uninformative scores give chance AUC") {
  Rng rng(31);
  std::vector<double> s(20000);
  std::vector<bool> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform01();
    y[i] = rng.uniform01() < 0.3;
  }
  CHECK(*roc_auc(s, y) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("multi-label metrics") {
  Rng rng(4);
  SUBCASE("perfect predictions score 1") {
    auto f = random_tags(200, rng, 0.0);
    const auto r = evaluate_multilabel(f.soft, f.gold, tags_schema());
    CHECK(*r.accuracy == 1.0);
    CHECK(*r.f1_micro == 1.0);
    CHECK(*r.roc_auc == 1.0);
    CHECK(*r.roc_auc_macro == 1.0);
    CHECK(*r.precision_micro == 1.0);
    CHECK(*r.recall_micro == 1.0);
  }
  SUBCASE("swapping prediction and gold swaps precision and recall") {
    auto f = random_tags(200, rng, 0.5);
    const auto hard = [&](const std::vector<SoftLabelRecord>& soft) {
      std::vector<HardLabel> out;
      for (const auto& s : soft) {
        HardLabel h{s.doc_id, kAbstain, {}};
        for (double p : s.probs) h.present.push_back(p >= 0.5);
        out.push_back(std::move(h));
      }
      return out;
    };
    const auto as_soft = [&](const std::vector<HardLabel>& hl) {
      std::vector<SoftLabelRecord> out;
      for (const auto& h : hl) {
        SoftLabelRecord s{h.doc_id, Task::kTags, {}};
        for (bool b : h.present) s.probs.push_back(b ? 1.0 : 0.0);
        out.push_back(std::move(s));
      }
      return out;
    };
    const auto a = evaluate_multilabel(f.soft, f.gold, tags_schema());
    const auto b = evaluate_multilabel(as_soft(f.gold), hard(f.soft), tags_schema());
    CHECK(*a.precision_micro == doctest::Approx(*b.recall_micro));
    CHECK(*a.recall_micro == doctest::Approx(*b.precision_micro));
    CHECK(*a.f1_micro == doctest::Approx(*b.f1_micro));
  }
  SUBCASE("pooled AUC and exact-match accuracy") {
    auto f = random_tags(150, rng, 0.7);
    const auto r = evaluate_multilabel(f.soft, f.gold, tags_schema());
    std::vector<double> s;
    std::vector<bool> y;
    double exact = 0;
    for (std::size_t i = 0; i < f.soft.size(); ++i) {
      bool all = true;
      for (std::size_t t = 0; t < f.soft[i].probs.size(); ++t) {
        s.push_back(f.soft[i].probs[t]);
        y.push_back(f.gold[i].present[t]);
        all = all && (f.soft[i].probs[t] >= 0.5) == f.gold[i].present[t];
      }
      exact += all;
    }
    CHECK(*r.roc_auc == doctest::Approx(pairwise_auc(s, y)));
    CHECK(*r.accuracy == doctest::Approx(exact / 150.0));
  }
}

TEST_CASE("metrics JSON and table") {
  const auto r = evaluate_multiclass(classes({0, 0, 1, 1}), classes({0, 1, 1, 1}), kAB);
  const auto j = metrics_to_json(r);
  CHECK(j["accuracy"].get<double>() == doctest::Approx(0.75));
  CHECK(j["roc_auc_micro"].is_null());
  const auto table = render_metrics_table(r);
  CHECK(table.find("75.00") != std::string::npos);
  CHECK(table.find("73.33") != std::string::npos);
}
