#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <thread>

#include "dataprog/error.hpp"
#include "dataprog/gold.hpp"
#include "dataprog/io.hpp"
#include "support.hpp"

using namespace dataprog;

namespace {

Document doc(const std::string& id, Split split) {
  Document d;
  d.id = id;
  d.title = "t";
  d.text = "x";
  d.split = split;
  return d;
}

HardLabel cls(const std::string& id, int c) { return {id, c, {}}; }

}  // namespace

TEST_CASE("reviews upsert and keep the first model label") {
  testing::TempDir tmp;
  GoldStore store(tmp.path());
  const auto v = doc("v1", Split::kValidation);
  auto r = store.record_review(v, Task::kSentiment, cls("v1", 1), "ana", cls("v1", 0));
  CHECK(r.revised_from->cls == 0);
  r = store.record_review(v, Task::kSentiment, cls("v1", 2), "budi", cls("v1", 1));
  CHECK(r.label.cls == 2);
  CHECK(r.reviewer == "budi");
  CHECK(r.revised_from->cls == 0);
  CHECK(store.records(Task::kSentiment).size() == 1);
  CHECK(store.audit_entries() == 2);
  CHECK_FALSE(store.find("v1", Task::kTags));

  GoldStore reopened(tmp.path());
  CHECK(reopened.find("v1", Task::kSentiment) == r);
  CHECK(reopened.audit_entries() == 2);
  const auto audit = read_file(tmp.path() / "audit.jsonl");
  CHECK(audit.find("\"time\":\"") != std::string::npos);
  CHECK(audit.find("\"ana\"") != std::string::npos);
}

TEST_CASE("train documents and empty reviewers are refused") {
  testing::TempDir tmp;
  GoldStore store(tmp.path());
  CHECK_THROWS_AS(store.record_review(doc("t", Split::kTrain), Task::kSentiment, cls("t", 0), "ana", std::nullopt),
                  PolicyError);
  CHECK_THROWS_AS(store.record_review(doc("v", Split::kTest), Task::kSentiment, cls("v", 0), "", std::nullopt),
                  InputError);
  CHECK(store.audit_entries() == 0);
}

TEST_CASE("label JSON encodings") {
  CHECK(label_to_json(cls("a", 2), sentiment_schema()) == "positif");
  CHECK(label_from_json("netral", "a", sentiment_schema()).cls == 1);
  CHECK_THROWS_AS(label_from_json("senang", "a", sentiment_schema()), InputError);

  nlohmann::json tags = {{"konflik", true}, {"desa", true}};
  CHECK_THROWS_AS(label_from_json(tags, "a", tags_schema()), InputError);
  tags = {{"konflik", true}, {"tambang", false}};
  const auto h = label_from_json(tags, "a", tags_schema());
  CHECK(h.present[*tags_schema().index_of("konflik")]);
  CHECK(std::count(h.present.begin(), h.present.end(), true) == 1);
  const auto back = label_to_json(h, tags_schema());
  CHECK(back.size() == tags_schema().size());
  CHECK(label_from_json(back, "a", tags_schema()) == h);
}

TEST_CASE("records are sorted and concurrent reviews all land") {
  testing::TempDir tmp;
  GoldStore store(tmp.path());
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        const std::string id = "d" + std::to_string(t * 25 + i);
        store.record_review(doc(id, Split::kTest), Task::kSentiment, cls(id, i % 3), "r" + std::to_string(t),
                            std::nullopt);
      }
    });
  }
  for (auto& th : threads) th.join();
  const auto recs = store.records(Task::kSentiment);
  REQUIRE(recs.size() == 100);
  CHECK(std::is_sorted(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; }));
  CHECK(store.audit_entries() == 100);
  CHECK(GoldStore(tmp.path()).records(Task::kSentiment) == recs);
}
