#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "dataprog/http_api.hpp"
#include "dataprog/io.hpp"
#include "dataprog/project.hpp"
#include "httplib.h"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace dataprog;
using nlohmann::json;

namespace {

// A project on disk served on an ephemeral local port.
struct Served {
  testing::TempDir tmp;
  fs::path dir;
  std::unique_ptr<Project> project;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  Served() {
    dir = tmp.path() / "proj";
    Project::init(dir, "api", testing::shipped_lfs());
    testing::write_raw(testing::synthetic_articles(60, 5), tmp.path() / "raw.jsonl");
    Project(dir).ingest(tmp.path() / "raw.jsonl", 512, std::nullopt, 1);
    project = std::make_unique<Project>(dir);
    register_api(server, *project);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Served() {
    server.stop();
    thread.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(60, 0);
    return c;
  }
  std::string url(const std::string& path) const { return std::string(kApiPrefix) + path; }

  json get(const std::string& path, int want = 200) const {
    auto res = client().Get(url(path));
    REQUIRE(res);
    CHECK_MESSAGE(res->status == want, path << ": " << res->body);
    return json::parse(res->body);
  }
  json send(const std::string& method, const std::string& path, const json& body, int want = 200) const {
    auto c = client();
    auto res = method == "PUT" ? c.Put(url(path), body.dump(), "application/json")
                               : c.Post(url(path), body.dump(), "application/json");
    REQUIRE(res);
    CHECK_MESSAGE(res->status == want, method << " " << path << ": " << res->body);
    return json::parse(res->body);
  }
};

std::string first_in(const Served& s, const std::string& split) {
  const auto page = s.get("/documents?split=" + split + "&limit=1");
  REQUIRE(!page["items"].empty());
  return page["items"][0]["id"];
}

}  // namespace

TEST_CASE("project, documents and paging") {
  Served s;
  auto res = s.client().Get(s.url("/project"));
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("X-Project-Version") == std::to_string(s.project->version()));
  CHECK(json::parse(res->body)["id"] == "api");

  const auto all = s.get("/documents?limit=1000");
  CHECK(all["total"].get<std::size_t>() == s.project->documents().size());
  const auto page = s.get("/documents?offset=2&limit=3");
  REQUIRE(page["items"].size() == 3);
  CHECK(page["items"][0]["id"] == all["items"][2]["id"]);
  CHECK(s.get("/documents?limit=5000")["items"].size() == all["items"].size());
  s.get("/documents?limit=-1", 400);
  s.get("/documents?split=dev", 400);

  const std::string id = all["items"][0]["id"];
  CHECK(s.get("/documents/" + id)["document"]["id"] == id);
  s.get("/documents/missing_0", 404);
}

TEST_CASE("a bad regex is rejected with a positioned diagnostic") {
  Served s;
  const auto current = s.get("/manifests/sentiment-v1");
  json lfs = current["lfs"];
  lfs[0]["source"] = "lf \"broken\"\ntask sentiment\nlabel \"netral\"\nwhen regex_any(text, [\"[a-\"], cased)\n";
  const auto r = s.send("PUT", "/manifests/sentiment-v1", {{"base_version", current["version"]}, {"lfs", lfs}}, 422);
  REQUIRE(r["diagnostics"].size() >= 1);
  CHECK(r["diagnostics"][0]["code"] == "bad-regex");
  CHECK(r["diagnostics"][0]["line"] == 4);
  CHECK(r["diagnostics"][0]["source"] == lfs[0]["path"]);
  CHECK(r["version"] == current["version"]);
  CHECK(s.get("/manifests/sentiment-v1")["lfs"] == current["lfs"]);
}

TEST_CASE("concurrent edits from one base version: one wins, the rest conflict") {
  Served s;
  const auto current = s.get("/manifests/sentiment-v0");
  const long base = current["version"];
  std::atomic<int> ok{0}, conflict{0}, other{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&, t] {
      json lfs = current["lfs"];
      lfs.erase(lfs.begin() + t);
      auto res = s.client().Put(s.url("/manifests/sentiment-v0"),
                                json{{"base_version", base}, {"lfs", lfs}}.dump(), "application/json");
      if (res && res->status == 200) {
        ++ok;
      } else if (res && res->status == 409 && json::parse(res->body)["version"] == base + 1) {
        ++conflict;
      } else {
        ++other;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(ok == 1);
  CHECK(conflict == 5);
  CHECK(other == 0);
  CHECK(s.get("/manifests/sentiment-v0")["lfs"].size() == current["lfs"].size() - 1);
}

TEST_CASE("fit, predict, review, evaluate and export over HTTP") {
  Served s;
  const auto fit = s.send("POST", "/fit", {{"task", "sentiment"}, {"manifest", "v1"}, {"model", "mv"}});
  CHECK(fit["model"]["id"] == "sentiment-v1-mv");
  s.get("/predictions?model=sentiment-v1-mv", 404);
  CHECK(s.send("POST", "/predict", {{"model", "sentiment-v1-mv"}})["count"].get<std::size_t>() ==
        s.project->documents().size());
  CHECK(s.get("/models")["models"].size() == 1);

  const std::string test_doc = first_in(s, "test");
  const std::string train_doc = first_in(s, "train");
  s.send("POST", "/reviews", {{"doc_id", train_doc}, {"task", "sentiment"}, {"label", "netral"}, {"reviewer", "ana"}}, 403);
  s.send("POST", "/reviews", {{"doc_id", "nope_0"}, {"task", "sentiment"}, {"label", "netral"}, {"reviewer", "ana"}}, 404);
  s.send("POST", "/reviews", {{"doc_id", test_doc}, {"task", "sentiment"}, {"label", "gembira"}, {"reviewer", "ana"}}, 400);

  const auto preds = s.get("/predictions?model=sentiment-v1-mv&split=test&limit=1000");
  const std::string predicted = preds["items"][0]["label"];
  const auto rec = s.send("POST", "/reviews",
                          {{"doc_id", preds["items"][0]["id"]}, {"task", "sentiment"}, {"label", predicted}, {"reviewer", "ana"}});
  CHECK(rec["record"]["revised_from"] == predicted);
  const auto eval = s.get("/eval?model=sentiment-v1-mv&split=test");
  CHECK(eval["metrics"]["docs"] == 1);
  CHECK(eval["metrics"]["accuracy"] == 1.0);
  CHECK(s.get("/gold?task=sentiment")["items"].size() == 1);
  CHECK(s.get("/predictions?model=sentiment-v1-mv&split=test&limit=1000")["items"][0].contains("gold"));

  auto res = s.client().Get(s.url("/export?model=sentiment-v1-mv&split=test&labels=hard"));
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/x-ndjson");
  CHECK(res->body == read_file(s.dir / "exports" / "sentiment-v1-mv-test-hard.jsonl"));
  CHECK(res->body == s.project->export_dataset("sentiment-v1-mv", Split::kTest, ExportKind::kHard));

  const auto conflicted = s.get("/predictions?model=sentiment-v1-mv&conflicted=true&limit=1000");
  CHECK(conflicted["total"].get<std::size_t>() <= preds["total"].get<std::size_t>() * 10);
  s.send("POST", "/fit", {{"task", "sentiment"}, {"manifest", "v1"}, {"model", "cm"}, {"config", {{"epochs", 0}}}}, 400);
  s.send("POST", "/fit", "not an object", 400);
}

TEST_CASE("analysis over HTTP matches the command line") {
  Served s;
  for (const std::string task : {"sentiment", "tags"}) {
    const auto api = s.send("POST", "/analysis", {{"task", task}, {"manifest", task == "tags" ? "" : "v1"}});
    const fs::path out = s.tmp.path() / ("cli-" + task + ".json");
    const std::string cmd = std::string(DATAPROG_CLI) + " -p " + s.dir.string() + " analyze --task " + task +
                            (task == "tags" ? "" : " --manifest v1") + " --json > " + out.string();
    REQUIRE(std::system(cmd.c_str()) == 0);
    const auto cli = json::parse(read_file(out));
    json expected = api["report"];
    if (task == "tags") expected["tag_density"] = api["tag_density"];
    CHECK(cli == expected);
  }
}
