#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "dataprog/lf_runtime.hpp"
#include "support.hpp"

using namespace dataprog;
using nlohmann::json;

// Hand-derived cases: each shipped LF gets at least one document it must
// fire on and one it must stay silent on.
namespace {

std::vector<json> load_cases(const std::string& file) {
  std::ifstream in(testing::source_dir() / "tests" / "golden" / file);
  REQUIRE(in);
  std::vector<json> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

Document to_doc(const json& c) {
  Document d;
  d.id = "golden";
  d.title = c.at("title").get<std::string>();
  d.text = c.at("text").get<std::string>();
  if (c.contains("tags")) d.tags = c.at("tags").get<std::string>();
  return d;
}

void run_manifest(const std::string& manifest, const std::string& file) {
  const auto specs = testing::shipped_specs(manifest);
  const auto cases = load_cases(file);
  std::map<std::string, CompiledLf> compiled;
  for (const auto& spec : specs) compiled.emplace(spec.name, CompiledLf(spec, builtin_schema(spec.task)));

  std::map<std::string, std::pair<int, int>> seen;  // fires, silent
  for (const auto& c : cases) {
    const auto name = c.at("lf").get<std::string>();
    const auto it = compiled.find(name);
    REQUIRE_MESSAGE(it != compiled.end(), "case names unknown LF " << name);
    const bool expected = c.at("fires").get<bool>();
    CHECK_MESSAGE(it->second.evaluate(make_context(to_doc(c))) == expected, name << " on " << c.dump());
    auto& counts = seen[name];
    (expected ? counts.first : counts.second)++;
  }
  for (const auto& spec : specs) {
    CHECK_MESSAGE(seen[spec.name].first > 0, spec.name << " has no firing case");
    CHECK_MESSAGE(seen[spec.name].second > 0, spec.name << " has no silent case");
  }
}

}  // namespace

TEST_CASE("tag LFs match hand-derived cases") { run_manifest("tags", "tags.jsonl"); }
TEST_CASE("sentiment v0 LFs match hand-derived cases") { run_manifest("sentiment-v0", "sentiment-v0.jsonl"); }
TEST_CASE("sentiment v1 LFs match hand-derived cases") { run_manifest("sentiment-v1", "sentiment-v1.jsonl"); }

TEST_CASE("frozen vote row for one document") {
  std::ifstream in(testing::source_dir() / "tests" / "golden" / "tags-vote-row.json");
  REQUIRE(in);
  const json row = json::parse(in);
  Document d;
  d.title = row.at("title").get<std::string>();
  d.text = row.at("text").get<std::string>();
  const auto ctx = make_context(d);
  std::vector<std::string> fired;
  for (const auto& spec : testing::shipped_specs("tags")) {
    if (CompiledLf(spec, tags_schema()).evaluate(ctx)) fired.push_back(spec.name);
  }
  std::sort(fired.begin(), fired.end());
  CHECK(fired == row.at("fires").get<std::vector<std::string>>());
}
