#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dataprog/lf_dsl.hpp"
#include "support.hpp"

using namespace dataprog;
using namespace dataprog::lf;

namespace {

const std::vector<TaskSchema> kSchemas{tags_schema(), sentiment_schema()};

LabelFunctionSpec parse(std::string_view src) { return parse_lf_spec(src, kSchemas, "t.lf"); }

Diagnostic diagnose(std::string_view src) {
  try {
    parse(src);
  } catch (const ParseError& e) {
    return e.diagnostic();
  }
  FAIL("source parsed: " << src);
  return {};
}

std::string random_word(Rng& rng) {
  static const std::vector<std::string> pool = {"desa", "Konflik", "a\"b", "back\\slash", "ñandú", "Ä",
                                                "x y", "\\bPT ", "tab\there", "ASN", "r\"x"};
  return pool[rng.below(pool.size())];
}

std::vector<std::string> words(Rng& rng) {
  std::vector<std::string> out(1 + rng.below(3));
  for (auto& w : out) w = random_word(rng);
  return out;
}

std::vector<std::string> tags(Rng& rng) {
  std::vector<std::string> out(1 + rng.below(3));
  for (auto& t : out) t = tags_schema().labels[rng.below(tags_schema().size())];
  return out;
}

Expr random_expr(Rng& rng, int depth) {
  const auto field = static_cast<Field>(rng.below(4));
  const auto casing = rng.below(2) ? Casing::kCased : Casing::kUncased;
  const auto pick = rng.below(depth > 0 ? 11 : 8);
  switch (pick) {
    case 0: return keyword_any(field, words(rng), casing);
    case 1: return regex_any(field, {"k[a-z]+", "\\bPT\\b", "M.Sc"}, casing);
    case 2: return count_gt(field, words(rng), rng.below(5), casing);
    case 3: return first_word_is(field, "Masyarakat");
    case 4: return tag_in(tags(rng));
    case 5: return tags_all(tags(rng));
    case 6: return tag_count_cmp(tags(rng), tags(rng), static_cast<CountCmp>(rng.below(3)));
    case 7: return tag_count_is(static_cast<CountBound>(rng.below(3)), rng.below(4));
    case 8: return negate(random_expr(rng, depth - 1));
    default: {
      std::vector<Expr> kids;
      for (std::size_t i = 0, n = 1 + rng.below(3); i < n; ++i) kids.push_back(random_expr(rng, depth - 1));
      return pick == 9 ? all_of(std::move(kids)) : any_of(std::move(kids));
    }
  }
}

}  // namespace

TEST_CASE("a minimal LF parses") {
  const auto spec = parse(R"(
# comment line
lf "desa-keywords"   # trailing comment
task tags
label "masyarakat desa"
when keyword_any(title_and_text, ["desa", "kampung"], uncased)
)");
  CHECK(spec.name == "desa-keywords");
  CHECK(spec.task == Task::kTags);
  CHECK(spec.target_label == "masyarakat desa");
  CHECK(spec.body == keyword_any(Field::kTitleAndText, {"desa", "kampung"}, Casing::kUncased));
}

TEST_CASE("raw strings keep backslashes") {
  const auto spec = parse(R"(lf "p" task tags label "perusahaan" when regex_any(text, [r"\bPT ", "\\d+"], cased))");
  CHECK(spec.body == regex_any(Field::kText, {"\\bPT ", "\\d+"}, Casing::kCased));
}

TEST_CASE("lists and child lists accept a trailing comma") {
  const auto spec = parse(R"(lf "x" task tags label "konflik" when any_of(tag_in(["konflik",]),))");
  CHECK(spec.body == any_of({tag_in({"konflik"})}));
}

TEST_CASE("print then parse is the identity on random LFs") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const bool sentiment = rng.below(2) == 0;
    LabelFunctionSpec spec{"lf-" + std::to_string(i), sentiment ? Task::kSentiment : Task::kTags,
                           sentiment ? "netral" : "konflik", random_expr(rng, 3)};
    const std::string printed = print_lf_spec(spec);
    const auto back = parse_lf_spec(printed, kSchemas);
    CHECK_MESSAGE(back == spec, printed);
    CHECK(print_lf_spec(back) == printed);
  }
}

TEST_CASE("every shipped LF survives a print/parse round trip") {
  std::size_t total = 0;
  for (const char* m : {"tags", "sentiment-v0", "sentiment-v1"}) {
    for (const auto& spec : testing::shipped_specs(m)) {
      CHECK(parse_lf_spec(print_lf_spec(spec), kSchemas) == spec);
      ++total;
    }
  }
  CHECK(total == 63);
}

TEST_CASE("unknown field is reported at its position") {
  const auto d = diagnose("lf \"x\"\ntask tags\nlabel \"konflik\"\nwhen keyword_any(headline, [\"a\"], cased)\n");
  CHECK(d.code == "unknown-field");
  CHECK(d.line == 4);
  CHECK(d.column == 18);
  CHECK(d.source == "t.lf");
  CHECK(d.message.find("headline") != std::string::npos);
}

TEST_CASE("parse diagnostics carry stable codes") {
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when regex_any(text, ["(unclosed"], cased))").code == "bad-regex");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when regex_any(text, [r"(a)\1"], cased))").code == "bad-regex");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when regex_any(text, ["\q"], cased))").code == "syntax");
  CHECK(diagnose(R"(lf "x" task tags label "nope" when tag_in(["konflik"]))").code == "unknown-label");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when tag_in(["nope"]))").code == "unknown-tag");
  CHECK(diagnose(R"(lf "x" task mood label "konflik" when tag_in(["konflik"]))").code == "unknown-task");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when keyword_any(text, [], cased))").code == "empty-list");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when any_of())").code == "empty-list");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when fuzzy(text))").code == "unknown-primitive");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when keyword_any(text, [,], cased))").code == "syntax");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when keyword_any(text, ["a"], loud))").code == "syntax");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when tag_count_is(eq, 99999999999999999999999))").code == "syntax");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when tag_in(["konflik"]) extra)").code == "syntax");
  CHECK(diagnose(R"(lf "x" task tags label "konflik" when keyword_any(text, ["a], cased))").code == "syntax");
}

TEST_CASE("project validation finds duplicates, staging errors and uncovered labels") {
  const auto a = parse(R"(lf "same" task sentiment label "netral" when tag_in(["konflik"]))");
  const auto b = parse(R"(lf "same" task sentiment label "positif" when keyword_any(text, ["baik"], uncased))");
  std::vector<LabelFunctionSpec> specs{a, b};

  auto report = validate_project(specs, kSchemas, true);
  REQUIRE(report.error_count() == 1);
  CHECK(report.diagnostics[0].code == "duplicate-name");
  REQUIRE(report.warning_count() == 1);
  CHECK(report.diagnostics[1].code == "uncovered-label");
  CHECK(report.diagnostics[1].message.find("negatif") != std::string::npos);

  specs[1].name = "other";
  report = validate_project(specs, kSchemas, false);
  CHECK(report.error_count() == 1);
  CHECK(report.diagnostics[0].code == "staging");
  CHECK(validate_project(specs, kSchemas, true).ok());
}

TEST_CASE("uses_tags looks through combinators") {
  CHECK(uses_tags(negate(any_of({keyword_any(Field::kText, {"a"}, Casing::kCased), tag_count_is(CountBound::kLe, 0)}))));
  CHECK(uses_tags(keyword_any(Field::kTagsRaw, {"konflik"}, Casing::kCased)));
  CHECK_FALSE(uses_tags(all_of({first_word_is(Field::kTitle, "Warga")})));
}

TEST_CASE("format_diagnostic names file, line and column") {
  const Diagnostic d{Severity::kError, "bad-regex", "oops", 3, 7, "a.lf"};
  const auto s = format_diagnostic(d);
  CHECK(s.find("a.lf:3:7") != std::string::npos);
  CHECK(s.find("bad-regex") != std::string::npos);
}
