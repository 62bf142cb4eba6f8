#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dataprog/error.hpp"
#include "dataprog/schema.hpp"

namespace dataprog::lf {

enum class Field { kTitle, kText, kTitleAndText, kTagsRaw };
enum class Casing { kCased, kUncased };
enum class CountCmp { kLt, kEq, kGt };
enum class CountBound { kLe, kEq, kGe };

std::string_view to_string(Field field);
std::string_view to_string(Casing casing);
std::string_view to_string(CountCmp op);
std::string_view to_string(CountBound op);

struct Expr;

struct AllOf {
  std::vector<Expr> children;
  bool operator==(const AllOf& other) const;
};
struct AnyOf {
  std::vector<Expr> children;
  bool operator==(const AnyOf& other) const;
};
struct Not {
  std::shared_ptr<const Expr> child;
  bool operator==(const Not& other) const;
};
// Substring match of any keyword; uncased folds both sides.
struct KeywordAny {
  Field field;
  std::vector<std::string> keywords;
  Casing casing;
  bool operator==(const KeywordAny&) const = default;
};
struct RegexAny {
  Field field;
  std::vector<std::string> patterns;
  Casing casing;
  bool operator==(const RegexAny&) const = default;
};
// Total non-overlapping occurrences over all keywords > threshold.
struct CountGt {
  Field field;
  std::vector<std::string> keywords;
  std::uint64_t threshold;
  Casing casing;
  bool operator==(const CountGt&) const = default;
};
struct FirstWordIs {
  Field field;
  std::string word;
  bool operator==(const FirstWordIs&) const = default;
};
struct TagIn {
  std::vector<std::string> tags;
  bool operator==(const TagIn&) const = default;
};
struct TagsAll {
  std::vector<std::string> tags;
  bool operator==(const TagsAll&) const = default;
};
// |tags ∩ group_a| op |tags ∩ group_b|
struct TagCountCmp {
  std::vector<std::string> group_a;
  std::vector<std::string> group_b;
  CountCmp op;
  bool operator==(const TagCountCmp&) const = default;
};
// |tags| op k
struct TagCountIs {
  CountBound op;
  std::uint64_t k;
  bool operator==(const TagCountIs&) const = default;
};

struct Expr {
  using Node = std::variant<AllOf, AnyOf, Not, KeywordAny, RegexAny, CountGt, FirstWordIs, TagIn,
                            TagsAll, TagCountCmp, TagCountIs>;
  Node node;

  bool operator==(const Expr& other) const { return node == other.node; }
};

Expr all_of(std::vector<Expr> children);
Expr any_of(std::vector<Expr> children);
Expr negate(Expr child);
Expr keyword_any(Field field, std::vector<std::string> keywords, Casing casing);
Expr regex_any(Field field, std::vector<std::string> patterns, Casing casing);
Expr count_gt(Field field, std::vector<std::string> keywords, std::uint64_t threshold,
              Casing casing);
Expr first_word_is(Field field, std::string word);
Expr tag_in(std::vector<std::string> tags);
Expr tags_all(std::vector<std::string> tags);
Expr tag_count_cmp(std::vector<std::string> group_a, std::vector<std::string> group_b,
                   CountCmp op);
Expr tag_count_is(CountBound op, std::uint64_t k);

// True if any node in the tree reads the attached tags.
bool uses_tags(const Expr& expr);

struct LabelFunctionSpec {
  std::string name;
  Task task = Task::kTags;
  std::string target_label;
  Expr body;

  bool operator==(const LabelFunctionSpec&) const = default;
};

enum class Severity { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string code;  // syntax, unknown-field, unknown-label, bad-regex, ...
  std::string message;
  int line = 0;      // 1-based; 0 when not tied to a source position
  int column = 0;    // 1-based, in code points
  std::string source;  // file name or LF name

  bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostic(const Diagnostic& d);

class ParseError : public InputError {
 public:
  explicit ParseError(Diagnostic diagnostic);
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

// Parses and validates one LF document. `schemas` supplies the label sets the
// target label (and, for tags, tag names in tag primitives) are checked against.
LabelFunctionSpec parse_lf_spec(std::string_view source, std::span<const TaskSchema> schemas,
                                const std::string& source_name = "<input>");

std::string print_expr(const Expr& expr);
std::string print_lf_spec(const LabelFunctionSpec& spec);

// Returns an error message if `pattern` is outside the supported dialect or
// fails to compile, otherwise empty.
std::string check_regex(const std::string& pattern, Casing casing);

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
  std::size_t error_count() const;
  std::size_t warning_count() const;
};

// Cross-LF checks: duplicate names (error), schema labels with no LF
// (warning), tag primitives in sentiment LFs without a tags stage (error).
ValidationReport validate_project(std::span<const LabelFunctionSpec> specs,
                                  std::span<const TaskSchema> schemas, bool has_tags_stage);

}  // namespace dataprog::lf
