#include "dataprog/lf_dsl.hpp"

#include <charconv>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dataprog::lf {

bool AllOf::operator==(const AllOf& other) const { return children == other.children; }
bool AnyOf::operator==(const AnyOf& other) const { return children == other.children; }
bool Not::operator==(const Not& other) const {
  if (!child || !other.child) return child == other.child;
  return *child == *other.child;
}

std::string_view to_string(Field field) {
  switch (field) {
    case Field::kTitle: return "title";
    case Field::kText: return "text";
    case Field::kTitleAndText: return "title_and_text";
    case Field::kTagsRaw: return "tags_raw";
  }
  return "text";
}

std::string_view to_string(Casing casing) {
  return casing == Casing::kCased ? "cased" : "uncased";
}

std::string_view to_string(CountCmp op) {
  switch (op) {
    case CountCmp::kLt: return "lt";
    case CountCmp::kEq: return "eq";
    case CountCmp::kGt: return "gt";
  }
  return "eq";
}

std::string_view to_string(CountBound op) {
  switch (op) {
    case CountBound::kLe: return "le";
    case CountBound::kEq: return "eq";
    case CountBound::kGe: return "ge";
  }
  return "eq";
}

Expr all_of(std::vector<Expr> children) { return Expr{AllOf{std::move(children)}}; }
Expr any_of(std::vector<Expr> children) { return Expr{AnyOf{std::move(children)}}; }
Expr negate(Expr child) { return Expr{Not{std::make_shared<const Expr>(std::move(child))}}; }
Expr keyword_any(Field field, std::vector<std::string> keywords, Casing casing) {
  return Expr{KeywordAny{field, std::move(keywords), casing}};
}
Expr regex_any(Field field, std::vector<std::string> patterns, Casing casing) {
  return Expr{RegexAny{field, std::move(patterns), casing}};
}
Expr count_gt(Field field, std::vector<std::string> keywords, std::uint64_t threshold,
              Casing casing) {
  return Expr{CountGt{field, std::move(keywords), threshold, casing}};
}
Expr first_word_is(Field field, std::string word) { return Expr{FirstWordIs{field, std::move(word)}}; }
Expr tag_in(std::vector<std::string> tags) { return Expr{TagIn{std::move(tags)}}; }
Expr tags_all(std::vector<std::string> tags) { return Expr{TagsAll{std::move(tags)}}; }
Expr tag_count_cmp(std::vector<std::string> group_a, std::vector<std::string> group_b,
                   CountCmp op) {
  return Expr{TagCountCmp{std::move(group_a), std::move(group_b), op}};
}
Expr tag_count_is(CountBound op, std::uint64_t k) { return Expr{TagCountIs{op, k}}; }

bool uses_tags(const Expr& expr) {
  return std::visit(
      [](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, AllOf> || std::is_same_v<T, AnyOf>) {
          for (const auto& c : node.children) {
            if (uses_tags(c)) return true;
          }
          return false;
        } else if constexpr (std::is_same_v<T, Not>) {
          return uses_tags(*node.child);
        } else if constexpr (std::is_same_v<T, KeywordAny> || std::is_same_v<T, RegexAny> ||
                             std::is_same_v<T, CountGt> || std::is_same_v<T, FirstWordIs>) {
          return node.field == Field::kTagsRaw;
        } else {
          return true;
        }
      },
      expr.node);
}

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream out;
  if (!d.source.empty()) out << d.source << ":";
  if (d.line > 0) out << d.line << ":" << d.column << ":";
  out << (d.severity == Severity::kError ? " error" : " warning");
  out << " [" << d.code << "] " << d.message;
  return out.str();
}

ParseError::ParseError(Diagnostic diagnostic)
    : InputError(format_diagnostic(diagnostic)), diagnostic_(std::move(diagnostic)) {}

std::string check_regex(const std::string& pattern, Casing casing) {
  if (pattern.empty()) return "empty pattern";
  for (std::size_t i = 0; i + 1 < pattern.size(); ++i) {
    if (pattern[i] == '\\') {
      char next = pattern[i + 1];
      if (next >= '1' && next <= '9') return "backreferences are not supported";
      ++i;
    }
  }
  try {
    auto flags = std::regex::ECMAScript;
    if (casing == Casing::kUncased) flags |= std::regex::icase;
    std::regex compiled(pattern, flags);
  } catch (const std::regex_error& e) {
    return std::string("pattern does not compile: ") + e.what();
  }
  return {};
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { kIdent, kString, kInt, kLParen, kRParen, kLBracket, kRBracket, kComma, kEnd };

struct Token {
  Tok kind;
  std::string text;  // identifier name, decoded string, or digits
  int line;
  int column;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string source_name)
      : src_(src), source_(std::move(source_name)) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    for (;;) {
      skip_space_and_comments();
      int line = line_, col = col_;
      if (pos_ >= src_.size()) {
        tokens.push_back({Tok::kEnd, "", line, col});
        return tokens;
      }
      char c = src_[pos_];
      switch (c) {
        case '(': advance(); tokens.push_back({Tok::kLParen, "(", line, col}); continue;
        case ')': advance(); tokens.push_back({Tok::kRParen, ")", line, col}); continue;
        case '[': advance(); tokens.push_back({Tok::kLBracket, "[", line, col}); continue;
        case ']': advance(); tokens.push_back({Tok::kRBracket, "]", line, col}); continue;
        case ',': advance(); tokens.push_back({Tok::kComma, ",", line, col}); continue;
        case '"': tokens.push_back({Tok::kString, read_string(line, col), line, col}); continue;
        default: break;
      }
      if (c == 'r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '"') {
        advance();
        tokens.push_back({Tok::kString, read_raw_string(line, col), line, col});
        continue;
      }
      if (is_ident_start(c)) {
        std::string ident;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ident.push_back(advance());
        tokens.push_back({Tok::kIdent, std::move(ident), line, col});
        continue;
      }
      if (c >= '0' && c <= '9') {
        std::string digits;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') digits.push_back(advance());
        tokens.push_back({Tok::kInt, std::move(digits), line, col});
        continue;
      }
      fail(line, col, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string read_string(int line, int col) {
    advance();  // opening quote
    std::string out;
    while (pos_ < src_.size()) {
      char c = advance();
      if (c == '"') return out;
      if (c == '\n') fail(line, col, "unterminated string");
      if (c == '\\') {
        if (pos_ >= src_.size()) break;
        int eline = line_, ecol = col_ - 1;
        char e = advance();
        switch (e) {
          case '\\': out.push_back('\\'); break;
          case '"': out.push_back('"'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default: fail(eline, ecol, std::string("unknown escape '\\") + e + "' (use r\"...\" for regex)");
        }
        continue;
      }
      out.push_back(c);
    }
    fail(line, col, "unterminated string");
  }

  std::string read_raw_string(int line, int col) {
    advance();  // opening quote
    std::string out;
    while (pos_ < src_.size()) {
      char c = advance();
      if (c == '"') return out;
      if (c == '\n') break;
      out.push_back(c);
    }
    fail(line, col, "unterminated raw string");
  }

  [[noreturn]] void fail(int line, int col, std::string message) {
    throw ParseError({Severity::kError, "syntax", std::move(message), line, col, source_});
  }

  std::string_view src_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::span<const TaskSchema> schemas, std::string source)
      : tokens_(std::move(tokens)), schemas_(schemas), source_(std::move(source)) {}

  LabelFunctionSpec parse_file() {
    LabelFunctionSpec spec;
    expect_keyword("lf");
    const Token& name = expect(Tok::kString, "LF name string");
    if (name.text.empty()) fail(name, "syntax", "LF name is empty");
    if (name.text.find_first_of("\t\r\n") != std::string::npos) {
      fail(name, "syntax", "LF name contains a tab or line break");
    }
    spec.name = name.text;

    expect_keyword("task");
    const Token& task = expect(Tok::kIdent, "task name");
    if (task.text != "tags" && task.text != "sentiment") {
      fail(task, "unknown-task", "unknown task \"" + task.text + "\"");
    }
    spec.task = parse_task(task.text);
    const TaskSchema* schema = find_schema(spec.task);
    if (schema == nullptr) {
      fail(task, "unknown-task", "no schema configured for task \"" + task.text + "\"");
    }

    expect_keyword("label");
    const Token& label = expect(Tok::kString, "target label string");
    if (!schema->index_of(label.text)) {
      fail(label, "unknown-label",
           "label \"" + label.text + "\" not in schema for task \"" + task.text + "\"");
    }
    spec.target_label = label.text;

    expect_keyword("when");
    spec.body = parse_expr();
    if (peek().kind != Tok::kEnd) fail(peek(), "syntax", "unexpected input after expression");
    return spec;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (t.kind != Tok::kEnd) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& at, std::string code, std::string message) {
    throw ParseError({Severity::kError, std::move(code), std::move(message), at.line, at.column, source_});
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::kEnd: return "end of input";
      case Tok::kString: return "string";
      case Tok::kInt: return "integer " + t.text;
      default: return "'" + t.text + "'";
    }
  }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) fail(t, "syntax", std::string("expected ") + what + ", found " + describe(t));
    return next();
  }

  void expect_keyword(const char* keyword) {
    const Token& t = peek();
    if (t.kind != Tok::kIdent || t.text != keyword) {
      fail(t, "syntax", std::string("expected '") + keyword + "', found " + describe(t));
    }
    next();
  }

  const TaskSchema* find_schema(Task task) const {
    for (const auto& s : schemas_) {
      if (s.task == task) return &s;
    }
    return nullptr;
  }

  Field parse_field() {
    const Token& t = expect(Tok::kIdent, "field name");
    if (t.text == "title") return Field::kTitle;
    if (t.text == "text") return Field::kText;
    if (t.text == "title_and_text") return Field::kTitleAndText;
    if (t.text == "tags_raw") return Field::kTagsRaw;
    fail(t, "unknown-field",
         "unknown field \"" + t.text + "\" (expected title, text, title_and_text or tags_raw)");
  }

  Casing parse_casing() {
    const Token& t = expect(Tok::kIdent, "'cased' or 'uncased'");
    if (t.text == "cased") return Casing::kCased;
    if (t.text == "uncased") return Casing::kUncased;
    fail(t, "syntax", "expected 'cased' or 'uncased', found '" + t.text + "'");
  }

  std::uint64_t parse_int() {
    const Token& t = expect(Tok::kInt, "non-negative integer");
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail(t, "syntax", "integer out of range");
    return value;
  }

  void comma() { expect(Tok::kComma, "','"); }

  // '[' STRING (',' STRING)* ','? ']' ; records each element's token.
  std::vector<std::string> parse_strings(std::vector<const Token*>* positions = nullptr) {
    const Token& open = expect(Tok::kLBracket, "'['");
    std::vector<std::string> out;
    while (peek().kind != Tok::kRBracket) {
      const Token& s = expect(Tok::kString, "string");
      if (s.text.empty()) fail(s, "syntax", "empty string in list");
      if (positions) positions->push_back(&s);
      out.push_back(s.text);
      if (peek().kind != Tok::kComma) break;
      next();
    }
    expect(Tok::kRBracket, "']'");
    if (out.empty()) fail(open, "empty-list", "list must not be empty");
    return out;
  }

  std::vector<std::string> parse_tag_list() {
    std::vector<const Token*> positions;
    auto tags = parse_strings(&positions);
    if (const TaskSchema* ts = find_schema(Task::kTags)) {
      for (const Token* t : positions) {
        if (!ts->index_of(t->text)) fail(*t, "unknown-tag", "tag \"" + t->text + "\" not in tags schema");
      }
    }
    return tags;
  }

  Expr parse_expr() {
    const Token& head = expect(Tok::kIdent, "expression");
    const std::string& name = head.text;
    expect(Tok::kLParen, "'('");
    Expr result = parse_call(head, name);
    expect(Tok::kRParen, "')'");
    return result;
  }

  Expr parse_call(const Token& head, const std::string& name) {
    if (name == "all_of" || name == "any_of") {
      std::vector<Expr> children;
      while (peek().kind != Tok::kRParen) {
        children.push_back(parse_expr());
        if (peek().kind != Tok::kComma) break;
        next();
      }
      if (children.empty()) fail(head, "empty-list", name + " needs at least one child");
      return name == "all_of" ? all_of(std::move(children)) : any_of(std::move(children));
    }
    if (name == "not") return negate(parse_expr());
    if (name == "keyword_any") {
      Field f = parse_field();
      comma();
      auto kws = parse_strings();
      comma();
      return keyword_any(f, std::move(kws), parse_casing());
    }
    if (name == "regex_any") {
      Field f = parse_field();
      comma();
      std::vector<const Token*> positions;
      auto patterns = parse_strings(&positions);
      comma();
      Casing casing = parse_casing();
      for (const Token* t : positions) {
        if (auto err = check_regex(t->text, casing); !err.empty()) fail(*t, "bad-regex", err);
      }
      return regex_any(f, std::move(patterns), casing);
    }
    if (name == "count_gt") {
      Field f = parse_field();
      comma();
      auto kws = parse_strings();
      comma();
      std::uint64_t threshold = parse_int();
      comma();
      return count_gt(f, std::move(kws), threshold, parse_casing());
    }
    if (name == "first_word_is") {
      Field f = parse_field();
      comma();
      const Token& w = expect(Tok::kString, "word string");
      if (w.text.empty()) fail(w, "syntax", "empty word");
      return first_word_is(f, w.text);
    }
    if (name == "tag_in") return tag_in(parse_tag_list());
    if (name == "tags_all") return tags_all(parse_tag_list());
    if (name == "tag_count_cmp") {
      auto a = parse_tag_list();
      comma();
      auto b = parse_tag_list();
      comma();
      const Token& op = expect(Tok::kIdent, "'lt', 'eq' or 'gt'");
      CountCmp cmp;
      if (op.text == "lt") {
        cmp = CountCmp::kLt;
      } else if (op.text == "eq") {
        cmp = CountCmp::kEq;
      } else if (op.text == "gt") {
        cmp = CountCmp::kGt;
      } else {
        fail(op, "syntax", "expected 'lt', 'eq' or 'gt', found '" + op.text + "'");
      }
      return tag_count_cmp(std::move(a), std::move(b), cmp);
    }
    if (name == "tag_count_is") {
      const Token& op = expect(Tok::kIdent, "'le', 'eq' or 'ge'");
      CountBound bound;
      if (op.text == "le") {
        bound = CountBound::kLe;
      } else if (op.text == "eq") {
        bound = CountBound::kEq;
      } else if (op.text == "ge") {
        bound = CountBound::kGe;
      } else {
        fail(op, "syntax", "expected 'le', 'eq' or 'ge', found '" + op.text + "'");
      }
      comma();
      return tag_count_is(bound, parse_int());
    }
    fail(head, "unknown-primitive", "unknown primitive \"" + name + "\"");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::span<const TaskSchema> schemas_;
  std::string source_;
};

// ---------------------------------------------------------------------------
// Printer

std::string quote(const std::string& s) {
  bool has_backslash = s.find('\\') != std::string::npos;
  bool raw_ok = s.find('"') == std::string::npos && s.find('\n') == std::string::npos &&
                s.find('\r') == std::string::npos;
  if (has_backslash && raw_ok) return "r\"" + s + "\"";
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += quote(items[i]);
  }
  return out + "]";
}

void print(const Expr& expr, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, AllOf> || std::is_same_v<T, AnyOf>) {
          out += std::is_same_v<T, AllOf> ? "all_of(\n" : "any_of(\n";
          for (std::size_t i = 0; i < node.children.size(); ++i) {
            out += pad + "  ";
            print(node.children[i], indent + 1, out);
            out += i + 1 < node.children.size() ? ",\n" : "\n";
          }
          out += pad + ")";
        } else if constexpr (std::is_same_v<T, Not>) {
          out += "not(";
          print(*node.child, indent, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, KeywordAny>) {
          out += "keyword_any(" + std::string(to_string(node.field)) + ", " + list(node.keywords) +
                 ", " + std::string(to_string(node.casing)) + ")";
        } else if constexpr (std::is_same_v<T, RegexAny>) {
          out += "regex_any(" + std::string(to_string(node.field)) + ", " + list(node.patterns) +
                 ", " + std::string(to_string(node.casing)) + ")";
        } else if constexpr (std::is_same_v<T, CountGt>) {
          out += "count_gt(" + std::string(to_string(node.field)) + ", " + list(node.keywords) +
                 ", " + std::to_string(node.threshold) + ", " + std::string(to_string(node.casing)) + ")";
        } else if constexpr (std::is_same_v<T, FirstWordIs>) {
          out += "first_word_is(" + std::string(to_string(node.field)) + ", " + quote(node.word) + ")";
        } else if constexpr (std::is_same_v<T, TagIn>) {
          out += "tag_in(" + list(node.tags) + ")";
        } else if constexpr (std::is_same_v<T, TagsAll>) {
          out += "tags_all(" + list(node.tags) + ")";
        } else if constexpr (std::is_same_v<T, TagCountCmp>) {
          out += "tag_count_cmp(" + list(node.group_a) + ", " + list(node.group_b) + ", " +
                 std::string(to_string(node.op)) + ")";
        } else if constexpr (std::is_same_v<T, TagCountIs>) {
          out += "tag_count_is(" + std::string(to_string(node.op)) + ", " + std::to_string(node.k) + ")";
        }
      },
      expr.node);
}

}  // namespace

LabelFunctionSpec parse_lf_spec(std::string_view source, std::span<const TaskSchema> schemas,
                                const std::string& source_name) {
  Lexer lexer(source, source_name);
  Parser parser(lexer.run(), schemas, source_name);
  return parser.parse_file();
}

std::string print_expr(const Expr& expr) {
  std::string out;
  print(expr, 0, out);
  return out;
}

std::string print_lf_spec(const LabelFunctionSpec& spec) {
  std::string out;
  out += "lf " + quote(spec.name) + "\n";
  out += "task " + std::string(to_string(spec.task)) + "\n";
  out += "label " + quote(spec.target_label) + "\n";
  out += "when " + print_expr(spec.body) + "\n";
  return out;
}

bool ValidationReport::ok() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
  std::size_t n = 0;
  for (const auto& d : diagnostics) n += d.severity == Severity::kError;
  return n;
}

std::size_t ValidationReport::warning_count() const {
  return diagnostics.size() - error_count();
}

ValidationReport validate_project(std::span<const LabelFunctionSpec> specs,
                                  std::span<const TaskSchema> schemas, bool has_tags_stage) {
  ValidationReport report;
  std::unordered_map<std::string, int> name_count;
  for (const auto& spec : specs) {
    if (++name_count[spec.name] == 2) {
      report.diagnostics.push_back({Severity::kError, "duplicate-name",
                                    "LF name \"" + spec.name + "\" is used more than once", 0, 0,
                                    spec.name});
    }
    if (spec.task == Task::kSentiment && !has_tags_stage && uses_tags(spec.body)) {
      report.diagnostics.push_back(
          {Severity::kError, "staging",
           "LF \"" + spec.name + "\" reads attached tags but no tags stage is configured", 0, 0,
           spec.name});
    }
    const TaskSchema* schema = nullptr;
    for (const auto& s : schemas) {
      if (s.task == spec.task) schema = &s;
    }
    if (schema == nullptr) {
      report.diagnostics.push_back({Severity::kError, "unknown-task",
                                    "no schema for task \"" + std::string(to_string(spec.task)) + "\"",
                                    0, 0, spec.name});
    } else if (!schema->index_of(spec.target_label)) {
      report.diagnostics.push_back({Severity::kError, "unknown-label",
                                    "label \"" + spec.target_label + "\" not in schema", 0, 0,
                                    spec.name});
    }
  }

  for (const auto& schema : schemas) {
    bool task_present = false;
    std::unordered_set<std::string> covered;
    for (const auto& spec : specs) {
      if (spec.task != schema.task) continue;
      task_present = true;
      covered.insert(spec.target_label);
    }
    if (!task_present) continue;
    for (const auto& label : schema.labels) {
      if (!covered.count(label)) {
        report.diagnostics.push_back({Severity::kWarning, "uncovered-label",
                                      "label \"" + label + "\" has no labeling function", 0, 0,
                                      std::string(to_string(schema.task))});
      }
    }
  }
  return report;
}

}  // namespace dataprog::lf
