#include "dataprog/lf_runtime.hpp"

#include <exception>
#include <regex>
#include <unordered_map>

#include "dataprog/text.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dataprog {

using namespace lf;

struct CompiledLf::Node {
  enum class Kind {
    kAll, kAny, kNot, kKeyword, kRegex, kCount, kFirstWord, kTagIn, kTagsAll, kTagCmp, kTagCount
  };
  Kind kind = Kind::kAll;
  std::size_t field = 0;
  bool fold = false;
  std::vector<std::string> strings;
  std::vector<std::string> strings_b;
  std::vector<std::regex> regexes;
  std::uint64_t number = 0;
  int op = 0;
  std::vector<Node> children;
};

namespace {

using Node = CompiledLf::Node;

std::vector<std::string> folded_if(const std::vector<std::string>& items, bool fold) {
  if (!fold) return items;
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& s : items) out.push_back(text::fold_case(s));
  return out;
}

Node compile_node(const Expr& expr) {
  Node n;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, AllOf> || std::is_same_v<T, AnyOf>) {
          n.kind = std::is_same_v<T, AllOf> ? Node::Kind::kAll : Node::Kind::kAny;
          for (const auto& c : e.children) n.children.push_back(compile_node(c));
        } else if constexpr (std::is_same_v<T, Not>) {
          n.kind = Node::Kind::kNot;
          n.children.push_back(compile_node(*e.child));
        } else if constexpr (std::is_same_v<T, KeywordAny>) {
          n.kind = Node::Kind::kKeyword;
          n.field = static_cast<std::size_t>(e.field);
          n.fold = e.casing == Casing::kUncased;
          n.strings = folded_if(e.keywords, n.fold);
        } else if constexpr (std::is_same_v<T, RegexAny>) {
          n.kind = Node::Kind::kRegex;
          n.field = static_cast<std::size_t>(e.field);
          n.fold = e.casing == Casing::kUncased;
          auto flags = std::regex::ECMAScript;
          if (n.fold) flags |= std::regex::icase;
          for (const auto& p : e.patterns) {
            if (auto err = check_regex(p, e.casing); !err.empty()) {
              throw InputError("regex \"" + p + "\": " + err);
            }
            n.regexes.emplace_back(p, flags);
          }
        } else if constexpr (std::is_same_v<T, CountGt>) {
          n.kind = Node::Kind::kCount;
          n.field = static_cast<std::size_t>(e.field);
          n.fold = e.casing == Casing::kUncased;
          n.strings = folded_if(e.keywords, n.fold);
          n.number = e.threshold;
        } else if constexpr (std::is_same_v<T, FirstWordIs>) {
          n.kind = Node::Kind::kFirstWord;
          n.field = static_cast<std::size_t>(e.field);
          n.strings = {e.word};
        } else if constexpr (std::is_same_v<T, TagIn>) {
          n.kind = Node::Kind::kTagIn;
          n.strings = e.tags;
        } else if constexpr (std::is_same_v<T, TagsAll>) {
          n.kind = Node::Kind::kTagsAll;
          n.strings = e.tags;
        } else if constexpr (std::is_same_v<T, TagCountCmp>) {
          n.kind = Node::Kind::kTagCmp;
          n.strings = e.group_a;
          n.strings_b = e.group_b;
          n.op = static_cast<int>(e.op);
        } else if constexpr (std::is_same_v<T, TagCountIs>) {
          n.kind = Node::Kind::kTagCount;
          n.op = static_cast<int>(e.op);
          n.number = e.k;
        }
      },
      expr.node);
  return n;
}

bool has_tag(const std::vector<std::string>& tags, const std::string& tag) {
  for (const auto& t : tags) {
    if (t == tag) return true;
  }
  return false;
}

std::size_t count_present(const std::vector<std::string>& tags,
                          const std::vector<std::string>& group) {
  std::size_t n = 0;
  for (const auto& g : group) n += has_tag(tags, g);
  return n;
}

bool eval(const Node& n, const DocContext& doc) {
  switch (n.kind) {
    case Node::Kind::kAll:
      for (const auto& c : n.children) {
        if (!eval(c, doc)) return false;
      }
      return true;
    case Node::Kind::kAny:
      for (const auto& c : n.children) {
        if (eval(c, doc)) return true;
      }
      return false;
    case Node::Kind::kNot:
      return !eval(n.children.front(), doc);
    case Node::Kind::kKeyword: {
      const std::string& hay = n.fold ? doc.folded[n.field] : doc.fields[n.field];
      for (const auto& k : n.strings) {
        if (text::contains(hay, k)) return true;
      }
      return false;
    }
    case Node::Kind::kRegex: {
      const std::string& hay = n.fold ? doc.folded[n.field] : doc.fields[n.field];
      for (const auto& re : n.regexes) {
        if (std::regex_search(hay, re)) return true;
      }
      return false;
    }
    case Node::Kind::kCount: {
      const std::string& hay = n.fold ? doc.folded[n.field] : doc.fields[n.field];
      std::uint64_t total = 0;
      for (const auto& k : n.strings) total += text::count_occurrences(hay, k);
      return total > n.number;
    }
    case Node::Kind::kFirstWord:
      return text::first_token(doc.fields[n.field]) == n.strings.front();
    case Node::Kind::kTagIn:
      for (const auto& t : n.strings) {
        if (has_tag(doc.tags, t)) return true;
      }
      return false;
    case Node::Kind::kTagsAll:
      for (const auto& t : n.strings) {
        if (!has_tag(doc.tags, t)) return false;
      }
      return true;
    case Node::Kind::kTagCmp: {
      std::size_t a = count_present(doc.tags, n.strings);
      std::size_t b = count_present(doc.tags, n.strings_b);
      switch (static_cast<CountCmp>(n.op)) {
        case CountCmp::kLt: return a < b;
        case CountCmp::kEq: return a == b;
        case CountCmp::kGt: return a > b;
      }
      return false;
    }
    case Node::Kind::kTagCount: {
      std::uint64_t count = doc.tags.size();
      switch (static_cast<CountBound>(n.op)) {
        case CountBound::kLe: return count <= n.number;
        case CountBound::kEq: return count == n.number;
        case CountBound::kGe: return count >= n.number;
      }
      return false;
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> split_tags(std::string_view raw) {
  std::vector<std::string> tags;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t end = raw.find(',', pos);
    if (end == std::string_view::npos) end = raw.size();
    auto tag = text::trim(raw.substr(pos, end - pos));
    if (!tag.empty()) tags.emplace_back(tag);
    pos = end + 1;
  }
  return tags;
}

DocContext make_context(const Document& doc) {
  DocContext ctx;
  ctx.fields[static_cast<std::size_t>(Field::kTitle)] = doc.title;
  ctx.fields[static_cast<std::size_t>(Field::kText)] = doc.text;
  ctx.fields[static_cast<std::size_t>(Field::kTitleAndText)] = doc.title + " | " + doc.text;
  ctx.fields[static_cast<std::size_t>(Field::kTagsRaw)] = doc.tags.value_or("");
  for (std::size_t f = 0; f < ctx.fields.size(); ++f) ctx.folded[f] = text::fold_case(ctx.fields[f]);
  ctx.tags = split_tags(doc.tags.value_or(""));
  return ctx;
}

CompiledLf::CompiledLf(const LabelFunctionSpec& spec, const TaskSchema& schema)
    : name_(spec.name), root_(std::make_unique<Node>(compile_node(spec.body))) {
  if (spec.task != schema.task) {
    throw InputError("LF \"" + spec.name + "\" belongs to task \"" +
                     std::string(to_string(spec.task)) + "\"");
  }
  auto idx = schema.index_of(spec.target_label);
  if (!idx) throw InputError("LF \"" + spec.name + "\": label \"" + spec.target_label + "\" not in schema");
  target_ = *idx;
}

CompiledLf::~CompiledLf() = default;
CompiledLf::CompiledLf(CompiledLf&&) noexcept = default;
CompiledLf& CompiledLf::operator=(CompiledLf&&) noexcept = default;

bool CompiledLf::evaluate(const DocContext& doc) const { return eval(*root_, doc); }

std::vector<CompiledLf> compile_all(std::span<const LabelFunctionSpec> specs,
                                    const TaskSchema& schema) {
  std::vector<CompiledLf> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.emplace_back(s, schema);
  return out;
}

LabelMatrix apply_lfs(std::span<const Document> docs, std::span<const LabelFunctionSpec> specs,
                      const TaskSchema& schema) {
  auto lfs = compile_all(specs, schema);
  LabelMatrix matrix;
  matrix.schema = schema;
  for (const auto& d : docs) matrix.doc_ids.push_back(d.id);
  for (const auto& f : lfs) {
    matrix.lf_names.push_back(f.name());
    matrix.lf_targets.push_back(f.target());
  }
  const std::size_t n = docs.size(), m = lfs.size();
  matrix.votes.assign(n * m, kAbstain);
  if (m == 0) return matrix;

  // Exceptions must not escape an OpenMP region; keep the first and rethrow.
  std::exception_ptr failure;
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto row = static_cast<std::size_t>(i);
    try {
      DocContext ctx = make_context(docs[row]);
      for (std::size_t j = 0; j < m; ++j) {
        if (lfs[j].evaluate(ctx)) matrix.votes[row * m + j] = lfs[j].target();
      }
    } catch (...) {
#pragma omp critical(dataprog_apply_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return matrix;
}

std::vector<Document> attach_stage1_tags(std::span<const Document> docs,
                                         std::span<const HardLabel> predictions,
                                         const TaskSchema& tags_schema) {
  std::unordered_map<std::string_view, const HardLabel*> by_id;
  for (const auto& p : predictions) by_id[p.doc_id] = &p;
  std::vector<Document> out(docs.begin(), docs.end());
  for (auto& doc : out) {
    auto it = by_id.find(doc.id);
    if (it == by_id.end()) throw InputError("no stage-1 tag prediction for document \"" + doc.id + "\"");
    const auto& present = it->second->present;
    if (present.size() != tags_schema.size()) {
      throw InputError("stage-1 prediction for \"" + doc.id + "\" has wrong tag count");
    }
    std::string joined;
    for (std::size_t t = 0; t < present.size(); ++t) {
      if (!present[t]) continue;
      if (!joined.empty()) joined.push_back(',');
      joined += tags_schema.labels[t];
    }
    doc.tags = std::move(joined);
  }
  return out;
}

}  // namespace dataprog
