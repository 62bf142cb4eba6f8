#include "dataprog/corpus.hpp"

#include <numeric>
#include <unordered_set>

#include "dataprog/error.hpp"
#include "dataprog/io.hpp"
#include "dataprog/rng.hpp"

namespace dataprog {

using nlohmann::ordered_json;

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// "line N: field "x" ..." style error for record parsing.
[[noreturn]] void record_error(const std::string& source, std::size_t line,
                               const std::string& message) {
  throw InputError(source + ":" + std::to_string(line) + ": " + message);
}

const std::string& require_string(const ordered_json& record, const char* field) {
  auto it = record.find(field);
  if (it == record.end()) throw InputError(std::string("missing field \"") + field + "\"");
  if (!it->is_string()) throw InputError(std::string("field \"") + field + "\" is not a string");
  return it->get_ref<const std::string&>();
}

template <typename F>
auto for_each_record(std::string_view content, const std::string& source, F&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      record_error(source, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) record_error(source, line_no, "record is not an object");
    try {
      fn(record);
    } catch (const InputError& e) {
      record_error(source, line_no, e.what());
    }
  }
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw InputError("unknown split \"" + std::string(name) + "\"");
}

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::vector<Document> chunk_article(const RawArticle& article, std::size_t max_tokens) {
  if (max_tokens == 0) throw InputError("max_tokens must be positive");
  auto tokens = whitespace_tokens(article.body);
  if (tokens.empty()) throw InputError("article \"" + article.id + "\" has an empty body");

  std::vector<Document> chunks;
  for (std::size_t start = 0, index = 0; start < tokens.size(); start += max_tokens, ++index) {
    std::size_t stop = std::min(tokens.size(), start + max_tokens);
    Document doc;
    doc.id = article.id + "_" + std::to_string(index);
    doc.title = article.title;
    for (std::size_t t = start; t < stop; ++t) {
      if (t > start) doc.text.push_back(' ');
      doc.text.append(tokens[t]);
    }
    if (article.year) doc.extra["year"] = *article.year;
    chunks.push_back(std::move(doc));
  }
  return chunks;
}

std::string render_input(const Document& doc, std::string_view joiner) {
  std::string out;
  out.reserve(doc.title.size() + joiner.size() + doc.text.size());
  out.append(doc.title).append(joiner).append(doc.text);
  return out;
}

std::vector<Document> assign_splits(std::vector<Document> docs, const SplitSpec& spec) {
  const std::size_t total = spec.train_count + spec.validation_count + spec.test_count;
  if (total != docs.size()) {
    throw ConfigError("split counts sum to " + std::to_string(total) + " but corpus has " +
                      std::to_string(docs.size()) + " documents");
  }
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(order);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    Split split = rank < spec.train_count                           ? Split::kTrain
                  : rank < spec.train_count + spec.validation_count ? Split::kValidation
                                                                    : Split::kTest;
    docs[order[rank]].split = split;
  }
  return docs;
}

SplitSpec default_split_spec(std::size_t n, std::uint64_t seed) {
  SplitSpec spec;
  spec.train_count = n * 8 / 10;
  spec.validation_count = n / 10;
  spec.test_count = n - spec.train_count - spec.validation_count;
  spec.seed = seed;
  return spec;
}

void validate_corpus(std::span<const Document> docs) {
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : docs) {
    if (doc.id.empty()) throw InputError("document with empty id");
    if (doc.id.find_first_of("\t\r\n") != std::string::npos) {
      throw InputError("document id \"" + doc.id + "\" contains a tab or line break");
    }
    if (!seen.insert(doc.id).second) throw InputError("duplicate document id \"" + doc.id + "\"");
  }
}

ordered_json document_to_json(const Document& doc) {
  ordered_json record;
  record["id"] = doc.id;
  record["title"] = doc.title;
  record["text"] = doc.text;
  record["split"] = std::string(to_string(doc.split));
  if (doc.tags) record["tags"] = *doc.tags;
  for (const auto& [key, value] : doc.extra.items()) record[key] = value;
  return record;
}

Document document_from_json(const ordered_json& record) {
  Document doc;
  doc.id = require_string(record, "id");
  if (doc.id.empty()) throw InputError("field \"id\" is empty");
  doc.title = require_string(record, "title");
  doc.text = require_string(record, "text");
  doc.split = parse_split(require_string(record, "split"));
  if (auto it = record.find("tags"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw InputError("field \"tags\" is not a string");
    doc.tags = it->get<std::string>();
  }
  for (const auto& [key, value] : record.items()) {
    if (key == "id" || key == "title" || key == "text" || key == "split" || key == "tags") continue;
    doc.extra[key] = value;
  }
  return doc;
}

std::vector<Document> parse_corpus(std::string_view content, const std::string& source_name) {
  std::vector<Document> docs;
  for_each_record(content, source_name,
                  [&](const ordered_json& record) { docs.push_back(document_from_json(record)); });
  validate_corpus(docs);
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path), path.string());
}

std::string serialize_corpus(std::span<const Document> docs) {
  std::string out;
  for (const auto& doc : docs) {
    out += document_to_json(doc).dump();
    out.push_back('\n');
  }
  return out;
}

void save_corpus(std::span<const Document> docs, const std::filesystem::path& path) {
  validate_corpus(docs);
  write_file_atomic(path, serialize_corpus(docs));
}

std::vector<RawArticle> load_raw_articles(const std::filesystem::path& path) {
  std::vector<RawArticle> articles;
  std::unordered_set<std::string> ids;
  for_each_record(read_file(path), path.string(), [&](const ordered_json& record) {
    RawArticle article;
    article.id = require_string(record, "id");
    if (article.id.empty()) throw InputError("field \"id\" is empty");
    article.title = require_string(record, "title");
    article.body = require_string(record, "body");
    if (auto it = record.find("year"); it != record.end() && !it->is_null()) {
      if (!it->is_number_integer()) throw InputError("field \"year\" is not an integer");
      article.year = it->get<int>();
    }
    if (!ids.insert(article.id).second) {
      throw InputError("duplicate article id \"" + article.id + "\"");
    }
    articles.push_back(std::move(article));
  });
  return articles;
}

}  // namespace dataprog
