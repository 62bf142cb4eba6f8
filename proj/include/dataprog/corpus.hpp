#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dataprog {

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct RawArticle {
  std::string id;
  std::string title;
  std::string body;
  std::optional<int> year;
};

// One chunk of an article. `tags` is the comma-joined stage-1 tag output, set
// only once tag predictions are attached. `extra` carries fields this type
// does not model so that save/load is lossless.
struct Document {
  std::string id;
  std::string title;
  std::string text;
  Split split = Split::kTrain;
  std::optional<std::string> tags;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  bool operator==(const Document&) const = default;
};

struct SplitSpec {
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
  std::size_t test_count = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultMaxTokens = 512;
inline constexpr std::string_view kDefaultJoiner = " ; ";

std::vector<std::string_view> whitespace_tokens(std::string_view text);

// Greedy non-overlapping windows of at most `max_tokens` whitespace tokens.
// Chunk text is the window's tokens joined by single spaces; the title is
// carried on every chunk and does not count toward the budget.
std::vector<Document> chunk_article(const RawArticle& article,
                                    std::size_t max_tokens = kDefaultMaxTokens);

std::string render_input(const Document& doc, std::string_view joiner = kDefaultJoiner);

// Seeded uniform permutation; the first train_count permuted positions become
// train, the next validation_count validation, the rest test. Document order
// is preserved.
std::vector<Document> assign_splits(std::vector<Document> docs, const SplitSpec& spec);

// Counts for `n` documents split 80/10/10, test taking the rounding remainder.
SplitSpec default_split_spec(std::size_t n, std::uint64_t seed);

// Throws InputError naming the first duplicate id.
void validate_corpus(std::span<const Document> docs);

nlohmann::ordered_json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::ordered_json& record);

std::vector<Document> load_corpus(const std::filesystem::path& path);
std::vector<Document> parse_corpus(std::string_view content, const std::string& source_name);
std::string serialize_corpus(std::span<const Document> docs);
void save_corpus(std::span<const Document> docs, const std::filesystem::path& path);

// Raw article file: one {"id", "title", "body", "year"?} record per line.
std::vector<RawArticle> load_raw_articles(const std::filesystem::path& path);

}  // namespace dataprog
