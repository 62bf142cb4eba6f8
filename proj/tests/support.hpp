#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dataprog/corpus.hpp"
#include "dataprog/label_matrix.hpp"
#include "dataprog/lf_dsl.hpp"
#include "dataprog/rng.hpp"

namespace testing {

// Removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

dataprog::TaskSchema sentiment();

// Every cell abstains with probability `abstain`, else votes uniformly.
dataprog::LabelMatrix random_matrix(std::size_t n, std::size_t m, std::size_t k, double abstain,
                                    dataprog::Rng& rng);

struct Synthetic {
  dataprog::LabelMatrix matrix;
  std::vector<int> truth;
  std::vector<double> accuracy;
};

// Y uniform over k classes; LF j votes with probability `coverage`, and is
// right with probability accuracy[j], otherwise uniform over the wrong classes.
Synthetic conditionally_independent(std::size_t n, const std::vector<double>& accuracy,
                                    double coverage, std::size_t k, dataprog::Rng& rng);

// Indonesian-looking filler articles seeded with topic words the shipped LFs react to.
std::vector<dataprog::RawArticle> synthetic_articles(std::size_t n, std::uint64_t seed);
void write_raw(const std::vector<dataprog::RawArticle>& articles, const std::filesystem::path& path);

std::filesystem::path source_dir();
std::filesystem::path shipped_lfs();

// Parsed LFs of a shipped manifest (tags, sentiment-v0, sentiment-v1), in manifest order.
std::vector<dataprog::lf::LabelFunctionSpec> shipped_specs(const std::string& manifest);

}  // namespace testing
