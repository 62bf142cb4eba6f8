#include "support.hpp"

#include <atomic>
#include <fstream>

#include <unistd.h>

#include "dataprog/io.hpp"
#include "dataprog/project.hpp"
#include "dataprog/schema.hpp"
#include "json.hpp"

#ifndef DATAPROG_SOURCE_DIR
#define DATAPROG_SOURCE_DIR "."
#endif

namespace fs = std::filesystem;
using namespace dataprog;

namespace testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("dataprog-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

TaskSchema sentiment() { return sentiment_schema(); }

LabelMatrix random_matrix(std::size_t n, std::size_t m, std::size_t k, double abstain, Rng& rng) {
  LabelMatrix mat;
  mat.schema = TaskSchema{Task::kSentiment, {}, LabelMode::kMultiClass};
  for (std::size_t c = 0; c < k; ++c) mat.schema.labels.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) mat.doc_ids.push_back("d" + std::to_string(i));
  for (std::size_t j = 0; j < m; ++j) {
    mat.lf_names.push_back("lf" + std::to_string(j));
    mat.lf_targets.push_back(0);
  }
  mat.votes.resize(n * m);
  for (int& v : mat.votes) {
    v = rng.uniform01() < abstain ? kAbstain : static_cast<int>(rng.below(k));
  }
  return mat;
}

Synthetic conditionally_independent(std::size_t n, const std::vector<double>& accuracy,
                                    double coverage, std::size_t k, Rng& rng) {
  Synthetic s;
  s.accuracy = accuracy;
  const std::size_t m = accuracy.size();
  s.matrix = random_matrix(n, m, k, 1.0, rng);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(rng.below(k));
    s.truth.push_back(y);
    for (std::size_t j = 0; j < m; ++j) {
      if (rng.uniform01() >= coverage) continue;
      if (rng.uniform01() < accuracy[j]) {
        s.matrix.at(i, j) = y;
      } else {
        int w = static_cast<int>(rng.below(k - 1));
        s.matrix.at(i, j) = w >= y ? w + 1 : w;
      }
    }
  }
  return s;
}

std::vector<RawArticle> synthetic_articles(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> topic = {
      "konflik", "tambang",   "warga",  "desa",   "nelayan",   "mangrove", "sawit",  "perusahaan",
      "inovasi", "penelitian", "korupsi", "bencana", "banjir", "iklim",    "pemerintah", "kebijakan",
      "energi",  "sampah",    "pertanian", "lahan", "hutan",   "satwa",    "LSM",    "ASN"};
  static const std::vector<std::string> filler = {"dan",  "di",   "yang", "ini", "itu", "untuk",
                                                  "dengan", "dari", "akan", "pada", "juga"};
  Rng rng(seed);
  auto pick = [&](const std::vector<std::string>& v) { return v[rng.below(v.size())]; };
  std::vector<RawArticle> out;
  for (std::size_t a = 0; a < n; ++a) {
    RawArticle art;
    art.id = "art" + std::to_string(a);
    for (int w = 0; w < 6; ++w) art.title += (w ? " " : "") + pick(rng.uniform01() < 0.4 ? topic : filler);
    art.title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(art.title[0])));
    const std::size_t len = 40 + rng.below(900);
    for (std::size_t w = 0; w < len; ++w) {
      art.body += (w ? " " : "") + pick(rng.uniform01() < 0.12 ? topic : filler);
    }
    art.year = 2018 + static_cast<int>(rng.below(5));
    out.push_back(std::move(art));
  }
  return out;
}

void write_raw(const std::vector<RawArticle>& articles, const fs::path& path) {
  std::ofstream out(path);
  for (const auto& a : articles) {
    nlohmann::json j{{"id", a.id}, {"title", a.title}, {"body", a.body}};
    if (a.year) j["year"] = *a.year;
    out << j.dump() << "\n";
  }
}

fs::path source_dir() { return DATAPROG_SOURCE_DIR; }
fs::path shipped_lfs() { return source_dir() / "lfs"; }

std::vector<lf::LabelFunctionSpec> shipped_specs(const std::string& manifest) {
  const Manifest m =
      manifest_from_json(nlohmann::json::parse(read_file(shipped_lfs() / "manifests" / (manifest + ".json"))));
  std::vector<LfSource> sources;
  for (const auto& rel : m.lfs) sources.push_back({rel, read_file(shipped_lfs() / rel)});
  auto check = check_manifest_sources(m.task, sources);
  if (!check.report.ok()) throw InputError("shipped manifest " + manifest + " does not validate");
  return check.specs;
}

}  // namespace testing
