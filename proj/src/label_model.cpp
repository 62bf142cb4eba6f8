#include "dataprog/label_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dataprog/error.hpp"
#include "dataprog/rng.hpp"

namespace dataprog {

ClassPrior make_prior(std::vector<double> weights) {
  if (weights.empty()) throw ModelError("class prior needs at least one class");
  for (double& w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw ModelError("class prior weights must be finite and non-negative");
  }
  // Normalize, floor, renormalize: floors survive the second pass up to rounding.
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0) return uniform_prior(weights.size());
  for (double& w : weights) w = std::max(w / total, kProbFloor);
  total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return ClassPrior{std::move(weights)};
}

ClassPrior uniform_prior(std::size_t k) {
  if (k == 0) throw ModelError("class prior needs at least one class");
  return ClassPrior{std::vector<double>(k, 1.0 / static_cast<double>(k))};
}

namespace {

int argmax_lowest(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

void check_prior(const ClassPrior& prior, std::size_t k) {
  if (prior.p.size() != k) {
    throw ModelError("class prior has " + std::to_string(prior.p.size()) + " entries, schema has " +
                     std::to_string(k));
  }
}

}  // namespace

ClassPrior mv_estimated_prior(const LabelMatrix& matrix) {
  const std::size_t k = matrix.schema.size();
  std::vector<double> counts(k, 0.0);
  std::vector<double> tally(k);
  bool any = false;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    std::fill(tally.begin(), tally.end(), 0.0);
    bool voted = false;
    for (int v : matrix.row(i)) {
      if (v == kAbstain) continue;
      tally[static_cast<std::size_t>(v)] += 1;
      voted = true;
    }
    if (!voted) continue;
    any = true;
    counts[static_cast<std::size_t>(argmax_lowest(tally))] += 1;
  }
  return any ? make_prior(std::move(counts)) : uniform_prior(k);
}

void validate_config(const TrainConfig& config) {
  if (!(config.learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (config.epochs <= 0) throw ConfigError("epochs must be positive");
  if (config.batch_size == 0) throw ConfigError("batch size must be positive");
  if (config.l2 < 0) throw ConfigError("l2 must be non-negative");
  if (!(config.init_accuracy > 0 && config.init_accuracy < 1)) {
    throw ConfigError("init accuracy must lie in (0, 1)");
  }
}

std::vector<SoftLabelRecord> majority_vote(const LabelMatrix& matrix, const ClassPrior& prior) {
  const std::size_t k = matrix.schema.size();
  check_prior(prior, k);
  std::vector<SoftLabelRecord> out(matrix.rows());
  const auto rows = static_cast<std::ptrdiff_t>(matrix.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto& rec = out[i];
    rec.doc_id = matrix.doc_ids[i];
    rec.task = matrix.schema.task;
    rec.probs.assign(k, 0.0);
    std::size_t total = 0;
    for (int v : matrix.row(i)) {
      if (v == kAbstain) continue;
      rec.probs[static_cast<std::size_t>(v)] += 1.0;
      ++total;
    }
    if (total == 0) {
      rec.probs = prior.p;
    } else {
      for (double& p : rec.probs) p /= static_cast<double>(total);
    }
  }
  return out;
}

namespace cm {

std::vector<double> second_moment(const LabelMatrix& matrix, std::span<const std::size_t> rows) {
  const std::size_t m = matrix.cols(), k = matrix.schema.size(), d = m * k;
  std::vector<double> o(d * d, 0.0);
  if (rows.empty()) return o;
  std::vector<std::size_t> active;
  active.reserve(m);
  for (std::size_t i : rows) {
    active.clear();
    auto row = matrix.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      if (row[j] != kAbstain) active.push_back(j * k + static_cast<std::size_t>(row[j]));
    }
    for (std::size_t a : active) {
      for (std::size_t b : active) o[a * d + b] += 1.0;
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& x : o) x *= inv;
  return o;
}

double objective(std::span<const double> mu, std::span<const double> moments, std::size_t m,
                 std::size_t k, std::span<const double> prior, double l2) {
  const std::size_t d = m * k;
  double loss = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t jp = 0; jp < m; ++jp) {
      if (j == jp) continue;
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t cp = 0; cp < k; ++cp) {
          double pred = 0.0;
          for (std::size_t y = 0; y < k; ++y) {
            pred += mu[(j * k + c) * k + y] * mu[(jp * k + cp) * k + y] / prior[y];
          }
          double r = moments[(j * k + c) * d + jp * k + cp] - pred;
          loss += r * r;
        }
      }
    }
  }
  double norm = 0.0;
  for (double x : mu) norm += x * x;
  return loss + l2 * norm;
}

double gradient(std::span<const double> mu, std::span<const double> moments, std::size_t m,
                std::size_t k, std::span<const double> prior, double l2, std::span<double> grad) {
  const std::size_t d = m * k;
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t jp = 0; jp < m; ++jp) {
      if (j == jp) continue;
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t cp = 0; cp < k; ++cp) {
          const std::size_t a = j * k + c, b = jp * k + cp;
          double pred = 0.0;
          for (std::size_t y = 0; y < k; ++y) pred += mu[a * k + y] * mu[b * k + y] / prior[y];
          const double r = moments[a * d + b] - pred;
          loss += r * r;
          // d(r²)/dμ[a,y] = -2r μ[b,y]/p_y and symmetrically for μ[b,y].
          for (std::size_t y = 0; y < k; ++y) {
            grad[a * k + y] -= 2.0 * r * mu[b * k + y] / prior[y];
            grad[b * k + y] -= 2.0 * r * mu[a * k + y] / prior[y];
          }
        }
      }
    }
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    norm += mu[i] * mu[i];
    grad[i] += 2.0 * l2 * mu[i];
  }
  return loss + l2 * norm;
}

void project(std::span<double> mu, std::size_t m, std::size_t k, std::span<const double> prior) {
  for (double& x : mu) x = std::clamp(x, kProbFloor, 1.0 - kProbFloor);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t y = 0; y < k; ++y) {
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) s += mu[(j * k + c) * k + y];
      if (s > prior[y]) {
        const double scale = prior[y] / s;
        for (std::size_t c = 0; c < k; ++c) mu[(j * k + c) * k + y] *= scale;
      }
    }
  }
}

}  // namespace cm

LabelModelParams fit_covariance_model(const LabelMatrix& matrix, const ClassPrior& prior,
                                      const TrainConfig& config) {
  validate_config(config);
  check_matrix(matrix);
  const std::size_t k = matrix.schema.size();
  if (k < 2) throw ModelError("covariance model needs at least two classes");
  check_prior(prior, k);
  if (matrix.rows() == 0) throw ModelError("covariance model needs at least one row");

  std::vector<std::size_t> active;
  std::vector<double> coverage;
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    std::size_t votes = 0;
    for (std::size_t i = 0; i < matrix.rows(); ++i) votes += matrix.at(i, j) != kAbstain;
    if (votes > 0) {
      active.push_back(j);
      coverage.push_back(static_cast<double>(votes) / static_cast<double>(matrix.rows()));
    }
  }
  if (active.size() < 2) {
    throw ModelError("covariance model is unidentifiable with " + std::to_string(active.size()) +
                     " voting LF(s); use majority vote instead");
  }
  const LabelMatrix sub = select_columns(matrix, active);
  const std::size_t m = active.size(), n = sub.rows();
  const std::span<const double> p(prior.p);

  Rng rng(config.seed);
  const double a0 = config.init_accuracy;
  std::vector<double> mu(m * k * k);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t y = 0; y < k; ++y) {
        double acc = c == y ? a0 : (1.0 - a0) / static_cast<double>(k - 1);
        mu[(j * k + c) * k + y] =
            coverage[j] * p[y] * acc + config.init_noise * rng.uniform(-1.0, 1.0);
      }
    }
  }
  cm::project(mu, m, k, p);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::vector<double> full_moments = cm::second_moment(sub, order);

  LabelModelParams params;
  params.lf_names = matrix.lf_names;
  params.schema = matrix.schema;
  params.k = k;
  params.prior = prior;
  params.train_log.emplace_back(0, cm::objective(mu, full_moments, m, k, p, config.l2));

  std::vector<double> grad(mu.size()), m1(mu.size(), 0.0), m2(mu.size(), 0.0);
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      std::span<const std::size_t> batch(order.data() + start, stop - start);
      const std::vector<double> moments =
          batch.size() == n ? full_moments : cm::second_moment(sub, batch);
      cm::gradient(mu, moments, m, k, p, config.l2, grad);
      ++step;
      const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < mu.size(); ++i) {
        m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * grad[i];
        m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        mu[i] -= config.learning_rate * (m1[i] / bc1) / (std::sqrt(m2[i] / bc2) + config.adam_epsilon);
      }
      cm::project(mu, m, k, p);
    }
    params.train_log.emplace_back(step, cm::objective(mu, full_moments, m, k, p, config.l2));
  }

  params.mu.assign(matrix.cols() * k * k, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t j = active[a];
    std::copy_n(mu.begin() + static_cast<std::ptrdiff_t>(a * k * k), k * k,
                params.mu.begin() + static_cast<std::ptrdiff_t>(j * k * k));
  }
  return params;
}

std::vector<SoftLabelRecord> predict_proba(const LabelModelParams& params,
                                           const LabelMatrix& matrix) {
  if (params.lf_names != matrix.lf_names) {
    throw ModelError("label model was fitted on different labeling functions");
  }
  if (params.schema != matrix.schema) throw ModelError("label model was fitted on a different schema");
  const std::size_t k = params.k;
  check_prior(params.prior, k);
  std::vector<double> log_prior(k);
  for (std::size_t y = 0; y < k; ++y) log_prior[y] = std::log(std::max(params.prior.p[y], kProbFloor));

  std::vector<SoftLabelRecord> out(matrix.rows());
  const auto rows = static_cast<std::ptrdiff_t>(matrix.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto& rec = out[i];
    rec.doc_id = matrix.doc_ids[i];
    rec.task = matrix.schema.task;
    std::vector<double> score = log_prior;
    bool voted = false;
    auto row = matrix.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == kAbstain) continue;
      voted = true;
      const auto c = static_cast<std::size_t>(row[j]);
      for (std::size_t y = 0; y < k; ++y) {
        score[y] += std::log(std::max(params.at(j, c, y), kProbFloor)) - log_prior[y];
      }
    }
    if (!voted) {
      rec.probs = params.prior.p;
      continue;
    }
    const double top = *std::max_element(score.begin(), score.end());
    double total = 0.0;
    for (double& s : score) {
      s = std::exp(s - top);
      total += s;
    }
    for (double& s : score) s /= total;
    rec.probs = std::move(score);
  }
  return out;
}

std::vector<HardLabel> harden(std::span<const SoftLabelRecord> soft, const TaskSchema& schema,
                              double threshold) {
  if (!(threshold > 0 && threshold < 1)) throw ConfigError("threshold must lie in (0, 1)");
  std::vector<HardLabel> out;
  out.reserve(soft.size());
  for (const auto& rec : soft) {
    if (rec.probs.size() != schema.size()) {
      throw InputError("soft label for \"" + rec.doc_id + "\" has wrong length");
    }
    HardLabel h;
    h.doc_id = rec.doc_id;
    if (schema.mode == LabelMode::kMultiClass) {
      h.cls = argmax_lowest(rec.probs);
    } else {
      h.present.resize(rec.probs.size());
      for (std::size_t t = 0; t < rec.probs.size(); ++t) h.present[t] = rec.probs[t] >= threshold;
    }
    out.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tags: one binary present/absent problem per tag.

std::string_view to_string(TagModelKind kind) {
  return kind == TagModelKind::kMajority ? "mv" : "cm";
}

TagModelKind parse_tag_model(std::string_view name) {
  if (name == "mv") return TagModelKind::kMajority;
  if (name == "cm") return TagModelKind::kCovariance;
  throw InputError("unknown label model \"" + std::string(name) + "\" (expected mv or cm)");
}

namespace {

const TaskSchema& binary_tag_schema() {
  static const TaskSchema schema{Task::kTags, {"absent", "present"}, LabelMode::kMultiClass};
  return schema;
}

void check_tag_matrix(const LabelMatrix& matrix) {
  if (matrix.schema.mode != LabelMode::kMultiLabel) throw ModelError("tag models need a multi-label matrix");
  check_matrix(matrix);
}

}  // namespace

LabelMatrix tag_submatrix(const LabelMatrix& matrix, std::size_t tag) {
  std::vector<std::size_t> columns;
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    if (static_cast<std::size_t>(matrix.lf_targets[j]) == tag) columns.push_back(j);
  }
  LabelMatrix sub = select_columns(matrix, columns);
  sub.schema = binary_tag_schema();
  for (int& t : sub.lf_targets) t = 1;
  for (int& v : sub.votes) v = v == kAbstain ? kAbstain : 1;
  return sub;
}

TagModelParams fit_tag_model(const LabelMatrix& matrix, TagModelKind kind,
                             const TagVoteDefaults& defaults) {
  check_tag_matrix(matrix);
  TagModelParams params;
  params.kind = kind;
  params.lf_names = matrix.lf_names;
  params.schema = matrix.schema;
  const std::size_t n = matrix.rows();
  for (std::size_t t = 0; t < matrix.schema.size(); ++t) {
    TagModelParams::PerTag entry;
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      if (static_cast<std::size_t>(matrix.lf_targets[j]) == t) entry.columns.push_back(j);
    }
    std::size_t fired_rows = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j : entry.columns) {
        if (matrix.at(i, j) != kAbstain) {
          ++fired_rows;
          break;
        }
      }
    }
    entry.base_rate = n == 0 ? 0.0 : static_cast<double>(fired_rows) / static_cast<double>(n);
    entry.fire_probability = defaults.fire_probability;
    if (entry.columns.empty()) {
      entry.mode = TagModelParams::Mode::kNone;
    } else if (kind == TagModelKind::kMajority) {
      entry.mode = TagModelParams::Mode::kVote;
    } else {
      entry.mode = TagModelParams::Mode::kCalibrated;
      if (entry.columns.size() >= 2 && n > 0) {
        TrainConfig config = defaults.train;
        config.seed = defaults.train.seed + 0x9E3779B97F4A7C15ULL * (t + 1);
        try {
          LabelMatrix sub = tag_submatrix(matrix, t);
          entry.model = fit_covariance_model(
              sub, make_prior({1.0 - entry.base_rate, entry.base_rate}), config);
          entry.mode = TagModelParams::Mode::kCovariance;
        } catch (const ModelError&) {
          // Fewer than two of this tag's LFs ever fire: keep the calibrated vote.
        }
      }
    }
    params.tags.push_back(std::move(entry));
  }
  return params;
}

std::vector<SoftLabelRecord> predict_tags(const TagModelParams& params, const LabelMatrix& matrix) {
  check_tag_matrix(matrix);
  if (params.lf_names != matrix.lf_names || params.schema != matrix.schema) {
    throw ModelError("tag model was fitted on different labeling functions or schema");
  }
  const std::size_t n = matrix.rows(), num_tags = params.tags.size();
  std::vector<SoftLabelRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].doc_id = matrix.doc_ids[i];
    out[i].task = Task::kTags;
    out[i].probs.assign(num_tags, 0.0);
  }
  for (std::size_t t = 0; t < num_tags; ++t) {
    const auto& entry = params.tags[t];
    using Mode = TagModelParams::Mode;
    if (entry.mode == Mode::kNone) continue;
    if (entry.mode == Mode::kCovariance) {
      auto soft = predict_proba(*entry.model, tag_submatrix(matrix, t));
      for (std::size_t i = 0; i < n; ++i) out[i].probs[t] = soft[i].probs[1];
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t fired = 0;
      for (std::size_t j : entry.columns) fired += matrix.at(i, j) != kAbstain;
      if (entry.mode == Mode::kVote) {
        out[i].probs[t] = static_cast<double>(fired) / static_cast<double>(entry.columns.size());
      } else {
        out[i].probs[t] = fired > 0 ? entry.fire_probability : entry.base_rate;
      }
    }
  }
  return out;
}

std::vector<SoftLabelRecord> tag_vote(const LabelMatrix& matrix, TagModelKind kind,
                                      const TagVoteDefaults& defaults) {
  return predict_tags(fit_tag_model(matrix, kind, defaults), matrix);
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"optimizer", "adam"},      {"l2", c.l2},
          {"epochs", c.epochs},       {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate}, {"seed", c.seed},
          {"init_accuracy", c.init_accuracy}, {"init_noise", c.init_noise},
          {"beta1", c.beta1},         {"beta2", c.beta2},
          {"adam_epsilon", c.adam_epsilon}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.l2 = j.value("l2", c.l2);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seed = j.value("seed", c.seed);
  c.init_accuracy = j.value("init_accuracy", c.init_accuracy);
  c.init_noise = j.value("init_noise", c.init_noise);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  if (j.contains("optimizer") && j.at("optimizer") != "adam") throw ConfigError("only the adam optimizer is supported");
  validate_config(c);
  return c;
}

nlohmann::json params_to_json(const LabelModelParams& params) {
  nlohmann::json log = nlohmann::json::array();
  for (const auto& [step, loss] : params.train_log) log.push_back({step, loss});
  return {{"lf_names", params.lf_names}, {"schema", schema_to_json(params.schema)},
          {"k", params.k},               {"mu", params.mu},
          {"prior", params.prior.p},     {"train_log", log}};
}

LabelModelParams params_from_json(const nlohmann::json& j) {
  LabelModelParams p;
  p.lf_names = j.at("lf_names").get<std::vector<std::string>>();
  const auto& s = j.at("schema");
  p.schema.task = parse_task(s.at("task").get<std::string>());
  p.schema.mode = s.at("mode") == "multi_label" ? LabelMode::kMultiLabel : LabelMode::kMultiClass;
  p.schema.labels = s.at("labels").get<std::vector<std::string>>();
  p.k = j.at("k").get<std::size_t>();
  p.mu = j.at("mu").get<std::vector<double>>();
  p.prior.p = j.at("prior").get<std::vector<double>>();
  for (const auto& e : j.at("train_log")) p.train_log.emplace_back(e.at(0).get<long>(), e.at(1).get<double>());
  if (p.mu.size() != p.lf_names.size() * p.k * p.k) throw ModelError("model file: mu has wrong size");
  return p;
}

nlohmann::json tag_params_to_json(const TagModelParams& params) {
  static constexpr const char* kModes[] = {"none", "vote", "covariance", "calibrated"};
  nlohmann::json tags = nlohmann::json::array();
  for (const auto& e : params.tags) {
    nlohmann::json t = {{"mode", kModes[static_cast<int>(e.mode)]},
                        {"columns", e.columns},
                        {"base_rate", e.base_rate},
                        {"fire_probability", e.fire_probability}};
    if (e.model) t["model"] = params_to_json(*e.model);
    tags.push_back(std::move(t));
  }
  return {{"kind", std::string(to_string(params.kind))},
          {"lf_names", params.lf_names},
          {"schema", schema_to_json(params.schema)},
          {"tags", tags}};
}

TagModelParams tag_params_from_json(const nlohmann::json& j) {
  TagModelParams p;
  p.kind = parse_tag_model(j.at("kind").get<std::string>());
  p.lf_names = j.at("lf_names").get<std::vector<std::string>>();
  p.schema = schema_from_json(j.at("schema"));
  for (const auto& t : j.at("tags")) {
    TagModelParams::PerTag e;
    const auto mode = t.at("mode").get<std::string>();
    if (mode == "none") {
      e.mode = TagModelParams::Mode::kNone;
    } else if (mode == "vote") {
      e.mode = TagModelParams::Mode::kVote;
    } else if (mode == "covariance") {
      e.mode = TagModelParams::Mode::kCovariance;
    } else if (mode == "calibrated") {
      e.mode = TagModelParams::Mode::kCalibrated;
    } else {
      throw ModelError("model file: unknown tag mode \"" + mode + "\"");
    }
    e.columns = t.at("columns").get<std::vector<std::size_t>>();
    e.base_rate = t.at("base_rate").get<double>();
    e.fire_probability = t.at("fire_probability").get<double>();
    if (t.contains("model")) e.model = params_from_json(t.at("model"));
    p.tags.push_back(std::move(e));
  }
  return p;
}

}  // namespace dataprog
