// Command-line front end for a dataprog project directory.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dataprog/http_api.hpp"
#include "dataprog/io.hpp"
#include "dataprog/project.hpp"
#include "httplib.h"

#ifndef DATAPROG_LFS_DIR
#define DATAPROG_LFS_DIR "lfs"
#endif

namespace {

using namespace dataprog;
using nlohmann::json;

struct Globals {
  std::string project = ".";
  std::uint64_t seed = 0;
  std::optional<double> threshold;
};

void print_diagnostics(const lf::ValidationReport& report) {
  for (const auto& d : report.diagnostics) std::cout << lf::format_diagnostic(d) << "\n";
}

std::optional<Split> optional_split(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_split(s);
}

SplitSpec parse_counts(const std::string& s) {
  SplitSpec spec;
  unsigned long a = 0, b = 0, c = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lu,%lu,%lu%c", &a, &b, &c, &tail) != 3) {
    throw InputError("--splits takes TRAIN,VALIDATION,TEST counts, e.g. 3919,492,485");
  }
  spec.train_count = a;
  spec.validation_count = b;
  spec.test_count = c;
  return spec;
}

int run(int argc, char** argv) {
  CLI::App app{"Weak-supervision labeling: LFs, label models, review and export"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--project,-p", g.project, "Project directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for splits and model fitting")->capture_default_str();
  app.add_option("--threshold", g.threshold, "Multi-label hardening threshold (default: project setting)")
      ->check(CLI::Range(0.0, 1.0));

  std::function<int()> action;

  auto* init = app.add_subcommand("init", "Create a project from the shipped LF manifests");
  std::string init_id = "project", init_lfs = DATAPROG_LFS_DIR;
  init->add_option("--id", init_id, "Project id")->capture_default_str();
  init->add_option("--lfs", init_lfs, "LF template directory (with manifests/)")->capture_default_str();
  init->callback([&] {
    action = [&] {
      Project::init(g.project, init_id, init_lfs);
      std::cout << "initialised project \"" << init_id << "\" in " << g.project << "\n";
      return 0;
    };
  });

  auto* ingest = app.add_subcommand("ingest", "Chunk raw articles, assign splits, write the corpus");
  std::string raw_path, split_counts;
  std::size_t max_tokens = kDefaultMaxTokens;
  ingest->add_option("raw", raw_path, "Raw articles, one JSON object {id, title, body, year?} per line")->required();
  ingest->add_option("--max-tokens", max_tokens, "Chunk size in whitespace tokens")->capture_default_str();
  ingest->add_option("--splits", split_counts, "TRAIN,VALIDATION,TEST chunk counts (default 80/10/10)");
  ingest->callback([&] {
    action = [&] {
      Project project(g.project);
      std::optional<SplitSpec> counts;
      if (!split_counts.empty()) counts = parse_counts(split_counts);
      const auto n = project.ingest(raw_path, max_tokens, counts, g.seed);
      std::cout << "ingested " << n << " documents (version " << project.version() << ")\n";
      return 0;
    };
  });

  auto* check = app.add_subcommand("lf-check", "Parse and validate LF manifests or standalone .lf files");
  std::string check_manifest;
  std::vector<std::string> check_files;
  check->add_option("--manifest", check_manifest, "Manifest to check (default: all)");
  check->add_option("files", check_files, "Standalone .lf files (no project needed)");
  check->callback([&] {
    action = [&] {
      std::size_t errors = 0;
      if (!check_files.empty()) {
        const std::vector<TaskSchema> schemas{tags_schema(), sentiment_schema()};
        std::map<Task, std::vector<LfSource>> by_task;
        for (const auto& f : check_files) {
          LfSource s{f, read_file(f)};
          try {
            by_task[lf::parse_lf_spec(s.source, schemas, f).task].push_back(std::move(s));
          } catch (const lf::ParseError& e) {
            std::cout << lf::format_diagnostic(e.diagnostic()) << "\n";
            ++errors;
          }
        }
        for (const auto& [task, mine] : by_task) {
          auto r = check_manifest_sources(task, mine);
          print_diagnostics(r.report);
          std::cout << to_string(task) << ": " << r.specs.size() << " LFs, " << r.report.error_count()
                    << " error(s), " << r.report.warning_count() << " warning(s)\n";
          errors += r.report.error_count();
        }
      } else {
        Project project(g.project);
        std::vector<std::string> names = project.manifest_names();
        if (!check_manifest.empty()) names = {check_manifest};
        for (const auto& name : names) {
          auto r = project.check_manifest(name);
          print_diagnostics(r.report);
          std::cout << name << ": " << r.specs.size() << " LFs, " << r.report.error_count() << " error(s), "
                    << r.report.warning_count() << " warning(s)\n";
          errors += r.report.error_count();
        }
      }
      return errors == 0 ? 0 : 1;
    };
  });

  auto* apply = app.add_subcommand("apply", "Run the staged pipeline and write label matrices");
  std::string apply_manifest;
  apply->add_option("--manifest", apply_manifest, "Sentiment manifest (name or version, e.g. v0)")->required();
  apply->callback([&] {
    action = [&] {
      Project project(g.project);
      const auto r = project.apply(project.resolve_manifest(Task::kSentiment, apply_manifest));
      std::cout << "tags: " << r.tags.rows() << " x " << r.tags.cols() << "\nsentiment: " << r.sentiment.rows()
                << " x " << r.sentiment.cols() << "\n";
      return 0;
    };
  });

  auto* analyze = app.add_subcommand("analyze", "Coverage, overlaps and conflicts of an LF set");
  std::string an_task = "sentiment", an_manifest;
  bool an_json = false;
  analyze->add_option("--task", an_task, "tags or sentiment")->capture_default_str();
  analyze->add_option("--manifest", an_manifest, "Manifest (name or version)");
  analyze->add_flag("--json", an_json, "Print the report as JSON");
  analyze->callback([&] {
    action = [&] {
      Project project(g.project);
      const Task task = parse_task(an_task);
      const std::string manifest = project.resolve_manifest(task, an_manifest);
      const auto report = project.analyze(task, manifest);
      if (an_json) {
        json out = report_to_json(report);
        if (task == Task::kTags) out["tag_density"] = project.tag_density();
        std::cout << out.dump(2) << "\n";
      } else {
        std::cout << "manifest " << manifest << " (" << report.rows << " documents)\n" << render_report_table(report);
        if (task == Task::kTags) std::printf("tag density %.2f%%\n", project.tag_density() * 100.0);
      }
      return 0;
    };
  });

  auto* fit = app.add_subcommand("fit", "Fit a label model on the current label matrix");
  std::string fit_task = "sentiment", fit_manifest, fit_model = "cm", fit_prior = "mv";
  TrainConfig cfg;
  fit->add_option("--task", fit_task, "tags or sentiment")->capture_default_str();
  fit->add_option("--manifest", fit_manifest, "Sentiment manifest (name or version)");
  fit->add_option("--model", fit_model, "mv or cm")->capture_default_str();
  fit->add_option("--prior", fit_prior, "Class prior: mv (estimated) or uniform")->capture_default_str();
  fit->add_option("--epochs", cfg.epochs)->capture_default_str();
  fit->add_option("--batch-size", cfg.batch_size)->capture_default_str();
  fit->add_option("--lr", cfg.learning_rate)->capture_default_str();
  fit->add_option("--l2", cfg.l2)->capture_default_str();
  fit->callback([&] {
    action = [&] {
      Project project(g.project);
      FitRequest req;
      req.task = parse_task(fit_task);
      if (req.task == Task::kSentiment) req.manifest = project.resolve_manifest(req.task, fit_manifest);
      req.model = parse_tag_model(fit_model);
      req.prior = parse_prior_mode(fit_prior);
      req.config = cfg;
      req.config.seed = g.seed;
      const auto rec = project.fit(req);
      std::cout << "model " << rec.id << " -> " << rec.path << " (matrix " << rec.fingerprint << ")\n";
      return 0;
    };
  });

  auto* predict = app.add_subcommand("predict", "Write soft and hard labels for every document");
  std::string pred_model;
  predict->add_option("--model", pred_model, "Model id, e.g. sentiment-v0-cm")->required();
  predict->callback([&] {
    action = [&] {
      Project project(g.project);
      const auto preds = project.predict(pred_model, g.threshold);
      std::cout << preds.size() << " predictions -> predictions/" << pred_model << ".jsonl\n";
      return 0;
    };
  });

  auto* eval = app.add_subcommand("eval", "Score a model against the gold set");
  std::string eval_model, eval_split;
  bool eval_json = false;
  eval->add_option("--model", eval_model, "Model id")->required();
  eval->add_option("--split", eval_split, "validation or test (default: all gold)");
  eval->add_flag("--json", eval_json, "Print the report as JSON");
  eval->callback([&] {
    action = [&] {
      Project project(g.project);
      const auto report = project.evaluate(eval_model, optional_split(eval_split), g.threshold);
      std::cout << (eval_json ? metrics_to_json(report).dump(2) + "\n" : render_metrics_table(report));
      return 0;
    };
  });

  auto* exp = app.add_subcommand("export", "Write a dataset file for one split");
  std::string exp_model, exp_split = "train", exp_labels = "soft";
  exp->add_option("--model", exp_model, "Model id")->required();
  exp->add_option("--split", exp_split, "train, validation or test")->capture_default_str();
  exp->add_option("--labels", exp_labels, "soft, hard or gold")->capture_default_str();
  exp->callback([&] {
    action = [&] {
      Project project(g.project);
      const Split split = parse_split(exp_split);
      const ExportKind kind = parse_export_kind(exp_labels);
      const auto content = project.export_dataset(exp_model, split, kind, g.threshold);
      const auto lines = std::count(content.begin(), content.end(), '\n');
      std::cout << lines << " records -> exports/" << exp_model << "-" << to_string(split) << "-" << to_string(kind)
                << ".jsonl\n";
      return 0;
    };
  });

  auto* review = app.add_subcommand("review", "Record a gold label for a validation or test document");
  std::string rv_doc, rv_task = "sentiment", rv_label, rv_reviewer;
  review->add_option("--doc", rv_doc, "Document id")->required();
  review->add_option("--task", rv_task, "tags or sentiment")->capture_default_str();
  review->add_option("--label", rv_label, "Class name, or comma-separated present tags")->required();
  review->add_option("--reviewer", rv_reviewer, "Reviewer name")->required();
  review->callback([&] {
    action = [&] {
      Project project(g.project);
      const Task task = parse_task(rv_task);
      json label = rv_label;
      if (task == Task::kTags) {
        label = json::object();
        for (const auto& t : tags_schema().labels) label[t] = false;
        std::size_t start = 0;
        while (start <= rv_label.size()) {
          const auto end = std::min(rv_label.find(',', start), rv_label.size());
          const std::string tag = rv_label.substr(start, end - start);
          if (!tag.empty()) {
            if (!tags_schema().index_of(tag)) throw InputError("unknown tag \"" + tag + "\"");
            label[tag] = true;
          }
          start = end + 1;
        }
      }
      const auto rec = project.review(rv_doc, task, label, rv_reviewer);
      std::cout << "recorded " << to_string(task) << " label for " << rec.doc_id << " (version "
                << project.version() << ")\n";
      return 0;
    };
  });

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->callback([&] {
    action = [&] {
      Project project(g.project);
      httplib::Server server;
      register_api(server, project);
      std::cout << "serving " << g.project << " on http://" << host << ":" << port << kApiPrefix << std::endl;
      if (!server.listen(host, port)) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return action();
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dataprog::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
