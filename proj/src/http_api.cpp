#include "dataprog/http_api.hpp"

#include <algorithm>
#include <string>

#include "dataprog/analysis.hpp"
#include "httplib.h"

namespace dataprog {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, json body, const Project& project) {
  if (!body.contains("version")) body["version"] = project.version();
  res.status = status;
  res.set_content(body.dump(), kJson);
}

json parse_body(const httplib::Request& req) {
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw InputError("request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw InputError(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::size_t query_size(const httplib::Request& req, const char* name, std::size_t fallback, std::size_t max) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty() || v[0] == '-') throw InputError(std::string("query parameter ") + name + " must be a non-negative integer");
  return std::min<std::size_t>(n, max);
}

std::optional<Split> query_split(const httplib::Request& req) {
  if (!req.has_param("split") || req.get_param_value("split").empty()) return std::nullopt;
  return parse_split(req.get_param_value("split"));
}

std::string require_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name) || req.get_param_value(name).empty()) {
    throw InputError(std::string("missing query parameter ") + name);
  }
  return req.get_param_value(name);
}

json document_json(const Document& d) {
  json j = document_to_json(d);
  j["input"] = render_input(d);
  return j;
}

json diagnostics_json(const lf::ValidationReport& report) {
  json out = json::array();
  for (const auto& d : report.diagnostics) {
    out.push_back({{"severity", d.severity == lf::Severity::kError ? "error" : "warning"},
                   {"code", d.code},
                   {"message", d.message},
                   {"line", d.line},
                   {"column", d.column},
                   {"source", d.source}});
  }
  return out;
}

json model_json(const ModelRecord& r) {
  return {{"id", r.id},
          {"task", std::string(to_string(r.task))},
          {"manifest", r.manifest},
          {"kind", std::string(to_string(r.kind))},
          {"fingerprint", r.fingerprint}};
}

TrainConfig config_from_request(const json& body) {
  return body.contains("config") ? config_from_json(body.at("config")) : TrainConfig{};
}

}  // namespace

void register_api(httplib::Server& server, Project& project) {
  const std::string p = kApiPrefix;

  server.set_exception_handler([&project](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const ConflictError& e) {
      send(res, 409, {{"error", e.what()}, {"version", e.current_version()}}, project);
    } catch (const PolicyError& e) {
      send(res, 403, {{"error", e.what()}}, project);
    } catch (const Error& e) {
      send(res, 400, {{"error", e.what()}}, project);
    } catch (const json::exception& e) {
      send(res, 400, {{"error", e.what()}}, project);
    } catch (const std::exception& e) {
      send(res, 500, {{"error", std::string("internal error: ") + e.what()}}, project);
    }
  });
  server.set_post_routing_handler([&project](const httplib::Request&, httplib::Response& res) {
    if (!res.has_header("X-Project-Version")) res.set_header("X-Project-Version", std::to_string(project.version()));
  });

  server.Get(p + "/project", [&project](const httplib::Request&, httplib::Response& res) {
    send(res, 200, project.summary(), project);
  });

  server.Get(p + "/documents", [&project](const httplib::Request& req, httplib::Response& res) {
    const auto split = query_split(req);
    const std::size_t offset = query_size(req, "offset", 0, SIZE_MAX);
    const std::size_t limit = query_size(req, "limit", 50, 1000);
    const long version = project.version();
    const auto docs = project.documents();
    json items = json::array();
    std::size_t total = 0;
    for (const auto& d : docs) {
      if (split && d.split != *split) continue;
      if (total >= offset && items.size() < limit) items.push_back(document_json(d));
      ++total;
    }
    send(res, 200, {{"version", version}, {"total", total}, {"offset", offset}, {"items", items}}, project);
  });

  server.Get(p + "/documents/:id", [&project](const httplib::Request& req, httplib::Response& res) {
    const auto& id = req.path_params.at("id");
    auto doc = project.document(id);
    if (!doc) return send(res, 404, {{"error", "unknown document \"" + id + "\""}}, project);
    send(res, 200, {{"document", document_json(*doc)}}, project);
  });

  server.Get(p + "/manifests", [&project](const httplib::Request&, httplib::Response& res) {
    json items = json::array();
    for (const auto& name : project.manifest_names()) {
      const auto m = project.manifest(name);
      items.push_back({{"name", m.name}, {"task", std::string(to_string(m.task))}, {"lfs", m.lfs.size()}});
    }
    send(res, 200, {{"manifests", items}, {"stage1", project.stage1_manifest()}}, project);
  });

  server.Get(p + "/manifests/:name", [&project](const httplib::Request& req, httplib::Response& res) {
    const auto& name = req.path_params.at("name");
    const long version = project.version();
    const auto m = project.manifest(name);
    json lfs = json::array();
    for (const auto& s : project.manifest_sources(name)) lfs.push_back({{"path", s.path}, {"source", s.source}});
    send(res, 200,
         {{"version", version},
          {"manifest", manifest_to_json(m)},
          {"lfs", lfs},
          {"diagnostics", diagnostics_json(project.check_manifest(name).report)}},
         project);
  });

  server.Put(p + "/manifests/:name", [&project](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    if (!body.contains("base_version")) throw InputError("missing base_version");
    std::vector<LfSource> sources;
    for (const auto& lf : body.at("lfs")) {
      sources.push_back({lf.at("path").get<std::string>(), lf.at("source").get<std::string>()});
    }
    const auto result = project.put_manifest(req.path_params.at("name"), body.at("base_version").get<long>(), sources);
    json out = {{"version", result.version}, {"diagnostics", diagnostics_json(result.report)}};
    if (!result.report.ok()) return send(res, 422, out, project);
    out["report"] = report_to_json(*result.analysis);
    if (result.tag_density) out["tag_density"] = *result.tag_density;
    send(res, 200, out, project);
  });

  server.Post(p + "/analysis", [&project](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const Task task = parse_task(body.at("task").get<std::string>());
    const long version = project.version();
    const std::string manifest = project.resolve_manifest(task, body.value("manifest", std::string()));
    json out = {{"version", version}, {"task", std::string(to_string(task))}, {"manifest", manifest},
                {"report", report_to_json(project.analyze(task, manifest))}};
    if (task == Task::kTags) out["tag_density"] = project.tag_density();
    send(res, 200, out, project);
  });

  server.Post(p + "/fit", [&project](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    FitRequest fr;
    fr.task = parse_task(body.at("task").get<std::string>());
    if (fr.task == Task::kSentiment) fr.manifest = project.resolve_manifest(fr.task, body.value("manifest", std::string()));
    fr.model = parse_tag_model(body.value("model", std::string("cm")));
    fr.prior = parse_prior_mode(body.value("prior", std::string("mv")));
    fr.config = config_from_request(body);
    const auto rec = project.fit(fr);
    send(res, 200, {{"model", model_json(rec)}}, project);
  });

  server.Post(p + "/predict", [&project](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto preds = project.predict(body.at("model").get<std::string>());
    send(res, 200, {{"model", body.at("model")}, {"count", preds.size()}}, project);
  });

  server.Get(p + "/models", [&project](const httplib::Request&, httplib::Response& res) {
    json items = json::array();
    for (const auto& r : project.models()) items.push_back(model_json(r));
    send(res, 200, {{"models", items}}, project);
  });

  server.Get(p + "/predictions", [&project](const httplib::Request& req, httplib::Response& res) {
    const std::string model_id = require_param(req, "model");
    const auto split = query_split(req);
    const std::size_t offset = query_size(req, "offset", 0, SIZE_MAX);
    const std::size_t limit = query_size(req, "limit", 50, 1000);
    const bool conflicted = req.has_param("conflicted") && req.get_param_value("conflicted") == "true";
    const long version = project.version();
    const auto rec = project.model(model_id);
    const auto preds = project.stored_predictions(model_id);
    if (preds.empty()) return send(res, 404, {{"error", "no predictions for \"" + model_id + "\"; run predict"}}, project);

    std::vector<bool> conflict_rows;
    if (conflicted) {
      const auto r = project.pipeline(rec.task == Task::kTags ? std::string() : rec.manifest);
      const auto& m = rec.task == Task::kTags ? r.tags : r.sentiment;
      conflict_rows.resize(m.rows());
      for (std::size_t i = 0; i < m.rows(); ++i) {
        int first = kAbstain;
        for (int v : m.row(i)) {
          if (v == kAbstain) continue;
          if (first == kAbstain) first = v;
          else if (v != first) conflict_rows[i] = true;
        }
      }
      if (conflict_rows.size() != preds.size()) throw ModelError("stored predictions are stale; run predict again");
    }
    const auto& schema = builtin_schema(rec.task);
    json items = json::array();
    std::size_t total = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto& pr = preds[i];
      if (split && pr.split != *split) continue;
      if (conflicted && !conflict_rows[i]) continue;
      if (total >= offset && items.size() < limit) {
        json item = {{"id", pr.soft.doc_id}, {"split", std::string(to_string(pr.split))}, {"probs", pr.soft.probs}};
        item[schema.mode == LabelMode::kMultiClass ? "label" : "labels"] = label_to_json(pr.hard, schema);
        if (auto g = project.gold().find(pr.soft.doc_id, rec.task)) item["gold"] = gold_to_json(*g);
        items.push_back(std::move(item));
      }
      ++total;
    }
    send(res, 200, {{"version", version}, {"model", model_id}, {"total", total}, {"offset", offset}, {"items", items}},
         project);
  });

  server.Post(p + "/reviews", [&project](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const std::string doc_id = body.at("doc_id").get<std::string>();
    if (!project.document(doc_id)) return send(res, 404, {{"error", "unknown document \"" + doc_id + "\""}}, project);
    const Task task = parse_task(body.at("task").get<std::string>());
    const json& label = body.contains("label") ? body.at("label") : body.at("labels");
    const auto record = project.review(doc_id, task, label, body.at("reviewer").get<std::string>());
    send(res, 200, {{"record", gold_to_json(record)}}, project);
  });

  server.Get(p + "/gold", [&project](const httplib::Request& req, httplib::Response& res) {
    const Task task = parse_task(require_param(req, "task"));
    json items = json::array();
    for (const auto& g : project.gold().records(task)) items.push_back(gold_to_json(g));
    send(res, 200, {{"task", std::string(to_string(task))}, {"items", items}}, project);
  });

  server.Get(p + "/export", [&project](const httplib::Request& req, httplib::Response& res) {
    const std::string model_id = require_param(req, "model");
    const Split split = parse_split(require_param(req, "split"));
    const ExportKind kind = parse_export_kind(req.has_param("labels") ? req.get_param_value("labels") : "soft");
    const long version = project.version();
    const std::string content = project.export_dataset(model_id, split, kind);
    res.set_header("X-Project-Version", std::to_string(version));
    res.set_content(content, "application/x-ndjson");
  });

  server.Get(p + "/eval", [&project](const httplib::Request& req, httplib::Response& res) {
    const std::string model_id = require_param(req, "model");
    const auto split = query_split(req);
    std::optional<double> threshold;
    if (req.has_param("threshold")) {
      try {
        threshold = std::stod(req.get_param_value("threshold"));
      } catch (const std::exception&) {
        throw InputError("threshold must be a number");
      }
    }
    const long version = project.version();
    const auto report = project.evaluate(model_id, split, threshold);
    send(res, 200, {{"version", version}, {"model", model_id}, {"metrics", metrics_to_json(report)}}, project);
  });
}

}  // namespace dataprog
