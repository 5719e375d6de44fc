#pragma once

// JSON-over-HTTP session API. SessionService::handle is transport-free so
// the protocol can be driven directly in tests; serve() binds it to a port.
//
//   GET  /engines                   list engines with their claimed features
//   POST /sessions                  {"dpi": text, "engine", "leading_k", "mode", "stop_probability"}
//   GET  /sessions/{id}             session state
//   GET  /sessions/{id}/query       pending (or next) measurement query
//   POST /sessions/{id}/answer      {"query_id": n, "answer": true | false | "skip"}
//   GET  /sessions/{id}/transcript  JSON lines, one per phase event
//   POST /oneshot                   {"dpi": text, "engine", "k", "order"}
//   POST /conformance               {"corpus_seed", "count", "components", "clause_budget", "format"}
//
// Errors: 400 invalid input or transition, 404 unknown session, 409 answer
// for a query that is not pending. Sessions live in memory only; nothing
// survives a restart except transcripts a client exported.

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "mbd/engines.hpp"
#include "mbd/error.hpp"
#include "mbd/io/dpi_format.hpp"
#include "mbd/io/json_io.hpp"
#include "mbd/sequential.hpp"
#include "mbd/taxonomy.hpp"

namespace mbd::io {

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class SessionService {
 public:
  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body) {
    try {
      return route(method, path, body);
    } catch (const NotFound& e) {
      return error(404, e.what());
    } catch (const StaleQueryError& e) {
      return error(409, e.what());
    } catch (const ParseError& e) {
      return {400, nlohmann::json{{"error", e.what()}, {"kind", "parse"}, {"line", e.line()}, {"column", e.column()}}.dump()};
    } catch (const SemanticError& e) {
      return {400, nlohmann::json{{"error", e.what()}, {"kind", "semantic"}, {"line", e.line()}}.dump()};
    } catch (const nlohmann::json::exception& e) {
      return error(400, std::string("malformed request: ") + e.what());
    } catch (const Error& e) {
      return error(400, e.what());
    }
  }

  std::size_t session_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

 private:
  struct NotFound : Error {
    using Error::Error;
  };

  // One lock per session serializes its transitions; different sessions
  // proceed in parallel.
  struct Entry {
    std::mutex mutex;
    std::optional<sequential::Session> session;
  };

  static HttpResponse error(int status, const std::string& message) {
    return {status, nlohmann::json{{"error", message}}.dump()};
  }

  static HttpResponse ok(const nlohmann::json& j, int status = 200) { return {status, j.dump()}; }

  static nlohmann::json parse_body(const std::string& body) {
    if (body.empty()) return nlohmann::json::object();
    auto j = nlohmann::json::parse(body);
    if (!j.is_object()) throw PreconditionError("request body must be a JSON object");
    return j;
  }

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
    return it->second;
  }

  HttpResponse route(const std::string& method, const std::string& path, const std::string& body) {
    static const std::regex session_re(R"(^/sessions/([A-Za-z0-9_-]+)(/(query|answer|transcript))?$)");
    if (method == "GET" && path == "/engines") return list_engines();
    if (method == "POST" && path == "/sessions") return create_session(parse_body(body));
    if (method == "POST" && path == "/oneshot") return oneshot(parse_body(body));
    if (method == "POST" && path == "/conformance") return conformance(parse_body(body));
    std::smatch m;
    if (std::regex_match(path, m, session_re)) {
      const std::string id = m[1];
      const std::string action = m[3];
      if (method == "GET" && action.empty()) return get_state(id);
      if (method == "GET" && action == "query") return get_query(id);
      if (method == "POST" && action == "answer") return post_answer(id, parse_body(body));
      if (method == "GET" && action == "transcript") return get_transcript(id);
    }
    throw NotFound("no route for " + method + " " + path);
  }

  static HttpResponse list_engines() {
    nlohmann::json out = nlohmann::json::array();
    for (auto e : kAllEngines) {
      const auto v = taxonomy::claimed_vector(e);
      nlohmann::json cells = nlohmann::json::object();
      for (std::size_t f = 0; f < taxonomy::kFeatureCount; ++f) {
        cells[taxonomy::kColumnNames[f]] = taxonomy::cell_text(v, static_cast<taxonomy::Feature>(f));
      }
      out.push_back({{"id", std::string(to_string(e))}, {"claimed", v}, {"cells", cells}});
    }
    return ok({{"format_version", kJsonFormatVersion}, {"engines", out}});
  }

  HttpResponse create_session(const nlohmann::json& req) {
    const auto doc = parse_dpi(req.at("dpi").get<std::string>());
    sequential::SessionConfig cfg;
    if (req.contains("engine")) cfg.engine = parse_engine_id(req["engine"].get<std::string>());
    if (req.contains("leading_k")) cfg.leading_k = req["leading_k"].get<std::size_t>();
    if (req.contains("mode")) cfg.mode = sequential::parse_mode(req["mode"].get<std::string>());
    if (req.contains("stop_probability")) {
      cfg.stop_probability = req["stop_probability"].is_null() ? std::nullopt
                                                               : std::optional<double>(req["stop_probability"].get<double>());
    }
    DpllOracle oracle;
    auto entry = std::make_shared<Entry>();
    entry->session = sequential::start_session(doc.dpi, doc.rates_or_default(), cfg, oracle);
    const std::string id = "s" + std::to_string(++next_id_);
    {
      std::lock_guard lock(mutex_);
      sessions_[id] = entry;
    }
    auto state = sequential::state_json(*entry->session);
    return ok({{"session_id", id}, {"state", state}}, 201);
  }

  HttpResponse get_state(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return ok(sequential::state_json(*entry->session));
  }

  HttpResponse get_query(const std::string& id) {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    DpllOracle oracle;
    auto& s = *entry->session;
    const auto q = sequential::next_query(s, oracle);
    return ok({{"query", q ? sequential::query_json(s, *q) : nlohmann::json(nullptr)}, {"state", sequential::state_json(s)}});
  }

  HttpResponse post_answer(const std::string& id, const nlohmann::json& req) {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    auto& s = *entry->session;
    const auto query_id = req.at("query_id").get<std::uint64_t>();
    if (!s.pending || s.pending->id != query_id) {
      throw StaleQueryError("query " + std::to_string(query_id) + " is not the pending query");
    }
    const auto& answer = req.at("answer");
    DpllOracle oracle;
    if (answer.is_boolean()) {
      entry->session = sequential::ingest_answer(s, *s.pending, answer.get<bool>(), oracle);
    } else if (answer == "skip") {
      entry->session = sequential::skip_query(s, *s.pending);
    } else {
      throw PreconditionError("answer must be true, false or \"skip\"");
    }
    return ok(sequential::state_json(*entry->session));
  }

  HttpResponse get_transcript(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return {200, sequential::transcript_text(*entry->session), "application/x-ndjson"};
  }

  static HttpResponse oneshot(const nlohmann::json& req) {
    const auto doc = parse_dpi(req.at("dpi").get<std::string>());
    const EngineId engine = parse_engine_id(req.value("engine", std::string("hs_tree")));
    std::optional<std::size_t> k;
    if (req.contains("k")) k = req["k"].is_string() ? parse_k(req["k"].get<std::string>()) : parse_k(std::to_string(req["k"].get<long long>()));
    std::optional<DiagnosisOrder> order;
    if (req.contains("order")) order = parse_order(req["order"].get<std::string>());
    DpllOracle oracle;
    return ok(result_json(doc.dpi, engine, diagnose(doc.dpi, engine, k, order, doc.rates_or_default(), oracle)));
  }

  static HttpResponse conformance(const nlohmann::json& req) {
    CorpusSpec spec;
    spec.seed = req.value("corpus_seed", spec.seed);
    spec.count = req.value("count", spec.count);
    spec.n_components = req.value("components", spec.n_components);
    spec.clause_budget = req.value("clause_budget", spec.clause_budget);
    const auto format = taxonomy::parse_table_format(req.value("format", std::string("json")));
    const auto corpus = taxonomy::prepare_corpus(spec);
    const auto report = taxonomy::run_conformance(corpus, {kAllEngines.begin(), kAllEngines.end()});
    const char* type = format == taxonomy::TableFormat::Json ? "application/json"
                       : format == taxonomy::TableFormat::Csv ? "text/csv"
                                                              : "text/markdown";
    return {200, taxonomy::emit_table(report, format), type};
  }

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::atomic<std::uint64_t> next_id_{0};
};

// Binds the service to 0.0.0.0:port (0 picks a free port) with permissive
// CORS. Blocks until the server stops; `ready` gets the bound port.
inline bool serve(SessionService& service, int port,
                  const std::function<void(httplib::Server&, int)>& ready = {}) {
  httplib::Server server;
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  if (port == 0) {
    port = server.bind_to_any_port("0.0.0.0");
    if (port <= 0) return false;
  } else if (!server.bind_to_port("0.0.0.0", port)) {
    return false;
  }
  if (ready) ready(server, port);
  return server.listen_after_bind();
}

}  // namespace mbd::io
