// mbdiag: command-line front end. Exit status 0 ok, 1 domain error, 2 usage.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mbd/engines.hpp"
#include "mbd/error.hpp"
#include "mbd/io/bench.hpp"
#include "mbd/io/corpus.hpp"
#include "mbd/io/dpi_format.hpp"
#include "mbd/io/json_io.hpp"
#include "mbd/io/service.hpp"
#include "mbd/sequential.hpp"
#include "mbd/taxonomy.hpp"

namespace {

using namespace mbd;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ComponentSet parse_component_list(const Dpi& dpi, const std::string& text) {
  ComponentSet out;
  std::stringstream in(text);
  std::string name;
  while (std::getline(in, name, ',')) {
    const auto b = name.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    name = name.substr(b, name.find_last_not_of(" \t") - b + 1);
    const auto id = dpi.find_component(name);
    if (!id) throw PreconditionError("unknown component '" + name + "'");
    out.insert(*id);
  }
  return out;
}

std::vector<EngineId> parse_engine_list(const std::string& text) {
  if (text == "all") return {kAllEngines.begin(), kAllEngines.end()};
  std::vector<EngineId> out;
  std::stringstream in(text);
  std::string name;
  while (std::getline(in, name, ',')) out.push_back(parse_engine_id(name));
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

std::string table_line(const Dpi& dpi, const std::vector<ComponentSet>& sets) {
  std::string out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (i) out += "; ";
    out += dpi.set_to_string(sets[i]);
  }
  return out;
}

struct DiagnoseArgs {
  std::string file;
  std::string engine = "hs_tree";
  std::string k = "all";
  std::string order;
  std::string format = "table";
};

int run_diagnose(const DiagnoseArgs& a) {
  const auto doc = io::load_dpi_file(a.file);
  const auto engine = parse_engine_id(a.engine);
  std::optional<DiagnosisOrder> order;
  if (!a.order.empty()) order = io::parse_order(a.order);
  DpllOracle oracle;
  const auto r = io::diagnose(doc.dpi, engine, io::parse_k(a.k), order, doc.rates_or_default(), oracle);
  if (a.format == "json") {
    std::cout << io::result_json(doc.dpi, engine, r).dump(2) << "\n";
  } else {
    std::cout << table_line(doc.dpi, r.diagnoses) << "\n";
  }
  return 0;
}

struct ConformanceArgs {
  io::CorpusSpec spec{60, 7, 14, 42};
  std::string out = "markdown";
  std::string engines = "all";
  std::size_t threads = 0;
  std::string output_file;
};

int run_conformance(const ConformanceArgs& a) {
  const auto format = taxonomy::parse_table_format(a.out);
  const std::size_t threads = a.threads ? a.threads : taxonomy::detail::default_threads();
  const auto corpus = taxonomy::prepare_corpus(a.spec, threads);
  taxonomy::CheckOptions options;
  options.threads = threads;
  const auto report = taxonomy::run_conformance(corpus, parse_engine_list(a.engines), options);
  const auto text = taxonomy::emit_table(report, format);
  if (a.output_file.empty()) {
    std::cout << text;
  } else {
    write_file(a.output_file, text);
  }
  for (const auto& row : report.engines) {
    for (std::size_t f = 0; f < taxonomy::kFeatureCount; ++f) {
      const auto& ev = row.evidence[f];
      if (ev.outcome == taxonomy::Outcome::Fail) {
        std::cerr << "FAIL " << to_string(row.engine) << " " << taxonomy::kColumnNames[f] << ": " << ev.detail << "\n";
      }
    }
  }
  return report.failures() == 0 ? 0 : 1;
}

struct SessionArgs {
  std::string file;
  std::string simulate;
  bool interactive = false;
  std::string engine = "hs_tree";
  std::size_t leading_k = sequential::kDefaultLeadingK;
  std::string mode = "stateless";
  std::string stop_probability = "0.95";
  std::string transcript_file;
};

sequential::SessionConfig session_config(const SessionArgs& a) {
  sequential::SessionConfig cfg;
  cfg.engine = parse_engine_id(a.engine);
  cfg.leading_k = a.leading_k;
  cfg.mode = sequential::parse_mode(a.mode);
  if (a.stop_probability == "none") {
    cfg.stop_probability = std::nullopt;
  } else {
    try {
      std::size_t pos = 0;
      cfg.stop_probability = std::stod(a.stop_probability, &pos);
      if (pos != a.stop_probability.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("--stop-probability expects a number or 'none'");
    }
  }
  return cfg;
}

void print_outcome(const sequential::Session& s, std::ostream& out) {
  out << "status: " << to_string(s.status) << " (" << to_string(s.reason) << ")\n";
  if (s.final_diagnosis) out << "diagnosis: " << s.dpi.set_to_string(*s.final_diagnosis) << "\n";
  out << "leading: " << table_line(s.dpi, s.leading) << "\n";
  out << "measurements: " << s.history.size() << "\n";
}

int run_session(const SessionArgs& a) {
  if (a.interactive == !a.simulate.empty()) throw UsageError("session needs exactly one of --simulate or --interactive");
  const auto doc = io::load_dpi_file(a.file);
  const auto cfg = session_config(a);
  DpllOracle oracle;
  sequential::Session s;
  if (!a.simulate.empty()) {
    const auto gt = parse_component_list(doc.dpi, a.simulate);
    s = sequential::run_simulated_session(doc.dpi, gt, cfg.engine, doc.rates_or_default(), oracle, cfg);
    if (a.transcript_file.empty()) {
      std::cout << sequential::transcript_text(s);
    } else {
      write_file(a.transcript_file, sequential::transcript_text(s));
      print_outcome(s, std::cout);
    }
    return 0;
  }

  s = sequential::start_session(doc.dpi, doc.rates_or_default(), cfg, oracle);
  while (auto q = sequential::next_query(s, oracle)) {
    std::cout << "leading: " << table_line(s.dpi, s.leading) << "\n";
    std::cout << "query " << q->id << ": is " << q->atom << " true?  yes keeps " << table_line(s.dpi, q->yes)
              << "; no keeps " << table_line(s.dpi, q->no) << "\n";
    std::optional<char> reply;
    std::string line;
    while (!reply) {
      std::cout << "[y/n/s] " << std::flush;
      if (!std::getline(std::cin, line)) throw Error("input ended before the session finished");
      if (line == "y" || line == "yes") reply = 'y';
      if (line == "n" || line == "no") reply = 'n';
      if (line == "s" || line == "skip") reply = 's';
    }
    if (*reply == 's') {
      s = sequential::skip_query(s, *q);
    } else {
      s = sequential::ingest_answer(s, *q, *reply == 'y', oracle);
    }
  }
  print_outcome(s, std::cout);
  if (!a.transcript_file.empty()) write_file(a.transcript_file, sequential::transcript_text(s));
  return 0;
}

struct BenchArgs {
  io::CorpusSpec spec{20, 8, 16, 42};
  std::string engines = "all";
};

int run_bench(const BenchArgs& a) {
  std::cout << io::run_bench(a.spec, parse_engine_list(a.engines));
  return 0;
}

int run_serve(int port) {
  io::SessionService service;
  const bool ok = io::serve(service, port, [](httplib::Server&, int bound) {
    std::cerr << "listening on port " << bound << std::endl;
  });
  if (!ok) throw Error("cannot listen on port " + std::to_string(port));
  return 0;
}

void add_corpus_options(CLI::App* cmd, io::CorpusSpec& spec) {
  cmd->add_option("--corpus-seed", spec.seed, "corpus seed");
  cmd->add_option("--count", spec.count, "number of instances");
  cmd->add_option("--components", spec.n_components, "components per instance");
  cmd->add_option("--budget", spec.clause_budget, "behaviors plus observations per instance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model-based diagnosis workbench"};
  app.require_subcommand(1);

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "compute diagnoses of a .dpi file");
  diagnose->add_option("file", diag.file, "DPI file")->required();
  diagnose->add_option("--engine", diag.engine, "hs_tree, ucs_hs_tree, inv_hs_tree, greedy_heuristic, brute_force");
  diagnose->add_option("--k", diag.k, "number of diagnoses or 'all'");
  diagnose->add_option("--order", diag.order, "cardinality, probability or none");
  diagnose->add_option("--format", diag.format, "table or json")->check(CLI::IsMember({"table", "json"}));

  ConformanceArgs conf;
  auto* conformance = app.add_subcommand("conformance", "check engines against their claimed features");
  add_corpus_options(conformance, conf.spec);
  conformance->add_option("--out", conf.out, "markdown, csv or json")->check(CLI::IsMember({"markdown", "md", "csv", "json"}));
  conformance->add_option("--engines", conf.engines, "comma-separated engine ids or 'all'");
  conformance->add_option("--threads", conf.threads, "worker threads (0 = hardware)");
  conformance->add_option("-o,--output", conf.output_file, "write the report to a file");

  SessionArgs sess;
  auto* session = app.add_subcommand("session", "sequential diagnosis with measurements");
  session->add_option("file", sess.file, "DPI file")->required();
  session->add_option("--simulate", sess.simulate, "ground-truth faulty components, e.g. c2,c3");
  session->add_flag("--interactive", sess.interactive, "answer queries on standard input");
  session->add_option("--engine", sess.engine, "engine computing leading diagnoses");
  session->add_option("--leading-k", sess.leading_k, "leading diagnoses per step (>= 2)");
  session->add_option("--mode", sess.mode, "stateless or stateful")->check(CLI::IsMember({"stateless", "stateful"}));
  session->add_option("--stop-probability", sess.stop_probability, "probability threshold or 'none'");
  session->add_option("--transcript", sess.transcript_file, "write the JSON-lines transcript here");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "per-engine work counters as CSV");
  add_corpus_options(bench_cmd, bench.spec);
  bench_cmd->add_option("--engines", bench.engines, "comma-separated engine ids or 'all'");

  int port = 8080;
  auto* serve = app.add_subcommand("serve", "start the HTTP session service");
  serve->add_option("--port", port, "TCP port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*diagnose) return run_diagnose(diag);
    if (*conformance) return run_conformance(conf);
    if (*session) return run_session(sess);
    if (*bench_cmd) return run_bench(bench);
    if (*serve) return run_serve(port);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
