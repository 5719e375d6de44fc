#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "mbd/engines.hpp"
#include "mbd/io/corpus.hpp"

namespace mbd::io {

// One CSV row per (engine, instance): work counters of a k=all run.
inline std::string run_bench(const CorpusSpec& spec, const std::vector<EngineId>& engines) {
  std::ostringstream out;
  out << "engine,instance,components,diagnoses,oracle_calls,nodes_expanded,peak_live_nodes,wall_steps\n";
  const auto corpus = generate_corpus(spec);
  for (auto e : engines) {
    for (const auto& inst : corpus) {
      DpllOracle oracle;
      const auto r = make_runner(e)(inst.dpi, DiagnosisQuery::all(), inst.rates, oracle);
      out << to_string(e) << ',' << inst.dpi.name() << ',' << inst.dpi.size() << ',' << r.diagnoses.size() << ','
          << r.stats.oracle_calls << ',' << r.stats.nodes_expanded << ',' << r.stats.peak_live_nodes << ','
          << r.stats.wall_steps << "\n";
    }
  }
  return out.str();
}

}  // namespace mbd::io
