#pragma once

// Line-oriented `.dpi` text format.
//
//   # comment                      (anywhere; '#' to end of line)
//   DPI <name>                     (optional, first directive)
//   COMPONENTS
//     c1 c2, c3                    (names separated by spaces and/or commas)
//   BEHAVIOR
//     c1: <sentence>               (exactly one per component: BEH(c1))
//   BACKGROUND | OBS | MEAS
//     <sentence>                   (one per line)
//   RATES
//     c1: 0.01                     (optional; all or none, each in (0,1))
//
// Section keywords stand alone on their line. Identifiers match
// [A-Za-z_][A-Za-z0-9_]*; `true`, `false` and the section keywords are not
// atom names. Sentence syntax is described in sentence_syntax.hpp.

#include <array>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mbd/dpi.hpp"
#include "mbd/error.hpp"
#include "mbd/io/sentence_syntax.hpp"
#include "mbd/predicates.hpp"
#include "mbd/reasoner.hpp"

namespace mbd::io {

struct DpiDocument {
  Dpi dpi;
  std::optional<FailureRates> rates;

  FailureRates rates_or_default() const { return rates ? *rates : FailureRates::uniform(dpi.size(), kDefaultFailureRate); }
};

namespace detail {

enum class Section { None, Components, Behavior, Background, Obs, Meas, Rates };

inline constexpr std::array<std::pair<std::string_view, Section>, 6> kSections = {{
    {"COMPONENTS", Section::Components},
    {"BEHAVIOR", Section::Behavior},
    {"BACKGROUND", Section::Background},
    {"OBS", Section::Obs},
    {"MEAS", Section::Meas},
    {"RATES", Section::Rates},
}};

inline std::optional<Section> section_keyword(std::string_view word) {
  for (auto [name, section] : kSections) {
    if (name == word) return section;
  }
  return std::nullopt;
}

inline std::string_view trim(std::string_view s, std::size_t* leading = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (leading) *leading = b;
  return s.substr(b, e - b);
}

inline std::string format_rate(double p) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), p);
  return std::string(buf.data(), end);
}

struct Keyed {
  std::string key;
  std::string_view value;
  std::size_t value_column;
};

}  // namespace detail

// Parses and validates a document. The no-diagnosis check uses the built-in
// checker.
inline DpiDocument parse_dpi(std::string_view text) {
  using detail::Section;
  std::string name;
  std::vector<std::string> names;
  std::map<std::string, std::size_t> name_line;
  std::map<std::string, std::pair<Sentence, std::size_t>> behavior;
  std::map<std::string, std::pair<double, std::size_t>> rates;
  std::vector<Sentence> background, obs, meas;
  Section section = Section::None;
  bool seen_directive = false;
  bool seen_rates = false;

  auto check_atoms = [](const Sentence& s, std::size_t line) {
    for (const auto& a : s.atoms()) {
      if (detail::section_keyword(a)) throw ParseError("'" + a + "' is a section keyword, not an atom", line, 1);
    }
  };

  auto split_keyed = [](std::string_view body, std::size_t line, std::size_t column) {
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected '<component>: ...'", line, column);
    const auto key = detail::trim(body.substr(0, colon));
    if (!is_identifier(key)) throw ParseError("invalid component name '" + std::string(key) + "'", line, column);
    std::size_t lead = 0;
    const auto value = detail::trim(body.substr(colon + 1), &lead);
    return detail::Keyed{std::string(key), value, column + colon + 1 + lead};
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    std::string_view raw = text.substr(start, stop - start);
    start = stop + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::size_t lead = 0;
    const std::string_view body = detail::trim(raw, &lead);
    const std::size_t column = lead + 1;
    if (body.empty()) {
      if (stop == text.size()) break;
      continue;
    }

    if (auto kw = detail::section_keyword(body)) {
      section = *kw;
      seen_directive = true;
      if (section == Section::Rates) seen_rates = true;
    } else if (body.substr(0, 4) == "DPI " || body == "DPI") {
      if (seen_directive) throw ParseError("DPI header must come first", line_no, column);
      seen_directive = true;
      name = std::string(detail::trim(body.substr(3)));
      if (!name.empty() && !is_identifier(name)) throw ParseError("invalid DPI name", line_no, column + 4);
    } else {
      switch (section) {
        case Section::None: throw ParseError("content outside of a section", line_no, column);
        case Section::Components: {
          std::size_t i = 0;
          while (i < body.size()) {
            while (i < body.size() && (body[i] == ',' || std::isspace(static_cast<unsigned char>(body[i])))) ++i;
            const std::size_t b = i;
            while (i < body.size() && body[i] != ',' && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            if (b == i) break;
            const std::string comp(body.substr(b, i - b));
            if (!is_identifier(comp)) throw ParseError("invalid component name '" + comp + "'", line_no, column + b);
            if (name_line.contains(comp)) throw SemanticError("duplicate component '" + comp + "'", line_no);
            name_line[comp] = line_no;
            names.push_back(comp);
          }
          break;
        }
        case Section::Behavior: {
          const auto kv = split_keyed(body, line_no, column);
          if (!name_line.contains(kv.key)) throw SemanticError("behavior for unknown component '" + kv.key + "'", line_no);
          if (behavior.contains(kv.key)) throw SemanticError("second behavior for component '" + kv.key + "'", line_no);
          Sentence s = parse_sentence(kv.value, line_no, kv.value_column - 1);
          check_atoms(s, line_no);
          behavior.emplace(kv.key, std::make_pair(std::move(s), line_no));
          break;
        }
        case Section::Background:
        case Section::Obs:
        case Section::Meas: {
          Sentence s = parse_sentence(body, line_no, column - 1);
          check_atoms(s, line_no);
          (section == Section::Background ? background : section == Section::Obs ? obs : meas).push_back(std::move(s));
          break;
        }
        case Section::Rates: {
          const auto kv = split_keyed(body, line_no, column);
          if (!name_line.contains(kv.key)) throw SemanticError("rate for unknown component '" + kv.key + "'", line_no);
          if (rates.contains(kv.key)) throw SemanticError("second rate for component '" + kv.key + "'", line_no);
          double p = 0.0;
          const auto* first = kv.value.data();
          const auto* last = first + kv.value.size();
          auto [ptr, ec] = std::from_chars(first, last, p);
          if (ec != std::errc{} || ptr != last) throw ParseError("expected a number", line_no, kv.value_column);
          if (!(p > 0.0 && p < 1.0)) {
            throw SemanticError("failure rate of '" + kv.key + "' must lie strictly inside (0,1)", line_no);
          }
          rates.emplace(kv.key, std::make_pair(p, line_no));
          break;
        }
      }
    }
    if (stop == text.size()) break;
  }

  if (names.empty()) throw SemanticError("no components declared");
  std::vector<Sentence> behaviors;
  for (const auto& n : names) {
    auto it = behavior.find(n);
    if (it == behavior.end()) throw SemanticError("component '" + n + "' has no behavior", name_line[n]);
    behaviors.push_back(it->second.first);
  }
  std::optional<FailureRates> parsed_rates;
  if (seen_rates) {
    std::vector<double> values;
    for (const auto& n : names) {
      auto it = rates.find(n);
      if (it == rates.end()) throw SemanticError("component '" + n + "' has no failure rate");
      values.push_back(it->second.first);
    }
    parsed_rates = FailureRates(std::move(values));
  }

  DpiDocument doc{Dpi(names, std::move(behaviors), std::move(background), std::move(obs), std::move(meas), name),
                  std::move(parsed_rates)};
  DpllOracle oracle;
  try {
    require_diagnosable(doc.dpi, oracle);
  } catch (const NoDiagnosisError& e) {
    throw SemanticError(e.what());
  }
  return doc;
}

inline std::string print_dpi(const Dpi& dpi, const std::optional<FailureRates>& rates = std::nullopt) {
  std::ostringstream out;
  if (!dpi.name().empty()) out << "DPI " << dpi.name() << "\n";
  out << "COMPONENTS\n ";
  for (const auto& c : dpi.components()) out << ' ' << c.name;
  out << "\nBEHAVIOR\n";
  for (const auto& c : dpi.components()) out << "  " << c.name << ": " << dpi.behavior(c.id) << "\n";
  auto section = [&out](const char* title, const std::vector<Sentence>& items) {
    if (items.empty()) return;
    out << title << "\n";
    for (const auto& s : items) out << "  " << s << "\n";
  };
  section("BACKGROUND", dpi.background());
  section("OBS", dpi.obs());
  section("MEAS", dpi.meas());
  if (rates) {
    out << "RATES\n";
    for (const auto& c : dpi.components()) out << "  " << c.name << ": " << detail::format_rate((*rates)[c.id]) << "\n";
  }
  return out.str();
}

inline std::string print_dpi(const DpiDocument& doc) { return print_dpi(doc.dpi, doc.rates); }

inline DpiDocument load_dpi_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file '" + path + "': file not found or unreadable");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dpi(buf.str());
}

}  // namespace mbd::io
