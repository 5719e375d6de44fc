#pragma once

#include "mbd/dpi.hpp"
#include "mbd/sentence.hpp"

namespace mbd::testing {

// c1 -> A, c2 -> (A -> B), c3 -> (B -> C), OBS = {!C}
inline Dpi dpi1() {
  return Dpi({"c1", "c2", "c3"}, {atom("A"), implies(atom("A"), atom("B")), implies(atom("B"), atom("C"))}, {},
             {neg(atom("C"))}, {}, "dpi1");
}

// c1 -> A, c2 -> !A, c3 -> (A -> B), OBS = {!B}
inline Dpi dpi2() {
  return Dpi({"c1", "c2", "c3"}, {atom("A"), neg(atom("A")), implies(atom("A"), atom("B"))}, {}, {neg(atom("B"))}, {},
             "dpi2");
}

// Observations agree with the all-ok prediction.
inline Dpi consistent_dpi() {
  return Dpi({"c1", "c2"}, {atom("A"), implies(atom("A"), atom("B"))}, {}, {atom("B")}, {}, "consistent");
}

inline const char* dpi2_text() {
  return "DPI dpi2\n"
         "COMPONENTS\n"
         "  c1 c2 c3\n"
         "BEHAVIOR\n"
         "  c1: A\n"
         "  c2: !A\n"
         "  c3: A -> B\n"
         "OBS\n"
         "  !B\n"
         "RATES\n"
         "  c1: 0.1\n"
         "  c2: 0.3\n"
         "  c3: 0.3\n";
}

inline const char* dpi1_text() {
  return "DPI dpi1\n"
         "COMPONENTS\n"
         "  c1 c2 c3\n"
         "BEHAVIOR\n"
         "  c1: A\n"
         "  c2: A -> B\n"
         "  c3: B -> C\n"
         "OBS\n"
         "  !C\n";
}

}  // namespace mbd::testing
