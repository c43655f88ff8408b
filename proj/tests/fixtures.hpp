#ifndef SATURACHASE_TESTS_FIXTURES_HPP
#define SATURACHASE_TESTS_FIXTURES_HPP

#include <string>

#include "saturachase/egraph.hpp"
#include "saturachase/term.hpp"

namespace saturachase::testing {

inline Signature sig_fg2a() {
  Signature s;
  s.add("f", 2);
  s.add("g", 2);
  s.add("a", 0);
  return s;
}

/// The 8th power of f over a.
inline Term power_term() {
  Term a("a");
  Term faa("f", {a, a});
  Term f4("f", {faa, faa});
  return Term("f", {f4, f4});
}

/// The four-class chain E-graph representing the power term.
inline EGraph chain_egraph() {
  auto [a, root] = flatten(sig_fg2a(), power_term());
  (void)root;
  return rebuild(a).egraph;
}

/// The saturated version: each class also holds the g-node.
inline EGraph saturated_chain_egraph() {
  Automaton a = parse_egraph_file(
      "a() -> c1\n"
      "f(c1,c1) -> c2\ng(c1,c1) -> c2\n"
      "f(c2,c2) -> c3\ng(c2,c2) -> c3\n"
      "f(c3,c3) -> c4\ng(c3,c3) -> c4\n",
      sig_fg2a());
  return rebuild(a).egraph;
}

/// The rebuilding example: a, b constants, unary f, binary g.
inline Automaton rebuilding_example() {
  return parse_egraph_file(
      "a() -> ca\n"
      "b() -> cb\n"
      "f(ca) -> cf\n"
      "g(cb,cf) -> cg\n");
}

/// The cyclic E-graph on which the commuting rule diverges.
inline EGraph cyclic_egraph() {
  Signature s;
  s.add("f", 1);
  s.add("g", 1);
  s.add("a", 0);
  Automaton a = parse_egraph_file(
      "a() -> cf\n"
      "g(cf) -> cg\n"
      "f(cg) -> cf\n",
      s);
  return rebuild(a).egraph;
}

}  // namespace saturachase::testing

#endif
