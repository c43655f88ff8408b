#ifndef SATURACHASE_ACYCLICITY_HPP
#define SATURACHASE_ACYCLICITY_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saturachase/chase.hpp"
#include "saturachase/term.hpp"

namespace saturachase {

/// An argument slot (f, i) of a function symbol, 1-based.
struct Position {
  std::string symbol;
  int index = 0;

  std::string str() const { return "(" + symbol + "," + std::to_string(index) + ")"; }
  friend auto operator<=>(const Position&, const Position&) = default;
};

struct WtdEdge {
  Position src;
  Position dst;
  bool special = false;

  friend auto operator<=>(const WtdEdge&, const WtdEdge&) = default;
};

/// The weak term dependency graph: all positions of the signature as
/// nodes, normal and special edges from the two clauses of the
/// definition.
struct WtdGraph {
  std::vector<Position> nodes;
  std::set<WtdEdge> edges;
};

/// All (f, i) such that `sub` sits at slot i of an f-application inside
/// `p` (syntactic equality of sub-patterns).
std::set<Position> positions_of(const Pattern& p, const Pattern& sub);

/// Replaces each degenerate rule x -> rhs by one rule per symbol,
/// substituting f(x1,...,xn) for x on both sides.
Trs expand_degenerate(const Trs& trs);

/// Builds the weak term dependency graph; the TRS must have no
/// degenerate rules (expand first).
WtdGraph build_wtdg(const Trs& trs);

struct AcyclicityResult {
  bool acyclic = false;
  /// A cycle through a special edge when not acyclic, as a closed walk.
  std::vector<WtdEdge> witness;
};

/// Weak term acyclicity: no cycle of the WTDG contains a special edge.
/// Degenerate rules are expanded internally.
AcyclicityResult is_weakly_term_acyclic(const Trs& trs);

/// Classic weak acyclicity of a dependency set over (relation, index)
/// positions; EGDs do not contribute edges.
bool is_weakly_acyclic_deps(const std::vector<Dependency>& deps);

std::string wtdg_to_dot(const WtdGraph& g);
std::string format_witness(const std::vector<WtdEdge>& cycle);

}  // namespace saturachase

#endif  // SATURACHASE_ACYCLICITY_HPP
