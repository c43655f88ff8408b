#ifndef SATURACHASE_EQSAT_HPP
#define SATURACHASE_EQSAT_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "saturachase/egraph.hpp"
#include "saturachase/term.hpp"

namespace saturachase {

/// One E-match: lhs[subst] ->* root in the matched E-graph.
struct Match {
  std::size_t rule;
  std::map<std::string, ClassId> subst;
  ClassId root;

  friend auto operator<=>(const Match&, const Match&) = default;
};

/// All (subst, root) pairs with lhs[subst] ->* root; complete and
/// duplicate-free. A bare-variable lhs matches every class.
std::vector<Match> ematch(const EGraph& g, const Pattern& lhs);

/// Instantiates a pattern with classes for variables.
StateTerm substitute_classes(const Pattern& p, const std::map<std::string, ClassId>& subst);

/// The match/apply operator T_R: G united with FL(rhs[subst] ->* root)
/// for every rule and match.
Automaton apply_matches(const EGraph& g, const Trs& trs);

/// One application of the immediate consequence operator CC . T_R.
EGraph ico_step(const EGraph& g, const Trs& trs);

enum class RunStatus { Terminated, BudgetExceeded };

struct IterationStats {
  std::size_t classes = 0;
  std::size_t nodes = 0;
  std::size_t merges = 0;
};

struct EqSatOutcome {
  RunStatus status;
  EGraph egraph;
  std::size_t iterations = 0;
  std::vector<IterationStats> history;
};

inline constexpr std::size_t kDefaultBudget = 1000;
inline constexpr std::size_t kDefaultNodeCap = 100000;

/// Iterates the ICO until a round adds no class, adds no node, and merges
/// nothing (a fixpoint, hence a model), or until the iteration budget or
/// node cap is exhausted.
EqSatOutcome eqsat(const Trs& trs, EGraph initial, std::size_t budget = kDefaultBudget,
                   std::size_t node_cap = kDefaultNodeCap);

/// Convenience: EqSat(R, t) starts from the flattening of t.
EqSatOutcome eqsat(const Trs& trs, const Term& t, std::size_t budget = kDefaultBudget,
                   std::size_t node_cap = kDefaultNodeCap);

/// Matches of some lhs whose instantiated rhs does not evaluate to the
/// matched class; empty iff G is a model of the TRS.
std::vector<Match> check_model(const EGraph& g, const Trs& trs);

/// Both containments of the representation lemma, restricted to terms of
/// size <= size_bound: R*(w), the terms equated with w by H, and the
/// brute-force closure of the joined congruence of R and G0.
struct RepresentationReport {
  std::set<Term> reachable;      // R*(w), bounded
  std::set<Term> egraph_class;   // [w] under H's PCR, bounded
  std::set<Term> joined_class;   // [w] under (congruence of R) v (PCR of G0), bounded
  bool first_contained = false;
  bool second_contained = false;
  std::optional<Term> counterexample;

  bool holds() const { return first_contained && second_contained; }
  bool all_equal() const {
    return holds() && reachable.size() == egraph_class.size() &&
           egraph_class.size() == joined_class.size();
  }
};

RepresentationReport verify_representation(const Trs& trs, const EGraph& g0,
                                           const EGraph& h, const Term& w, int size_bound);

std::string format_run_report(const EqSatOutcome& outcome);

}  // namespace saturachase

#endif  // SATURACHASE_EQSAT_HPP
