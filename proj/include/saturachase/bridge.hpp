#ifndef SATURACHASE_BRIDGE_HPP
#define SATURACHASE_BRIDGE_HPP

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "saturachase/chase.hpp"
#include "saturachase/egraph.hpp"
#include "saturachase/eqsat.hpp"
#include "saturachase/term.hpp"

namespace saturachase {

/// The Skolem-chase-to-EqSat encoding: a signature with a truth constant
/// and a conjunction symbol, one symbol per relation / Skolem function /
/// constant, rewrite rules for the truth split, relation collapse,
/// skolemized dependencies, and input tuples, with initial term `top`.
struct SkolemEncoding {
  Signature sig;
  Trs trs;
  Term initial;
  std::set<std::string> relation_symbols;
  std::set<std::string> skolem_symbols;
  std::set<std::string> constant_symbols;

  static constexpr const char* kTop = "top";
  static constexpr const char* kAnd = "and";
};

SkolemEncoding encode_skolem_to_eqsat(const Schema& schema,
                                      const std::vector<Dependency>& deps,
                                      const Instance& I0);

/// Reads the database instance off an E-graph over a Skolem encoding:
/// every represented term R(d1,...,dk) with R a relation symbol, the
/// arguments read back as constants or Skolem terms.
Instance xi(const EGraph& g, const SkolemEncoding& enc);

struct SkolemEquivReport {
  RunStatus eqsat_status;
  ChaseStatus skolem_status;
  bool statuses_agree = false;
  bool sets_equal = false;
  Instance only_in_eqsat;
  Instance only_in_skolem;

  bool pass() const {
    return statuses_agree &&
           (eqsat_status != RunStatus::Terminated || sets_equal);
  }
};

/// Runs both sides under the same budget and compares: termination
/// statuses must agree, and on termination xi(EqSat result) must equal
/// the Skolem-chase fixpoint as an atom set.
SkolemEquivReport verify_skolem_equiv(const Schema& schema,
                                      const std::vector<Dependency>& deps,
                                      const Instance& I0, std::size_t budget = 1000,
                                      std::size_t node_cap = kDefaultNodeCap);

/// E-graph as a database: tuple R_f(c1,...,cn,c) per node, classes as
/// marked nulls.
std::pair<Schema, Instance> encode_egraph_to_instance(const EGraph& g);

/// Inverse of the encoding; the encoded automaton must be deterministic
/// and reachable.
EGraph decode_instance_to_egraph(const Instance& I, const Signature& sig);
EGraph decode_instance_to_egraph(const Instance& I);

/// Rewrite rules as dependencies: one functional-dependency EGD per
/// symbol, plus per rule the flattened TGD (or EGD when the right-hand
/// side is a bare variable); bare-variable left-hand sides expand to one
/// dependency per symbol.
std::pair<Schema, std::vector<Dependency>> encode_trs_to_deps(const Trs& trs);

struct ChaseEquivRun {
  std::string name;
  ChaseStatus status;
  bool isomorphic = false;  // meaningful when both sides terminated
};

struct ChaseEquivReport {
  RunStatus eqsat_status;
  std::vector<ChaseEquivRun> runs;

  bool pass() const {
    for (const auto& r : runs) {
      bool chase_terminated = r.status == ChaseStatus::Terminated;
      if (chase_terminated != (eqsat_status == RunStatus::Terminated)) return false;
      if (chase_terminated && !r.isomorphic) return false;
    }
    return true;
  }
};

/// Runs EqSat and the standard chase over the encoding (egd_fair plus one
/// seeded random-fair run per seed) and checks the termination statuses
/// agree and the terminated results are isomorphic to the encoded EqSat
/// output.
ChaseEquivReport verify_chase_equiv(const Trs& trs, const EGraph& g,
                                    const std::vector<std::uint64_t>& seeds,
                                    std::size_t budget = 200,
                                    std::size_t node_cap = kDefaultNodeCap);

std::string format_report_line(const std::string& check, bool pass, const std::string& detail);

}  // namespace saturachase

#endif  // SATURACHASE_BRIDGE_HPP
