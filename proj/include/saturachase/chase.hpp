#ifndef SATURACHASE_CHASE_HPP
#define SATURACHASE_CHASE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "saturachase/term.hpp"

namespace saturachase {

/// Relational schema: relation name -> arity.
struct Schema {
  std::map<std::string, int> relations;

  void add(const std::string& name, int arity);
  void merge(const Schema& other);
};

/// A domain element: a constant, a marked null, or (in Skolem-chase
/// instances) a structural Skolem term.
struct DomainElement {
  enum class Kind { Constant, Null, Skolem };

  Kind kind = Kind::Constant;
  std::string name;                  // constant or Skolem function name
  std::uint64_t index = 0;           // null index
  std::vector<DomainElement> args;   // Skolem arguments

  static DomainElement constant(std::string name);
  static DomainElement null(std::uint64_t index);
  static DomainElement skolem(std::string fn, std::vector<DomainElement> args);

  bool is_constant() const { return kind == Kind::Constant; }
  bool is_null() const { return kind == Kind::Null; }
  bool is_skolem() const { return kind == Kind::Skolem; }
  std::string str() const;

  friend bool operator==(const DomainElement& a, const DomainElement& b) {
    return a.kind == b.kind && a.name == b.name && a.index == b.index &&
           a.args == b.args;
  }
  friend bool operator!=(const DomainElement& a, const DomainElement& b) { return !(a == b); }
  friend bool operator<(const DomainElement& a, const DomainElement& b);
  friend bool operator>(const DomainElement& a, const DomainElement& b) { return b < a; }
};

struct Atom {
  std::string rel;
  std::vector<DomainElement> args;

  std::string str() const;
  friend bool operator==(const Atom& a, const Atom& b) {
    return a.rel == b.rel && a.args == b.args;
  }
  friend bool operator<(const Atom& a, const Atom& b) {
    if (a.rel != b.rel) return a.rel < b.rel;
    return std::lexicographical_compare(a.args.begin(), a.args.end(),
                                        b.args.begin(), b.args.end());
  }
};

using Instance = std::set<Atom>;

std::set<DomainElement> active_domain(const Instance& I);

/// A relational atom over variables, as used in dependency bodies/heads.
struct AtomPattern {
  std::string rel;
  std::vector<std::string> vars;

  std::string str() const;
  friend auto operator<=>(const AtomPattern&, const AtomPattern&) = default;
};

struct Tgd {
  std::vector<AtomPattern> body;
  std::vector<AtomPattern> head;
  std::vector<std::string> existentials;  // head vars not bound by the body
};

struct Egd {
  std::vector<AtomPattern> body;
  std::string lhs_var;
  std::string rhs_var;
};

struct Dependency {
  std::variant<Tgd, Egd> d;

  bool is_tgd() const { return std::holds_alternative<Tgd>(d); }
  const Tgd& tgd() const { return std::get<Tgd>(d); }
  const Egd& egd() const { return std::get<Egd>(d); }
  std::string str() const;
};

/// Builds a TGD, computing its existentials; validates EGD variable use.
Dependency make_tgd(std::vector<AtomPattern> body, std::vector<AtomPattern> head);
Dependency make_egd(std::vector<AtomPattern> body, std::string x, std::string y);

Schema infer_schema(const std::vector<Dependency>& deps);
Schema infer_schema(const Instance& I);

using Assignment = std::map<std::string, DomainElement>;

/// All homomorphisms from the body conjunction into I (nested-loop join
/// with early pruning), optionally extending a fixed partial assignment.
std::vector<Assignment> eval_cq(const Instance& I, const std::vector<AtomPattern>& body,
                                const Assignment& fixed = {});

/// Triggers of d in I that are active: TGD triggers with no extension to
/// the head, EGD triggers with distinct sides.
std::vector<Assignment> active_triggers(const Instance& I, const Dependency& d);

bool is_model(const Instance& I, const std::vector<Dependency>& deps);

// ---- The standard chase -------------------------------------------------

enum class ChaseStatus { Terminated, Failed, BudgetExceeded };

struct ChaseStep {
  std::size_t dep;
  Assignment trigger;
};

struct ChaseOutcome {
  ChaseStatus status;
  Instance instance;
  std::vector<ChaseStep> steps;
};

enum class SchedulerKind { EgdFair, FifoFair, RandomFair };

struct Scheduler {
  SchedulerKind kind = SchedulerKind::EgdFair;
  std::uint64_t seed = 0;

  static Scheduler egd_fair() { return {SchedulerKind::EgdFair, 0}; }
  static Scheduler fifo_fair() { return {SchedulerKind::FifoFair, 0}; }
  static Scheduler random_fair(std::uint64_t seed) { return {SchedulerKind::RandomFair, seed}; }
};

/// One chase step; the trigger must be active. For EGDs the replaced side
/// is the null (both nulls: the higher index); two distinct constants
/// fail the chase.
struct ChaseStepResult {
  bool failed = false;
  Instance instance;
  // the renaming applied by an EGD step, if any
  std::optional<std::pair<DomainElement, DomainElement>> renamed;  // from -> to
};
ChaseStepResult chase_step(const Instance& I, const Dependency& d, const Assignment& h,
                           std::uint64_t& null_counter);

inline constexpr std::size_t kDefaultChaseBudget = 100000;

/// Runs a fair standard-chase sequence under the given scheduler.
/// egd_fair saturates the EGD subset after every TGD step; fifo_fair
/// drains a global FIFO of discovered triggers; random_fair picks among
/// the active triggers, reproducibly by seed. Budget counts chase steps.
ChaseOutcome run_standard_chase(const std::vector<Dependency>& deps, Instance I0,
                                Scheduler scheduler,
                                std::size_t budget = kDefaultChaseBudget);

// ---- The Skolem chase ----------------------------------------------------

/// A head argument after skolemization: a frontier variable or a Skolem
/// function applied to the frontier variables.
struct SkolemArg {
  std::string var;                      // set iff plain variable
  std::string fn;                       // set iff Skolem application
  std::vector<std::string> fn_args;
};

struct SkolemAtom {
  std::string rel;
  std::vector<SkolemArg> args;
};

struct SkolemRule {
  std::vector<AtomPattern> body;
  std::vector<SkolemAtom> head;
};

/// Replaces each existential z of a TGD by f<dep>_z(frontier vars).
SkolemRule skolemize(const Tgd& tgd, std::size_t dep_index);

/// Eliminates EGDs: each EGD becomes a TGD over an explicit Eq relation
/// (with occurrences of repeated body variables split apart and rejoined
/// through Eq), plus reflexivity/symmetry/transitivity axioms for Eq and
/// per-position substitution rules for every relation.
std::vector<Dependency> singularize(const std::vector<Dependency>& deps, const Schema& schema);

/// Semi-naive least fixpoint of the skolemized TGDs; deterministic.
/// Budget counts saturation rounds.
ChaseOutcome run_skolem_chase(const std::vector<Dependency>& deps, Instance I0,
                              std::size_t budget = 1000);

// ---- Homomorphisms, cores, isomorphism -----------------------------------

using InstanceHom = std::map<DomainElement, DomainElement>;

inline constexpr std::size_t kDefaultSearchBudget = 2000000;

/// A homomorphism I -> J (identity on constants, nulls and Skolem terms
/// flexible), or nullopt. Throws if the backtracking search exceeds the
/// node budget.
std::optional<InstanceHom> find_instance_hom(const Instance& I, const Instance& J,
                                             std::size_t search_budget = kDefaultSearchBudget);

/// Whether every endomorphism of I is an isomorphism.
bool is_core(const Instance& I, std::size_t search_budget = kDefaultSearchBudget);

bool instances_isomorphic(const Instance& I, const Instance& J,
                          std::size_t search_budget = kDefaultSearchBudget);

// ---- Text formats ---------------------------------------------------------

/// One dependency per line: `R(x,y), S(y,z) -> exists w. T(x,w)` or
/// `R(x,y), R(x,z) -> y = z`; `;` comments.
std::vector<Dependency> parse_dependencies(const std::string& text);
std::string print_dependencies(const std::vector<Dependency>& deps);

/// One atom per line: `R(a, _n1)`; `_`-prefixed identifiers are nulls,
/// nested applications are Skolem terms.
Instance parse_instance(const std::string& text);
std::string print_instance(const Instance& I);

std::string format_chase_trace(const std::vector<Dependency>& deps,
                               const std::vector<ChaseStep>& steps);

}  // namespace saturachase

#endif  // SATURACHASE_CHASE_HPP
