#ifndef SATURACHASE_EGRAPH_HPP
#define SATURACHASE_EGRAPH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saturachase/term.hpp"

namespace saturachase {

/// Index of a state (E-class). Resolved through a union-find; a canonical
/// id is one with find(id) == id.
using ClassId = std::uint32_t;

class UnionFind {
 public:
  ClassId add() {
    parent_.push_back(static_cast<ClassId>(parent_.size()));
    size_.push_back(1);
    return parent_.back();
  }
  ClassId find(ClassId x) const;
  /// Union by size; returns the surviving root.
  ClassId unite(ClassId a, ClassId b);
  std::size_t size() const { return parent_.size(); }

 private:
  mutable std::vector<ClassId> parent_;
  std::vector<std::uint32_t> size_;
};

/// A transition f(c1,...,ck) -> c without its target: symbol + child states.
struct ENode {
  std::string op;
  std::vector<ClassId> children;

  friend auto operator<=>(const ENode&, const ENode&) = default;
};

struct Transition {
  ENode node;
  ClassId target;

  friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// A term over the signature extended with states: either a bare state or
/// an application whose leaves may be states. Used for insertion and for
/// instantiated rule right-hand sides.
struct StateTerm {
  bool is_state = false;
  ClassId state = 0;
  std::string op;
  std::vector<StateTerm> children;

  static StateTerm of_state(ClassId c);
  static StateTerm of_app(std::string op, std::vector<StateTerm> children = {});
  static StateTerm of_term(const Term& t);

  friend bool operator==(const StateTerm& a, const StateTerm& b) {
    return a.is_state == b.is_state && a.state == b.state && a.op == b.op &&
           a.children == b.children;
  }
  friend bool operator<(const StateTerm& a, const StateTerm& b);
};

/// A (possibly nondeterministic) tree automaton under construction:
/// a state arena with pending equalities plus a transition list.
class Automaton {
 public:
  explicit Automaton(Signature sig) : sig_(std::move(sig)) {}

  ClassId add_state(std::string name = "");
  void add_transition(ENode node, ClassId target);
  /// Records that two states denote the same class (realized at rebuild).
  void equate(ClassId a, ClassId b) { uf_.unite(a, b); }

  /// Adds FL(t ->* root): one fresh state per distinct non-state subterm,
  /// with the whole term landing on `root` (fresh if absent). If t is a
  /// bare state it is equated with the root instead. Returns the root.
  ClassId flatten_into(const StateTerm& t, std::optional<ClassId> root = std::nullopt);

  const Signature& sig() const { return sig_; }
  std::size_t num_states() const { return uf_.size(); }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::string& state_name(ClassId c) const { return names_[c]; }
  const std::vector<std::string>& state_names() const { return names_; }
  ClassId find(ClassId c) const { return uf_.find(c); }
  const UnionFind& union_find() const { return uf_; }

 private:
  friend class EGraph;
  Signature sig_;
  UnionFind uf_;
  std::vector<std::string> names_;
  std::vector<Transition> transitions_;
};

class EGraph;
struct RebuildResult;

/// The unique homomorphism between two E-graphs, as a map on canonical
/// class ids of the source.
using Homomorphism = std::map<ClassId, ClassId>;

/// A deterministic, reachable tree automaton. States are E-classes and
/// transitions are E-nodes; the transition relation is kept canonical
/// (every node stored with canonical children, mapped to a canonical
/// target, no duplicates).
class EGraph {
 public:
  explicit EGraph(Signature sig) : sig_(std::move(sig)) {}

  const Signature& sig() const { return sig_; }
  ClassId find(ClassId c) const { return uf_.find(c); }
  std::size_t num_classes() const { return classes_.size(); }
  std::size_t num_nodes() const { return nodes_.size(); }
  /// Canonical class ids, ascending.
  const std::vector<ClassId>& classes() const { return classes_; }
  const std::vector<ENode>& nodes_of(ClassId c) const;
  /// The full transition relation: canonical node -> canonical target.
  const std::map<ENode, ClassId>& nodes() const { return nodes_; }
  const std::string& class_name(ClassId c) const { return names_[uf_.find(c)]; }
  std::optional<ClassId> class_by_name(const std::string& name) const;

  /// Re-canonicalizes an ENode's children.
  ENode canonical(const ENode& n) const;
  /// Looks up the target of a node, if present.
  std::optional<ClassId> lookup(const ENode& n) const;

  Automaton to_automaton() const;

 private:
  friend RebuildResult rebuild(const Automaton& a);
  Signature sig_;
  UnionFind uf_;
  std::vector<std::string> names_;
  std::vector<ClassId> classes_;
  std::map<ENode, ClassId> nodes_;
  std::map<ClassId, std::vector<ENode>> by_class_;
};

/// Result of rebuilding: the E-graph plus the map sending every input
/// state to its class in the result.
struct RebuildResult {
  EGraph egraph;
  std::vector<ClassId> merge_map;
};

// ---- Construction ------------------------------------------------------

/// FL(t ->* root) as a standalone automaton; returns it with the root id.
std::pair<Automaton, ClassId> flatten(const Signature& sig, const Term& t);

/// G united with FL(t ->* c). If `at` is absent a fresh root is created.
std::pair<Automaton, ClassId> insert(const EGraph& g, const StateTerm& t,
                                     std::optional<ClassId> at = std::nullopt);

/// Congruence closure: the least deterministic reachable automaton above
/// `a`. Throws if some state of `a` accepts no ground term.
RebuildResult rebuild(const Automaton& a);

/// Violations of the E-graph invariants (determinism, reachability) in a
/// raw automaton; empty iff `a` is already an E-graph.
std::vector<std::string> check_invariants(const Automaton& a);

// ---- Queries -----------------------------------------------------------

/// The unique class accepting t, if any (bottom-up evaluation).
std::optional<ClassId> accepts(const EGraph& g, const Term& t);

/// All terms accepted by c with size <= size_bound.
std::set<Term> enumerate_terms(const EGraph& g, ClassId c, int size_bound);

/// Whether some class accepts both terms (the PCR semantics).
bool pcr_related(const EGraph& g, const Term& t1, const Term& t2);

/// Smallest depth of a term accepted by c.
int rank(const EGraph& g, ClassId c);

/// The at-most-one homomorphism G -> H: witness terms chosen minimal by
/// rank with lexicographic tie-breaking, looked up in H, then verified on
/// every node.
std::optional<Homomorphism> find_homomorphism(const EGraph& g, const EGraph& h);

bool is_isomorphic(const EGraph& g, const EGraph& h);

/// Least upper bound: rebuild of the disjoint union.
EGraph lub(const std::vector<EGraph>& graphs);

// ---- Text formats ------------------------------------------------------

/// One node per line: `f(c1,c1) -> c2`; `;` comments. States are named.
Automaton parse_egraph_file(const std::string& text, const Signature& sig);
/// Same, inferring the signature from usage.
Automaton parse_egraph_file(const std::string& text);
std::string print_egraph(const EGraph& g);
std::string egraph_to_dot(const EGraph& g);

}  // namespace saturachase

#endif  // SATURACHASE_EGRAPH_HPP
