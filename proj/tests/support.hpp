#ifndef SATURACHASE_TESTS_SUPPORT_HPP
#define SATURACHASE_TESTS_SUPPORT_HPP

#include <map>
#include <random>
#include <set>
#include <vector>

#include "saturachase/egraph.hpp"
#include "saturachase/generators.hpp"
#include "saturachase/term.hpp"

namespace saturachase::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return rng() % n; }

inline Term random_term(Rng& rng, const Signature& sig, int max_size) {
  std::vector<std::pair<std::string, int>> nullary, compound;
  for (const auto& [name, ar] : sig.symbols())
    (ar == 0 ? nullary : compound).emplace_back(name, ar);
  if (max_size <= 1 || compound.empty() || rng() % 4 == 0) {
    const auto& [name, ar] = nullary[pick(rng, nullary.size())];
    (void)ar;
    return Term(name);
  }
  const auto& [name, ar] = compound[pick(rng, compound.size())];
  std::vector<Term> children;
  int budget = max_size - 1;
  for (int i = 0; i < ar; ++i) {
    int share = std::max(1, budget / (ar - i));
    children.push_back(random_term(rng, sig, share));
    budget -= children.back().size();
  }
  return Term(name, std::move(children));
}

/// A random deterministic reachable E-graph with at most max_classes
/// classes: class i is grounded by a node over earlier classes, plus a
/// few extra nodes; duplicates collapse in the rebuild.
inline EGraph random_egraph(Rng& rng, const Signature& sig, std::size_t max_classes) {
  std::vector<std::pair<std::string, int>> nullary, all;
  for (const auto& [name, ar] : sig.symbols()) {
    all.emplace_back(name, ar);
    if (ar == 0) nullary.emplace_back(name, ar);
  }
  std::size_t n = 1 + pick(rng, max_classes);
  Automaton a(sig);
  std::vector<ClassId> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(a.add_state());
  for (std::size_t i = 0; i < n; ++i) {
    // grounding node over strictly earlier classes
    if (i == 0) {
      const auto& [name, ar] = nullary[pick(rng, nullary.size())];
      (void)ar;
      a.add_transition({name, {}}, ids[0]);
    } else {
      const auto& [name, ar] = all[pick(rng, all.size())];
      ENode node{name, {}};
      for (int k = 0; k < ar; ++k) node.children.push_back(ids[pick(rng, i)]);
      a.add_transition(std::move(node), ids[i]);
    }
  }
  std::size_t extras = pick(rng, n + 1);
  for (std::size_t e = 0; e < extras; ++e) {
    const auto& [name, ar] = all[pick(rng, all.size())];
    ENode node{name, {}};
    for (int k = 0; k < ar; ++k) node.children.push_back(ids[pick(rng, n)]);
    a.add_transition(std::move(node), ids[pick(rng, n)]);
  }
  // extras may break determinism; the rebuild restores it
  return rebuild(a).egraph;
}

inline Pattern random_pattern(Rng& rng, const Signature& sig,
                              const std::vector<std::string>& vars, int max_size) {
  std::vector<std::pair<std::string, int>> nullary, compound;
  for (const auto& [name, ar] : sig.symbols())
    (ar == 0 ? nullary : compound).emplace_back(name, ar);
  if (max_size <= 1 || compound.empty() || rng() % 3 == 0) {
    if (rng() % 2 == 0 && !vars.empty()) return Pattern::variable(vars[pick(rng, vars.size())]);
    return Pattern::app(nullary[pick(rng, nullary.size())].first);
  }
  const auto& [name, ar] = compound[pick(rng, compound.size())];
  std::vector<Pattern> children;
  int budget = max_size - 1;
  for (int i = 0; i < ar; ++i) {
    int share = std::max(1, budget / (ar - i));
    children.push_back(random_pattern(rng, sig, vars, share));
    budget -= children.back().size();
  }
  return Pattern::app(name, std::move(children));
}

/// A random variable-preserving TRS with at most max_rules rules over a
/// two-symbol signature.
inline Trs random_var_preserving_trs(Rng& rng, std::size_t max_rules) {
  Trs trs;
  if (rng() % 2 == 0) {
    trs.sig.add("f", 2);
    trs.sig.add("a", 0);
  } else {
    trs.sig.add("f", 1);
    trs.sig.add("a", 0);
  }
  std::vector<std::string> vars{"x", "y"};
  std::size_t count = 1 + pick(rng, max_rules);
  for (std::size_t i = 0; i < count && trs.rules.size() < max_rules; ++i) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      Pattern lhs = random_pattern(rng, trs.sig, vars, 5);
      Pattern rhs = random_pattern(rng, trs.sig, vars, 5);
      if (lhs.is_var() || lhs.vars() != rhs.vars()) continue;
      trs.rules.push_back({lhs, rhs});
      break;
    }
  }
  if (trs.rules.empty())
    trs.rules.push_back({Pattern::app("f", [&] {
                           std::vector<Pattern> cs;
                           auto ar = *trs.sig.arity("f");
                           for (int i = 0; i < ar; ++i) cs.push_back(Pattern::variable("x"));
                           return cs;
                         }()),
                         Pattern::variable("x")});
  return trs;
}

/// Brute-force congruence closure over the subterm universe of a set of
/// ground identities; the oracle for pcr_related.
class CongruenceOracle {
 public:
  explicit CongruenceOracle(const std::vector<std::pair<Term, Term>>& identities) {
    for (const auto& [s, t] : identities) {
      add(s);
      add(t);
    }
    for (const auto& [s, t] : identities) unite(index_.at(s), index_.at(t));
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        for (std::size_t j = i + 1; j < terms_.size(); ++j) {
          if (find(i) == find(j)) continue;
          const Term& a = terms_[i];
          const Term& b = terms_[j];
          if (a.head != b.head || a.children.size() != b.children.size()) continue;
          bool congruent = true;
          for (std::size_t k = 0; k < a.children.size() && congruent; ++k)
            congruent = find(index_.at(a.children[k])) == find(index_.at(b.children[k]));
          if (congruent) {
            unite(i, j);
            changed = true;
          }
        }
      }
    }
  }

  const std::vector<Term>& universe() const { return terms_; }

  bool related(const Term& s, const Term& t) const {
    auto i = index_.find(s);
    auto j = index_.find(t);
    if (i == index_.end() || j == index_.end()) return false;
    return find(i->second) == find(j->second);
  }

 private:
  void add(const Term& t) {
    if (index_.count(t)) return;
    for (const auto& c : t.children) add(c);
    index_.emplace(t, terms_.size());
    terms_.push_back(t);
    parent_.push_back(parent_.size());
  }
  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[b] = a;
  }

  std::vector<Term> terms_;
  std::map<Term, std::size_t> index_;
  mutable std::vector<std::size_t> parent_;
};

/// An E-graph asserting the given ground identities, built by insertion
/// and rebuilding.
inline EGraph egraph_of_identities(const Signature& sig,
                                   const std::vector<std::pair<Term, Term>>& identities) {
  Automaton a(sig);
  std::map<Term, ClassId> roots;
  for (const auto& [s, t] : identities) {
    auto is = roots.find(s);
    auto it = roots.find(t);
    if (is == roots.end() && it == roots.end()) {
      ClassId c = a.flatten_into(StateTerm::of_term(s));
      a.flatten_into(StateTerm::of_term(t), c);
      roots.emplace(s, c);
      roots.emplace(t, c);
    } else if (is != roots.end()) {
      a.flatten_into(StateTerm::of_term(t), is->second);
      roots.emplace(t, is->second);
    } else {
      a.flatten_into(StateTerm::of_term(s), it->second);
      roots.emplace(s, it->second);
    }
  }
  return rebuild(a).egraph;
}

/// A random deterministic TM over tape symbols {a, b, _}.
inline TuringMachine random_tm(Rng& rng, std::size_t max_states) {
  TuringMachine m;
  std::size_t n = 1 + pick(rng, max_states);
  for (std::size_t i = 0; i < n; ++i) m.states.push_back("q" + std::to_string(i));
  m.blank = "_";
  m.tape_alphabet = {"a", "b", "_"};
  m.input_alphabet = {"a", "b"};
  std::vector<std::string> tape{"a", "b", "_"};
  for (const auto& q : m.states) {
    for (const auto& s : tape) {
      if (rng() % 10 < 7) {
        TmTransition t;
        t.state = q;
        t.read = s;
        t.write = tape[pick(rng, tape.size())];
        t.move_right = rng() % 2 == 0;
        t.next = m.states[pick(rng, m.states.size())];
        m.transitions.push_back(std::move(t));
      }
    }
  }
  return m;
}

/// A random string of the CONFIG language of the encoding.
inline Str random_config_string(Rng& rng, const TuringMachine& m, const TmEncoding& enc) {
  std::vector<std::string> dummies(enc.dummies.begin(), enc.dummies.end());
  std::vector<std::string> tape(m.tape_alphabet.begin(), m.tape_alphabet.end());
  Str w{"lmark"};
  std::size_t left_len = pick(rng, 3);
  for (std::size_t i = 0; i < left_len; ++i) {
    if (!dummies.empty() && rng() % 3 == 0)
      w.push_back("L__" + dummies[pick(rng, dummies.size())]);
    else
      w.push_back("bar_" + tape[pick(rng, tape.size())]);
  }
  const std::string& q = m.states[pick(rng, m.states.size())];
  w.push_back(rng() % 2 == 0 ? q : "bar" + q);
  std::size_t right_len = pick(rng, 3);
  for (std::size_t i = 0; i < right_len; ++i) {
    if (!dummies.empty() && rng() % 3 == 0)
      w.push_back("R__" + dummies[pick(rng, dummies.size())]);
    else
      w.push_back(tape[pick(rng, tape.size())]);
  }
  w.push_back("rmark");
  return w;
}

}  // namespace saturachase::testing

#endif
