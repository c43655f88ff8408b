#include "saturachase/eqsat.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace saturachase {

namespace {

// Backtracking matcher: binds p against class c, extending subst.
void match_class(const EGraph& g, const Pattern& p, ClassId c,
                 std::map<std::string, ClassId>& subst,
                 const std::function<void()>& emit) {
  c = g.find(c);
  if (p.is_var()) {
    auto it = subst.find(p.var);
    if (it != subst.end()) {
      if (g.find(it->second) == c) emit();
      return;
    }
    subst.emplace(p.var, c);
    emit();
    subst.erase(p.var);
    return;
  }
  for (const auto& node : g.nodes_of(c)) {
    if (node.op != p.head || node.children.size() != p.children.size()) continue;
    std::function<void(std::size_t)> step = [&](std::size_t i) {
      if (i == p.children.size()) {
        emit();
        return;
      }
      match_class(g, p.children[i], node.children[i], subst, [&] { step(i + 1); });
    };
    step(0);
  }
}

}  // namespace

std::vector<Match> ematch(const EGraph& g, const Pattern& lhs) {
  std::set<Match> found;
  for (ClassId c : g.classes()) {
    std::map<std::string, ClassId> subst;
    match_class(g, lhs, c, subst, [&] { found.insert(Match{0, subst, c}); });
  }
  return {found.begin(), found.end()};
}

StateTerm substitute_classes(const Pattern& p, const std::map<std::string, ClassId>& subst) {
  if (p.is_var()) {
    auto it = subst.find(p.var);
    if (it == subst.end()) throw std::invalid_argument("unbound variable ?" + p.var);
    return StateTerm::of_state(it->second);
  }
  std::vector<StateTerm> children;
  children.reserve(p.children.size());
  for (const auto& c : p.children) children.push_back(substitute_classes(c, subst));
  return StateTerm::of_app(p.head, std::move(children));
}

Automaton apply_matches(const EGraph& g, const Trs& trs) {
  Automaton a = g.to_automaton();
  for (std::size_t r = 0; r < trs.rules.size(); ++r) {
    for (const auto& m : ematch(g, trs.rules[r].lhs))
      a.flatten_into(substitute_classes(trs.rules[r].rhs, m.subst), m.root);
  }
  return a;
}

EGraph ico_step(const EGraph& g, const Trs& trs) {
  return rebuild(apply_matches(g, trs)).egraph;
}

namespace {

EqSatOutcome run_eqsat(const Trs& trs, EGraph g, std::size_t budget, std::size_t node_cap) {
  EqSatOutcome out{RunStatus::BudgetExceeded, std::move(g), 0, {}};
  for (std::size_t iter = 0; iter < budget; ++iter) {
    std::size_t old_classes = out.egraph.num_classes();
    std::size_t old_nodes = out.egraph.num_nodes();
    auto old_class_ids = out.egraph.classes();

    auto result = rebuild(apply_matches(out.egraph, trs));

    std::set<ClassId> images;
    for (ClassId c : old_class_ids) images.insert(result.merge_map[c]);
    std::size_t merges = old_classes - images.size();

    out.egraph = std::move(result.egraph);
    ++out.iterations;
    out.history.push_back({out.egraph.num_classes(), out.egraph.num_nodes(), merges});

    bool fixpoint = merges == 0 && out.egraph.num_classes() == old_classes &&
                    out.egraph.num_nodes() == old_nodes;
    if (fixpoint) {
      out.status = RunStatus::Terminated;
      return out;
    }
    if (out.egraph.num_nodes() > node_cap) return out;
  }
  return out;
}

}  // namespace

EqSatOutcome eqsat(const Trs& trs, EGraph initial, std::size_t budget, std::size_t node_cap) {
  validate_trs(trs);
  return run_eqsat(trs, std::move(initial), budget, node_cap);
}

EqSatOutcome eqsat(const Trs& trs, const Term& t, std::size_t budget, std::size_t node_cap) {
  auto [a, root] = flatten(trs.sig, t);
  (void)root;
  return eqsat(trs, rebuild(a).egraph, budget, node_cap);
}

std::vector<Match> check_model(const EGraph& g, const Trs& trs) {
  std::vector<Match> violations;
  for (std::size_t r = 0; r < trs.rules.size(); ++r) {
    for (auto m : ematch(g, trs.rules[r].lhs)) {
      m.rule = r;
      // Evaluate rhs[subst] bottom-up; a violation is a missing node or a
      // different target class.
      std::function<std::optional<ClassId>(const StateTerm&)> eval =
          [&](const StateTerm& t) -> std::optional<ClassId> {
        if (t.is_state) return g.find(t.state);
        ENode node;
        node.op = t.op;
        for (const auto& c : t.children) {
          auto cc = eval(c);
          if (!cc) return std::nullopt;
          node.children.push_back(*cc);
        }
        return g.lookup(node);
      };
      auto value = eval(substitute_classes(trs.rules[r].rhs, m.subst));
      if (!value || *value != g.find(m.root)) violations.push_back(std::move(m));
    }
  }
  return violations;
}

RepresentationReport verify_representation(const Trs& trs, const EGraph& g0,
                                           const EGraph& h, const Term& w, int size_bound) {
  auto wc = accepts(h, w);
  if (!wc) throw std::invalid_argument("term " + w.str() + " is not represented in H");

  RepresentationReport report;
  report.reachable = rewrite_closure(trs, w, size_bound);
  report.egraph_class = enumerate_terms(h, *wc, size_bound);

  // Brute-force join of the R-congruence and G0's PCR over the bounded
  // term universe: seed with one-step rewrites and G0 equivalences, then
  // close under congruence.
  std::vector<Term> universe_vec;
  for (const auto& t : enumerate_ground_terms(trs.sig, size_bound)) universe_vec.push_back(t);
  std::map<Term, std::size_t> index;
  for (std::size_t i = 0; i < universe_vec.size(); ++i) index[universe_vec[i]] = i;

  std::vector<std::size_t> parent(universe_vec.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  };

  for (std::size_t i = 0; i < universe_vec.size(); ++i) {
    for (const auto& u : one_step_rewrites(trs, universe_vec[i])) {
      auto it = index.find(u);
      if (it != index.end()) unite(i, it->second);
    }
    auto ci = accepts(g0, universe_vec[i]);
    if (!ci) continue;
    for (std::size_t j = i + 1; j < universe_vec.size(); ++j) {
      auto cj = accepts(g0, universe_vec[j]);
      if (cj && *cj == *ci) unite(i, j);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < universe_vec.size(); ++i) {
      const Term& a = universe_vec[i];
      for (std::size_t j = i + 1; j < universe_vec.size(); ++j) {
        const Term& b = universe_vec[j];
        if (find(i) == find(j)) continue;
        if (a.head != b.head || a.children.size() != b.children.size()) continue;
        bool congruent = !a.children.empty();
        for (std::size_t k = 0; k < a.children.size(); ++k) {
          if (find(index.at(a.children[k])) != find(index.at(b.children[k]))) {
            congruent = false;
            break;
          }
        }
        if (congruent && unite(i, j)) changed = true;
      }
    }
  }
  std::size_t wroot = find(index.at(w));
  for (std::size_t i = 0; i < universe_vec.size(); ++i)
    if (find(i) == wroot) report.joined_class.insert(universe_vec[i]);

  report.first_contained = std::includes(report.egraph_class.begin(), report.egraph_class.end(),
                                         report.reachable.begin(), report.reachable.end());
  report.second_contained = std::includes(report.joined_class.begin(), report.joined_class.end(),
                                          report.egraph_class.begin(), report.egraph_class.end());
  if (!report.first_contained) {
    for (const auto& t : report.reachable)
      if (!report.egraph_class.count(t)) {
        report.counterexample = t;
        break;
      }
  } else if (!report.second_contained) {
    for (const auto& t : report.egraph_class)
      if (!report.joined_class.count(t)) {
        report.counterexample = t;
        break;
      }
  }
  return report;
}

std::string format_run_report(const EqSatOutcome& outcome) {
  std::ostringstream out;
  for (std::size_t i = 0; i < outcome.history.size(); ++i) {
    const auto& h = outcome.history[i];
    out << "iter=" << (i + 1) << " classes=" << h.classes << " nodes=" << h.nodes
        << " merges=" << h.merges << "\n";
  }
  out << "status=" << (outcome.status == RunStatus::Terminated ? "terminated" : "budget")
      << "\n";
  return out.str();
}

}  // namespace saturachase
