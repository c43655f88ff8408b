#include "saturachase/acyclicity.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace saturachase {

std::set<Position> positions_of(const Pattern& p, const Pattern& sub) {
  std::set<Position> out;
  std::function<void(const Pattern&)> walk = [&](const Pattern& q) {
    if (q.is_var()) return;
    for (std::size_t i = 0; i < q.children.size(); ++i) {
      if (q.children[i] == sub) out.insert({q.head, static_cast<int>(i) + 1});
      walk(q.children[i]);
    }
  };
  walk(p);
  return out;
}

Trs expand_degenerate(const Trs& trs) {
  Trs out;
  out.sig = trs.sig;
  for (const auto& rule : trs.rules) {
    if (!rule.lhs.is_var()) {
      out.rules.push_back(rule);
      continue;
    }
    for (const auto& v : rule.rhs.vars())
      if (v != rule.lhs.var)
        throw std::invalid_argument("degenerate rule " + rule.str() +
                                    " uses a variable other than its lhs");
    for (const auto& [name, arity] : trs.sig.symbols()) {
      std::vector<Pattern> args;
      for (int i = 0; i < arity; ++i) args.push_back(Pattern::variable("x" + std::to_string(i + 1)));
      Pattern grounded = Pattern::app(name, std::move(args));
      std::function<Pattern(const Pattern&)> apply = [&](const Pattern& p) -> Pattern {
        if (p.is_var()) return grounded;  // the only variable is the lhs one
        Pattern copy = p;
        for (auto& c : copy.children) c = apply(c);
        return copy;
      };
      out.rules.push_back({grounded, apply(rule.rhs)});
    }
  }
  return out;
}

namespace {

// All proper, non-variable sub-patterns (children and below).
void proper_subpatterns(const Pattern& p, std::set<Pattern>& out) {
  for (const auto& c : p.children) {
    if (!c.is_var()) out.insert(c);
    proper_subpatterns(c, out);
  }
}

bool occurs_in(const Pattern& p, const Pattern& sub) {
  if (p == sub) return true;
  if (p.is_var()) return false;
  return std::any_of(p.children.begin(), p.children.end(),
                     [&](const Pattern& c) { return occurs_in(c, sub); });
}

}  // namespace

WtdGraph build_wtdg(const Trs& trs) {
  WtdGraph g;
  for (const auto& [name, arity] : trs.sig.symbols())
    for (int i = 1; i <= arity; ++i) g.nodes.push_back({name, i});

  for (const auto& rule : trs.rules) {
    if (rule.lhs.is_var())
      throw std::invalid_argument("degenerate rule " + rule.str() +
                                  "; expand before building the graph");
    // clause 1: variable flow from lhs positions to rhs positions
    for (const auto& x : rule.rhs.vars()) {
      Pattern xv = Pattern::variable(x);
      for (const auto& u : positions_of(rule.lhs, xv))
        for (const auto& v : positions_of(rule.rhs, xv))
          g.edges.insert({u, v, false});
    }
    // clause 2: special edges into the positions of new sub-patterns
    std::set<Pattern> subs;
    proper_subpatterns(rule.rhs, subs);
    for (const auto& p : subs) {
      if (occurs_in(rule.lhs, p)) continue;
      auto targets = positions_of(rule.rhs, p);
      for (const auto& x : p.vars()) {
        Pattern xv = Pattern::variable(x);
        for (const auto& u : positions_of(rule.rhs, xv))
          for (const auto& v : targets) g.edges.insert({u, v, true});
      }
    }
  }
  return g;
}

namespace {

// Tarjan SCC over the position graph.
struct SccFinder {
  const std::vector<Position>& nodes;
  const std::map<Position, std::vector<std::pair<Position, bool>>>& adj;
  std::map<Position, int> index, low, component;
  std::vector<Position> stack;
  std::set<Position> on_stack;
  int counter = 0;
  int components = 0;

  void run() {
    for (const auto& n : nodes)
      if (!index.count(n)) strongconnect(n);
  }

  void strongconnect(const Position& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    auto it = adj.find(v);
    if (it != adj.end()) {
      for (const auto& [w, special] : it->second) {
        (void)special;
        if (!index.count(w)) {
          strongconnect(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        Position w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component[w] = components;
        if (w == v) break;
      }
      ++components;
    }
  }
};

// Shortest path from src to dst inside one component (BFS).
std::vector<WtdEdge> path_within_component(
    const Position& src, const Position& dst, int comp,
    const std::map<Position, std::vector<std::pair<Position, bool>>>& adj,
    const std::map<Position, int>& component) {
  std::map<Position, WtdEdge> via;
  std::vector<Position> queue{src};
  std::set<Position> seen{src};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    Position cur = queue[i];
    if (cur == dst && i > 0) break;
    auto it = adj.find(cur);
    if (it == adj.end()) continue;
    for (const auto& [next, special] : it->second) {
      if (component.at(next) != comp || seen.count(next)) continue;
      via[next] = {cur, next, special};
      seen.insert(next);
      queue.push_back(next);
    }
  }
  std::vector<WtdEdge> path;
  Position cur = dst;
  while (cur != src) {
    auto it = via.find(cur);
    if (it == via.end()) return {};  // src == dst with no path needed
    path.push_back(it->second);
    cur = it->second.src;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

AcyclicityResult is_weakly_term_acyclic(const Trs& trs) {
  WtdGraph g = build_wtdg(expand_degenerate(trs));
  std::map<Position, std::vector<std::pair<Position, bool>>> adj;
  for (const auto& e : g.edges) adj[e.src].emplace_back(e.dst, e.special);

  SccFinder scc{g.nodes, adj, {}, {}, {}, {}, {}, 0, 0};
  scc.run();

  for (const auto& e : g.edges) {
    if (!e.special) continue;
    if (scc.component.at(e.src) != scc.component.at(e.dst)) continue;
    // special edge inside a strongly connected component: close the cycle
    AcyclicityResult result;
    result.acyclic = false;
    result.witness.push_back(e);
    if (e.src != e.dst) {
      auto back = path_within_component(e.dst, e.src, scc.component.at(e.src), adj,
                                        scc.component);
      result.witness.insert(result.witness.end(), back.begin(), back.end());
    }
    return result;
  }
  return {true, {}};
}

bool is_weakly_acyclic_deps(const std::vector<Dependency>& deps) {
  // positions are (relation, index); edges from the classic definition
  std::set<WtdEdge> edges;
  for (const auto& d : deps) {
    if (!d.is_tgd()) continue;
    const auto& t = d.tgd();
    std::set<std::string> existentials(t.existentials.begin(), t.existentials.end());
    auto positions_in = [](const std::vector<AtomPattern>& atoms, const std::string& v) {
      std::set<Position> out;
      for (const auto& a : atoms)
        for (std::size_t i = 0; i < a.vars.size(); ++i)
          if (a.vars[i] == v) out.insert({a.rel, static_cast<int>(i) + 1});
      return out;
    };
    std::set<Position> existential_positions;
    for (const auto& z : t.existentials)
      for (const auto& pos : positions_in(t.head, z)) existential_positions.insert(pos);

    std::set<std::string> body_vars;
    for (const auto& a : t.body) body_vars.insert(a.vars.begin(), a.vars.end());
    for (const auto& x : body_vars) {
      auto head_positions = positions_in(t.head, x);
      if (head_positions.empty()) continue;
      for (const auto& u : positions_in(t.body, x)) {
        for (const auto& v : head_positions) edges.insert({u, v, false});
        for (const auto& v : existential_positions) edges.insert({u, v, true});
      }
    }
  }
  std::map<Position, std::vector<std::pair<Position, bool>>> adj;
  std::vector<Position> nodes;
  std::set<Position> node_set;
  for (const auto& e : edges) {
    node_set.insert(e.src);
    node_set.insert(e.dst);
  }
  nodes.assign(node_set.begin(), node_set.end());
  for (const auto& e : edges) adj[e.src].emplace_back(e.dst, e.special);

  SccFinder scc{nodes, adj, {}, {}, {}, {}, {}, 0, 0};
  scc.run();
  for (const auto& e : edges)
    if (e.special && scc.component.at(e.src) == scc.component.at(e.dst)) return false;
  return true;
}

std::string wtdg_to_dot(const WtdGraph& g) {
  std::ostringstream out;
  out << "digraph wtdg {\n";
  std::map<Position, std::string> ids;
  int counter = 0;
  for (const auto& n : g.nodes) {
    ids[n] = "p" + std::to_string(counter++);
    out << "  " << ids[n] << " [label=\"" << n.str() << "\"];\n";
  }
  for (const auto& e : g.edges) {
    out << "  " << ids.at(e.src) << " -> " << ids.at(e.dst);
    if (e.special) out << " [label=\"*\"]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string format_witness(const std::vector<WtdEdge>& cycle) {
  if (cycle.empty()) return "";
  std::string out = cycle.front().src.str();
  for (const auto& e : cycle) {
    out += e.special ? "*->" : "->";
    out += e.dst.str();
  }
  return out;
}

}  // namespace saturachase
