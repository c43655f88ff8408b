#include "saturachase/egraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>

namespace saturachase {

ClassId UnionFind::find(ClassId x) const {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];  // path halving
    x = parent_[x];
  }
  return x;
}

ClassId UnionFind::unite(ClassId a, ClassId b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return a;
}

bool operator<(const StateTerm& a, const StateTerm& b) {
  if (a.is_state != b.is_state) return a.is_state < b.is_state;
  if (a.state != b.state) return a.state < b.state;
  if (a.op != b.op) return a.op < b.op;
  return std::lexicographical_compare(a.children.begin(), a.children.end(),
                                      b.children.begin(), b.children.end());
}

StateTerm StateTerm::of_state(ClassId c) {
  StateTerm t;
  t.is_state = true;
  t.state = c;
  return t;
}

StateTerm StateTerm::of_app(std::string op, std::vector<StateTerm> children) {
  StateTerm t;
  t.op = std::move(op);
  t.children = std::move(children);
  return t;
}

StateTerm StateTerm::of_term(const Term& t) {
  StateTerm s;
  s.op = t.head;
  for (const auto& c : t.children) s.children.push_back(of_term(c));
  return s;
}

ClassId Automaton::add_state(std::string name) {
  ClassId id = uf_.add();
  if (name.empty()) name = "c" + std::to_string(id);
  names_.push_back(std::move(name));
  return id;
}

void Automaton::add_transition(ENode node, ClassId target) {
  auto ar = sig_.arity(node.op);
  if (!ar) throw std::invalid_argument("unknown symbol " + node.op);
  if (*ar != static_cast<int>(node.children.size()))
    throw std::invalid_argument("arity mismatch for " + node.op);
  transitions_.push_back({std::move(node), target});
}

ClassId Automaton::flatten_into(const StateTerm& t, std::optional<ClassId> root) {
  if (t.is_state) {
    if (!root || uf_.find(*root) == uf_.find(t.state)) return t.state;
    // A bare state cannot gain a flattening node; equate it with the root.
    equate(t.state, *root);
    return *root;
  }
  std::map<StateTerm, ClassId> memo;
  std::function<ClassId(const StateTerm&, bool)> rec =
      [&](const StateTerm& u, bool is_root) -> ClassId {
    if (u.is_state) return u.state;
    if (!is_root) {
      auto it = memo.find(u);
      if (it != memo.end()) return it->second;
    }
    ENode node;
    node.op = u.op;
    for (const auto& c : u.children) node.children.push_back(rec(c, false));
    ClassId id = is_root && root ? *root : add_state();
    add_transition(std::move(node), id);
    if (!is_root) memo.emplace(u, id);
    return id;
  };
  return rec(t, true);
}

const std::vector<ENode>& EGraph::nodes_of(ClassId c) const {
  static const std::vector<ENode> kEmpty;
  auto it = by_class_.find(uf_.find(c));
  return it == by_class_.end() ? kEmpty : it->second;
}

std::optional<ClassId> EGraph::class_by_name(const std::string& name) const {
  for (ClassId i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return uf_.find(i);
  return std::nullopt;
}

ENode EGraph::canonical(const ENode& n) const {
  ENode out;
  out.op = n.op;
  out.children.reserve(n.children.size());
  for (ClassId c : n.children) out.children.push_back(uf_.find(c));
  return out;
}

std::optional<ClassId> EGraph::lookup(const ENode& n) const {
  auto it = nodes_.find(canonical(n));
  if (it == nodes_.end()) return std::nullopt;
  return it->second;
}

Automaton EGraph::to_automaton() const {
  Automaton a(sig_);
  a.uf_ = uf_;
  a.names_ = names_;
  for (const auto& [node, target] : nodes_) a.transitions_.push_back({node, target});
  return a;
}

std::pair<Automaton, ClassId> flatten(const Signature& sig, const Term& t) {
  Automaton a(sig);
  ClassId root = a.flatten_into(StateTerm::of_term(t));
  return {std::move(a), root};
}

std::pair<Automaton, ClassId> insert(const EGraph& g, const StateTerm& t,
                                     std::optional<ClassId> at) {
  Automaton a = g.to_automaton();
  ClassId root = a.flatten_into(t, at);
  return {std::move(a), root};
}

namespace {

// States with no ground term reaching them, under the automaton's
// pending equalities.
std::vector<ClassId> ungrounded_states(const Automaton& a) {
  std::size_t n = a.num_states();
  std::vector<bool> grounded(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& t : a.transitions()) {
      ClassId tgt = a.find(t.target);
      if (grounded[tgt]) continue;
      bool ok = true;
      for (ClassId c : t.node.children)
        if (!grounded[a.find(c)]) {
          ok = false;
          break;
        }
      if (ok) {
        grounded[tgt] = true;
        changed = true;
      }
    }
  }
  std::vector<ClassId> out;
  for (ClassId i = 0; i < n; ++i)
    if (!grounded[a.find(i)]) out.push_back(i);
  return out;
}

}  // namespace

RebuildResult rebuild(const Automaton& a) {
  {
    auto bad = ungrounded_states(a);
    if (!bad.empty())
      throw std::invalid_argument("unreachable state in automaton: " +
                                  a.state_name(bad.front()));
  }

  const auto& transitions = a.transitions();
  std::size_t n = a.num_states();
  UnionFind uf = a.union_find();

  auto canon = [&](const ENode& node) {
    ENode out;
    out.op = node.op;
    out.children.reserve(node.children.size());
    for (ClassId c : node.children) out.children.push_back(uf.find(c));
    return out;
  };

  // up[s] = indices of transitions whose node mentions state s; when s is
  // absorbed by a union these must be re-canonicalized.
  std::vector<std::vector<std::size_t>> up(n);
  for (std::size_t i = 0; i < transitions.size(); ++i)
    for (ClassId c : transitions[i].node.children) up[uf.find(c)].push_back(i);

  std::map<ENode, ClassId> hashcons;  // canonical node -> some id in the class
  std::deque<std::size_t> dirty;
  for (std::size_t i = 0; i < transitions.size(); ++i) dirty.push_back(i);

  while (!dirty.empty()) {
    std::size_t i = dirty.front();
    dirty.pop_front();
    ENode node = canon(transitions[i].node);
    ClassId target = uf.find(transitions[i].target);
    auto [it, inserted] = hashcons.emplace(node, target);
    if (inserted) continue;
    ClassId other = uf.find(it->second);
    if (other == target) continue;
    ClassId winner = uf.unite(other, target);
    ClassId loser = winner == other ? target : other;
    it->second = winner;
    for (std::size_t j : up[loser]) dirty.push_back(j);
    auto& dst = up[winner];
    dst.insert(dst.end(), up[loser].begin(), up[loser].end());
    up[loser].clear();
  }

  EGraph g(a.sig());
  g.uf_ = std::move(uf);
  g.names_ = a.state_names();
  for (const auto& t : transitions) {
    ENode node = g.canonical(t.node);
    ClassId target = g.uf_.find(t.target);
    auto [it, inserted] = g.nodes_.emplace(std::move(node), target);
    if (!inserted && it->second != target)
      throw std::logic_error("congruence closure left a violating transition");
  }
  std::set<ClassId> classes;
  for (ClassId i = 0; i < n; ++i) classes.insert(g.uf_.find(i));
  g.classes_.assign(classes.begin(), classes.end());
  for (const auto& [node, target] : g.nodes_) g.by_class_[target].push_back(node);

  RebuildResult result{std::move(g), {}};
  result.merge_map.resize(n);
  for (ClassId i = 0; i < n; ++i) result.merge_map[i] = result.egraph.find(i);
  return result;
}

std::vector<std::string> check_invariants(const Automaton& a) {
  std::vector<std::string> violations;
  std::map<ENode, ClassId> seen;
  for (const auto& t : a.transitions()) {
    ENode node;
    node.op = t.node.op;
    for (ClassId c : t.node.children) node.children.push_back(a.find(c));
    ClassId target = a.find(t.target);
    auto [it, inserted] = seen.emplace(node, target);
    if (!inserted && it->second != target) {
      std::string desc = t.node.op + "(";
      for (std::size_t i = 0; i < t.node.children.size(); ++i)
        desc += (i ? "," : "") + a.state_name(a.find(t.node.children[i]));
      desc += ")";
      violations.push_back("determinism: node " + desc + " targets both " +
                           a.state_name(it->second) + " and " + a.state_name(target));
    }
  }
  for (ClassId s : ungrounded_states(a))
    violations.push_back("reachability: state " + a.state_name(s) +
                         " accepts no ground term");
  return violations;
}

std::optional<ClassId> accepts(const EGraph& g, const Term& t) {
  ENode node;
  node.op = t.head;
  for (const auto& c : t.children) {
    auto cc = accepts(g, c);
    if (!cc) return std::nullopt;
    node.children.push_back(*cc);
  }
  return g.lookup(node);
}

std::set<Term> enumerate_terms(const EGraph& g, ClassId c, int size_bound) {
  c = g.find(c);
  // table[class][s] = terms of size exactly s accepted by class
  std::map<ClassId, std::vector<std::set<Term>>> table;
  for (ClassId cls : g.classes()) table[cls].resize(size_bound + 1);
  for (int s = 1; s <= size_bound; ++s) {
    for (ClassId cls : g.classes()) {
      for (const auto& node : g.nodes_of(cls)) {
        int k = static_cast<int>(node.children.size());
        if (k == 0) {
          if (s == 1) table[cls][s].insert(Term(node.op));
          continue;
        }
        if (s < k + 1) continue;
        std::vector<Term> acc;
        std::function<void(int, int)> rec = [&](int child, int remaining) {
          if (child == k) {
            if (remaining == 0) table[cls][s].insert(Term(node.op, acc));
            return;
          }
          int min_rest = k - child - 1;
          for (int cs = 1; cs <= remaining - min_rest; ++cs) {
            for (const auto& ct : table[g.find(node.children[child])][cs]) {
              acc.push_back(ct);
              rec(child + 1, remaining - cs);
              acc.pop_back();
            }
          }
        };
        rec(0, s - 1);
      }
    }
  }
  std::set<Term> out;
  for (int s = 1; s <= size_bound; ++s) out.insert(table[c][s].begin(), table[c][s].end());
  return out;
}

bool pcr_related(const EGraph& g, const Term& t1, const Term& t2) {
  auto c1 = accepts(g, t1);
  auto c2 = accepts(g, t2);
  return c1 && c2 && *c1 == *c2;
}

namespace {

std::map<ClassId, int> all_ranks(const EGraph& g) {
  constexpr int kInf = std::numeric_limits<int>::max();
  std::map<ClassId, int> ranks;
  for (ClassId c : g.classes()) ranks[c] = kInf;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [node, target] : g.nodes()) {
      int worst = 0;
      bool ok = true;
      for (ClassId c : node.children) {
        int r = ranks[g.find(c)];
        if (r == kInf) {
          ok = false;
          break;
        }
        worst = std::max(worst, r);
      }
      if (!ok) continue;
      int candidate = worst + 1;
      if (candidate < ranks[target]) {
        ranks[target] = candidate;
        changed = true;
      }
    }
  }
  return ranks;
}

// Deterministic witness of minimal rank: among min-rank nodes pick the
// smallest (op, children) lexicographically; recursion descends on ranks.
Term witness_term(const EGraph& g, ClassId c, const std::map<ClassId, int>& ranks,
                  std::map<ClassId, Term>& memo) {
  c = g.find(c);
  auto hit = memo.find(c);
  if (hit != memo.end()) return hit->second;
  const ENode* best = nullptr;
  int best_rank = std::numeric_limits<int>::max();
  for (const auto& node : g.nodes_of(c)) {
    int worst = 0;
    for (ClassId ch : node.children) worst = std::max(worst, ranks.at(g.find(ch)));
    int node_rank = worst + 1;
    if (node_rank < best_rank || (node_rank == best_rank && node < *best)) {
      best_rank = node_rank;
      best = &node;
    }
  }
  if (!best) throw std::logic_error("class without nodes");
  Term t(best->op);
  for (ClassId ch : best->children) t.children.push_back(witness_term(g, ch, ranks, memo));
  memo.emplace(c, t);
  return t;
}

}  // namespace

int rank(const EGraph& g, ClassId c) {
  auto ranks = all_ranks(g);
  return ranks.at(g.find(c));
}

std::optional<Homomorphism> find_homomorphism(const EGraph& g, const EGraph& h) {
  auto ranks = all_ranks(g);
  std::map<ClassId, Term> memo;
  Homomorphism hom;
  for (ClassId c : g.classes()) {
    Term w = witness_term(g, c, ranks, memo);
    auto target = accepts(h, w);
    if (!target) return std::nullopt;
    hom[c] = *target;
  }
  // Verify the node condition on every transition.
  for (const auto& [node, target] : g.nodes()) {
    ENode mapped;
    mapped.op = node.op;
    for (ClassId c : node.children) mapped.children.push_back(hom.at(g.find(c)));
    auto found = h.lookup(mapped);
    if (!found || *found != hom.at(target)) return std::nullopt;
  }
  return hom;
}

bool is_isomorphic(const EGraph& g, const EGraph& h) {
  return find_homomorphism(g, h).has_value() && find_homomorphism(h, g).has_value();
}

EGraph lub(const std::vector<EGraph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("lub of an empty family");
  Signature sig;
  for (const auto& g : graphs) sig.merge(g.sig());
  Automaton a(sig);
  for (const auto& g : graphs) {
    std::map<ClassId, ClassId> renaming;
    for (ClassId c : g.classes()) renaming[c] = a.add_state();
    for (const auto& [node, target] : g.nodes()) {
      ENode moved;
      moved.op = node.op;
      for (ClassId c : node.children) moved.children.push_back(renaming.at(g.find(c)));
      a.add_transition(std::move(moved), renaming.at(target));
    }
  }
  return rebuild(a).egraph;
}

// ---- Text formats ------------------------------------------------------

namespace {

struct NodeLine {
  std::string op;
  std::vector<std::string> args;
  std::string target;
};

NodeLine parse_node_line(const std::string& body, int lineno) {
  auto arrow = body.find("->");
  if (arrow == std::string::npos) throw ParseError("missing '->'", lineno);
  std::string left = body.substr(0, arrow);
  NodeLine out;
  {
    std::istringstream ss(body.substr(arrow + 2));
    if (!(ss >> out.target)) throw ParseError("missing target class", lineno);
    std::string extra;
    if (ss >> extra) throw ParseError("trailing input after target", lineno);
  }
  auto open = left.find('(');
  if (open == std::string::npos) {
    std::istringstream ss(left);
    if (!(ss >> out.op)) throw ParseError("missing node symbol", lineno);
    return out;
  }
  auto close = left.rfind(')');
  if (close == std::string::npos || close < open) throw ParseError("unbalanced parentheses", lineno);
  {
    std::istringstream ss(left.substr(0, open));
    if (!(ss >> out.op)) throw ParseError("missing node symbol", lineno);
  }
  std::string args = left.substr(open + 1, close - open - 1);
  std::string cur;
  for (char ch : args + ",") {
    if (ch == ',') {
      std::istringstream ss(cur);
      std::string arg;
      if (ss >> arg) out.args.push_back(arg);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

Automaton parse_egraph_lines(const std::string& text, std::optional<Signature> fixed) {
  std::vector<NodeLine> lines;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    lines.push_back(parse_node_line(line.substr(first), lineno));
  }
  Signature sig;
  if (fixed) {
    sig = *fixed;
  } else {
    for (const auto& nl : lines) sig.add(nl.op, static_cast<int>(nl.args.size()));
  }
  Automaton a(sig);
  std::map<std::string, ClassId> by_name;
  auto state = [&](const std::string& name) {
    auto it = by_name.find(name);
    if (it != by_name.end()) return it->second;
    ClassId id = a.add_state(name);
    by_name.emplace(name, id);
    return id;
  };
  for (const auto& nl : lines) {
    ENode node;
    node.op = nl.op;
    for (const auto& arg : nl.args) node.children.push_back(state(arg));
    a.add_transition(std::move(node), state(nl.target));
  }
  return a;
}

}  // namespace

Automaton parse_egraph_file(const std::string& text, const Signature& sig) {
  return parse_egraph_lines(text, sig);
}

Automaton parse_egraph_file(const std::string& text) {
  return parse_egraph_lines(text, std::nullopt);
}

std::string print_egraph(const EGraph& g) {
  std::vector<std::string> lines;
  for (const auto& [node, target] : g.nodes()) {
    std::string line = node.op + "(";
    for (std::size_t i = 0; i < node.children.size(); ++i)
      line += (i ? "," : "") + g.class_name(node.children[i]);
    line += ") -> " + g.class_name(target);
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string egraph_to_dot(const EGraph& g) {
  std::ostringstream out;
  out << "digraph egraph {\n  compound=true;\n  node [shape=record];\n";
  std::map<ENode, std::string> node_ids;
  int counter = 0;
  for (ClassId c : g.classes()) {
    out << "  subgraph cluster_" << c << " {\n    label=\"" << g.class_name(c) << "\";\n";
    for (const auto& node : g.nodes_of(c)) {
      std::string id = "n" + std::to_string(counter++);
      node_ids[node] = id;
      out << "    " << id << " [label=\"" << node.op;
      for (std::size_t i = 0; i < node.children.size(); ++i)
        out << (i ? "," : "(") << g.class_name(node.children[i]);
      if (!node.children.empty()) out << ")";
      out << "\"];\n";
    }
    out << "  }\n";
  }
  for (const auto& [node, target] : g.nodes()) {
    (void)target;
    for (ClassId c : node.children) {
      // point the edge at some node inside the child's cluster
      const auto& child_nodes = g.nodes_of(c);
      if (child_nodes.empty()) continue;
      out << "  " << node_ids[node] << " -> " << node_ids[child_nodes.front()]
          << " [lhead=cluster_" << g.find(c) << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace saturachase
