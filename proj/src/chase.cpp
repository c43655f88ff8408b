#include "saturachase/chase.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <random>
#include <sstream>

namespace saturachase {

void Schema::add(const std::string& name, int arity) {
  auto it = relations.find(name);
  if (it != relations.end()) {
    if (it->second != arity)
      throw std::invalid_argument("arity conflict for relation " + name);
    return;
  }
  relations.emplace(name, arity);
}

void Schema::merge(const Schema& other) {
  for (const auto& [name, ar] : other.relations) add(name, ar);
}

bool operator<(const DomainElement& a, const DomainElement& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.name != b.name) return a.name < b.name;
  if (a.index != b.index) return a.index < b.index;
  return std::lexicographical_compare(a.args.begin(), a.args.end(),
                                      b.args.begin(), b.args.end());
}

DomainElement DomainElement::constant(std::string name) {
  DomainElement e;
  e.kind = Kind::Constant;
  e.name = std::move(name);
  return e;
}

DomainElement DomainElement::null(std::uint64_t index) {
  DomainElement e;
  e.kind = Kind::Null;
  e.index = index;
  return e;
}

DomainElement DomainElement::skolem(std::string fn, std::vector<DomainElement> args) {
  DomainElement e;
  e.kind = Kind::Skolem;
  e.name = std::move(fn);
  e.args = std::move(args);
  return e;
}

std::string DomainElement::str() const {
  switch (kind) {
    case Kind::Constant:
      return name;
    case Kind::Null:
      return "_n" + std::to_string(index);
    case Kind::Skolem: {
      std::string out = name + "(";
      for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i].str();
      return out + ")";
    }
  }
  return "?";
}

std::string Atom::str() const {
  std::string out = rel + "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i].str();
  return out + ")";
}

std::string AtomPattern::str() const {
  std::string out = rel + "(";
  for (std::size_t i = 0; i < vars.size(); ++i) out += (i ? "," : "") + vars[i];
  return out + ")";
}

std::set<DomainElement> active_domain(const Instance& I) {
  std::set<DomainElement> out;
  std::function<void(const DomainElement&)> walk = [&](const DomainElement& e) {
    out.insert(e);
    for (const auto& a : e.args) walk(a);
  };
  for (const auto& atom : I)
    for (const auto& a : atom.args) walk(a);
  return out;
}

std::string Dependency::str() const {
  std::string out;
  auto join = [](const std::vector<AtomPattern>& atoms) {
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i) s += (i ? ", " : "") + atoms[i].str();
    return s;
  };
  if (is_tgd()) {
    const auto& t = tgd();
    out = join(t.body) + " -> ";
    if (!t.existentials.empty()) {
      out += "exists ";
      for (std::size_t i = 0; i < t.existentials.size(); ++i)
        out += (i ? ", " : "") + t.existentials[i];
      out += ". ";
    }
    out += join(t.head);
  } else {
    const auto& e = egd();
    out = join(e.body) + " -> " + e.lhs_var + " = " + e.rhs_var;
  }
  return out;
}

namespace {

std::set<std::string> pattern_vars(const std::vector<AtomPattern>& atoms) {
  std::set<std::string> out;
  for (const auto& a : atoms) out.insert(a.vars.begin(), a.vars.end());
  return out;
}

}  // namespace

Dependency make_tgd(std::vector<AtomPattern> body, std::vector<AtomPattern> head) {
  if (head.empty()) throw std::invalid_argument("TGD with empty head");
  Tgd t;
  t.body = std::move(body);
  t.head = std::move(head);
  auto bv = pattern_vars(t.body);
  for (const auto& v : pattern_vars(t.head))
    if (!bv.count(v)) t.existentials.push_back(v);
  return Dependency{std::move(t)};
}

Dependency make_egd(std::vector<AtomPattern> body, std::string x, std::string y) {
  auto bv = pattern_vars(body);
  if (!bv.count(x) || !bv.count(y))
    throw std::invalid_argument("EGD equality variables must occur in the body");
  return Dependency{Egd{std::move(body), std::move(x), std::move(y)}};
}

Schema infer_schema(const std::vector<Dependency>& deps) {
  Schema s;
  auto visit = [&](const std::vector<AtomPattern>& atoms) {
    for (const auto& a : atoms) s.add(a.rel, static_cast<int>(a.vars.size()));
  };
  for (const auto& d : deps) {
    if (d.is_tgd()) {
      visit(d.tgd().body);
      visit(d.tgd().head);
    } else {
      visit(d.egd().body);
    }
  }
  return s;
}

Schema infer_schema(const Instance& I) {
  Schema s;
  for (const auto& atom : I) s.add(atom.rel, static_cast<int>(atom.args.size()));
  return s;
}

std::vector<Assignment> eval_cq(const Instance& I, const std::vector<AtomPattern>& body,
                                const Assignment& fixed) {
  // group atoms by relation once
  std::map<std::string, std::vector<const Atom*>> by_rel;
  for (const auto& atom : I) by_rel[atom.rel].push_back(&atom);

  std::vector<Assignment> out;
  Assignment current = fixed;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == body.size()) {
      out.push_back(current);
      return;
    }
    const auto& pat = body[i];
    auto it = by_rel.find(pat.rel);
    if (it == by_rel.end()) return;
    for (const Atom* atom : it->second) {
      if (atom->args.size() != pat.vars.size()) continue;
      std::vector<std::string> bound;
      bool ok = true;
      for (std::size_t k = 0; k < pat.vars.size(); ++k) {
        auto hit = current.find(pat.vars[k]);
        if (hit != current.end()) {
          if (hit->second != atom->args[k]) {
            ok = false;
            break;
          }
        } else {
          current.emplace(pat.vars[k], atom->args[k]);
          bound.push_back(pat.vars[k]);
        }
      }
      if (ok) rec(i + 1);
      for (const auto& v : bound) current.erase(v);
    }
  };
  rec(0);
  return out;
}

namespace {

Assignment restrict_to(const Assignment& h, const std::set<std::string>& vars) {
  Assignment out;
  for (const auto& [v, e] : h)
    if (vars.count(v)) out.emplace(v, e);
  return out;
}

}  // namespace

std::vector<Assignment> active_triggers(const Instance& I, const Dependency& d) {
  std::vector<Assignment> out;
  if (d.is_tgd()) {
    const auto& t = d.tgd();
    auto body_vars = pattern_vars(t.body);
    std::set<Assignment> seen;
    for (auto& h : eval_cq(I, t.body)) {
      Assignment key = restrict_to(h, body_vars);
      if (!seen.insert(key).second) continue;
      if (eval_cq(I, t.head, key).empty()) out.push_back(std::move(key));
    }
  } else {
    const auto& e = d.egd();
    std::set<Assignment> seen;
    for (auto& h : eval_cq(I, e.body)) {
      if (h.at(e.lhs_var) == h.at(e.rhs_var)) continue;
      if (seen.insert(h).second) out.push_back(std::move(h));
    }
  }
  return out;
}

bool is_model(const Instance& I, const std::vector<Dependency>& deps) {
  for (const auto& d : deps)
    if (!active_triggers(I, d).empty()) return false;
  return true;
}

namespace {

DomainElement replace_element(const DomainElement& e, const DomainElement& from,
                              const DomainElement& to) {
  if (e == from) return to;
  if (e.is_skolem()) {
    DomainElement out = e;
    for (auto& a : out.args) a = replace_element(a, from, to);
    return out;
  }
  return e;
}

Instance replace_in_instance(const Instance& I, const DomainElement& from,
                             const DomainElement& to) {
  Instance out;
  for (const auto& atom : I) {
    Atom moved = atom;
    for (auto& a : moved.args) a = replace_element(a, from, to);
    out.insert(std::move(moved));
  }
  return out;
}

}  // namespace

ChaseStepResult chase_step(const Instance& I, const Dependency& d, const Assignment& h,
                           std::uint64_t& null_counter) {
  ChaseStepResult result;
  if (d.is_tgd()) {
    const auto& t = d.tgd();
    Assignment extended = h;
    for (const auto& z : t.existentials)
      extended[z] = DomainElement::null(null_counter++);
    result.instance = I;
    for (const auto& atomp : t.head) {
      Atom atom;
      atom.rel = atomp.rel;
      for (const auto& v : atomp.vars) atom.args.push_back(extended.at(v));
      result.instance.insert(std::move(atom));
    }
    return result;
  }
  const auto& e = d.egd();
  DomainElement a = h.at(e.lhs_var);
  DomainElement b = h.at(e.rhs_var);
  if (a == b) throw std::logic_error("chase_step on an inactive EGD trigger");
  if (a.is_constant() && b.is_constant()) {
    result.failed = true;
    return result;
  }
  // the null goes away; between two nulls the higher index goes away
  DomainElement from, to;
  if (!a.is_constant() && !b.is_constant()) {
    bool a_goes = a.is_null() && b.is_null() ? a.index > b.index : a > b;
    from = a_goes ? a : b;
    to = a_goes ? b : a;
  } else if (a.is_constant()) {
    from = b;
    to = a;
  } else {
    from = a;
    to = b;
  }
  result.instance = replace_in_instance(I, from, to);
  result.renamed = std::make_pair(from, to);
  return result;
}

namespace {

std::uint64_t max_null_index(const Instance& I) {
  std::uint64_t mx = 0;
  for (const auto& e : active_domain(I))
    if (e.is_null()) mx = std::max(mx, e.index + 1);
  return mx;
}

Assignment rename_assignment(const Assignment& h, const DomainElement& from,
                             const DomainElement& to) {
  Assignment out;
  for (const auto& [v, e] : h) out.emplace(v, replace_element(e, from, to));
  return out;
}

using TriggerKey = std::pair<std::size_t, Assignment>;

struct ChaseRunner {
  const std::vector<Dependency>& deps;
  Instance I;
  std::size_t budget;
  std::uint64_t null_counter;
  std::vector<ChaseStep> steps;
  std::set<TriggerKey> seen;  // enqueued or fired, kept current under renaming
  std::deque<TriggerKey> queue;

  ChaseRunner(const std::vector<Dependency>& d, Instance i0, std::size_t b)
      : deps(d), I(std::move(i0)), budget(b), null_counter(max_null_index(I)) {}

  void apply_renaming(const DomainElement& from, const DomainElement& to) {
    std::set<TriggerKey> renamed;
    for (const auto& [dep, h] : seen) renamed.emplace(dep, rename_assignment(h, from, to));
    seen = std::move(renamed);
    for (auto& [dep, h] : queue) h = rename_assignment(h, from, to);
  }

  // Fires (dep, h); returns false when the chase failed.
  bool fire(std::size_t dep, const Assignment& h) {
    auto result = chase_step(I, deps[dep], h, null_counter);
    if (result.failed) return false;
    I = std::move(result.instance);
    steps.push_back({dep, h});
    seen.emplace(dep, h);
    if (result.renamed) apply_renaming(result.renamed->first, result.renamed->second);
    return true;
  }

  bool is_active(std::size_t dep, const Assignment& h) const {
    const auto& d = deps[dep];
    if (d.is_tgd()) {
      const auto& t = d.tgd();
      if (eval_cq(I, t.body, h).empty()) return false;
      return eval_cq(I, t.head, h).empty();
    }
    const auto& e = d.egd();
    if (eval_cq(I, e.body, h).empty()) return false;
    return h.at(e.lhs_var) != h.at(e.rhs_var);
  }

  void discover(bool tgds, bool egds) {
    for (std::size_t d = 0; d < deps.size(); ++d) {
      if (deps[d].is_tgd() ? !tgds : !egds) continue;
      for (auto& h : active_triggers(I, deps[d])) {
        TriggerKey key{d, std::move(h)};
        if (seen.insert(key).second) queue.push_back(std::move(key));
      }
    }
  }

  ChaseOutcome outcome(ChaseStatus status) && {
    return ChaseOutcome{status, std::move(I), std::move(steps)};
  }
};

ChaseOutcome run_fifo(ChaseRunner runner, bool egd_fair) {
  while (true) {
    if (egd_fair) {
      // saturate the EGD subset before considering any TGD
      bool saturated = false;
      while (!saturated) {
        saturated = true;
        for (std::size_t d = 0; d < runner.deps.size() && saturated; ++d) {
          if (runner.deps[d].is_tgd()) continue;
          auto triggers = active_triggers(runner.I, runner.deps[d]);
          if (triggers.empty()) continue;
          saturated = false;
          if (runner.steps.size() >= runner.budget)
            return std::move(runner).outcome(ChaseStatus::BudgetExceeded);
          if (!runner.fire(d, triggers.front()))
            return std::move(runner).outcome(ChaseStatus::Failed);
        }
      }
      runner.discover(/*tgds=*/true, /*egds=*/false);
    } else {
      runner.discover(/*tgds=*/true, /*egds=*/true);
    }
    bool fired = false;
    while (!runner.queue.empty()) {
      TriggerKey key = std::move(runner.queue.front());
      runner.queue.pop_front();
      if (!runner.is_active(key.first, key.second)) continue;
      if (runner.steps.size() >= runner.budget)
        return std::move(runner).outcome(ChaseStatus::BudgetExceeded);
      if (!runner.fire(key.first, key.second))
        return std::move(runner).outcome(ChaseStatus::Failed);
      fired = true;
      break;
    }
    if (!fired) return std::move(runner).outcome(ChaseStatus::Terminated);
  }
}

ChaseOutcome run_random(ChaseRunner runner, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  while (true) {
    std::vector<TriggerKey> actives;
    for (std::size_t d = 0; d < runner.deps.size(); ++d)
      for (auto& h : active_triggers(runner.I, runner.deps[d]))
        actives.emplace_back(d, std::move(h));
    if (actives.empty()) return std::move(runner).outcome(ChaseStatus::Terminated);
    if (runner.steps.size() >= runner.budget)
      return std::move(runner).outcome(ChaseStatus::BudgetExceeded);
    const auto& pick = actives[rng() % actives.size()];
    if (!runner.fire(pick.first, pick.second))
      return std::move(runner).outcome(ChaseStatus::Failed);
  }
}

}  // namespace

ChaseOutcome run_standard_chase(const std::vector<Dependency>& deps, Instance I0,
                                Scheduler scheduler, std::size_t budget) {
  ChaseRunner runner(deps, std::move(I0), budget);
  switch (scheduler.kind) {
    case SchedulerKind::EgdFair:
      return run_fifo(std::move(runner), /*egd_fair=*/true);
    case SchedulerKind::FifoFair:
      return run_fifo(std::move(runner), /*egd_fair=*/false);
    case SchedulerKind::RandomFair:
      return run_random(std::move(runner), scheduler.seed);
  }
  throw std::logic_error("unknown scheduler");
}

// ---- Skolem chase ---------------------------------------------------------

SkolemRule skolemize(const Tgd& tgd, std::size_t dep_index) {
  auto body_vars = pattern_vars(tgd.body);
  std::set<std::string> head_vars = pattern_vars(tgd.head);
  // frontier = body variables that occur in the head
  std::vector<std::string> frontier;
  for (const auto& v : head_vars)
    if (body_vars.count(v)) frontier.push_back(v);

  std::set<std::string> existentials(tgd.existentials.begin(), tgd.existentials.end());
  SkolemRule rule;
  rule.body = tgd.body;
  for (const auto& atomp : tgd.head) {
    SkolemAtom atom;
    atom.rel = atomp.rel;
    for (const auto& v : atomp.vars) {
      SkolemArg arg;
      if (existentials.count(v)) {
        arg.fn = "f" + std::to_string(dep_index) + "_" + v;
        arg.fn_args = frontier;
      } else {
        arg.var = v;
      }
      atom.args.push_back(std::move(arg));
    }
    rule.head.push_back(std::move(atom));
  }
  return rule;
}

std::vector<Dependency> singularize(const std::vector<Dependency>& deps, const Schema& schema) {
  if (schema.relations.count("Eq"))
    throw std::invalid_argument("schema already contains a relation named Eq");

  std::vector<Dependency> out;
  for (const auto& d : deps) {
    if (d.is_tgd()) {
      out.push_back(d);
      continue;
    }
    const auto& e = d.egd();
    // count occurrences of each variable across the body
    std::map<std::string, int> occurrences;
    for (const auto& atom : e.body)
      for (const auto& v : atom.vars) ++occurrences[v];
    auto all_vars = pattern_vars(e.body);
    auto fresh = [&](const std::string& base, int j) {
      std::string name = base + "_" + std::to_string(j);
      while (all_vars.count(name)) name += "_";
      all_vars.insert(name);
      return name;
    };
    std::vector<AtomPattern> body;
    std::map<std::string, std::vector<std::string>> copies;
    for (const auto& atom : e.body) {
      AtomPattern moved;
      moved.rel = atom.rel;
      for (const auto& v : atom.vars) {
        if (occurrences[v] <= 1) {
          moved.vars.push_back(v);
          continue;
        }
        auto& cs = copies[v];
        cs.push_back(fresh(v, static_cast<int>(cs.size()) + 1));
        moved.vars.push_back(cs.back());
      }
      body.push_back(std::move(moved));
    }
    for (const auto& [v, cs] : copies)
      for (std::size_t j = 1; j < cs.size(); ++j)
        body.push_back(AtomPattern{"Eq", {cs[0], cs[j]}});
    auto name_of = [&](const std::string& v) {
      auto it = copies.find(v);
      return it == copies.end() ? v : it->second.front();
    };
    out.push_back(make_tgd(std::move(body),
                           {AtomPattern{"Eq", {name_of(e.lhs_var), name_of(e.rhs_var)}}}));
  }

  // Eq axioms: per-position reflexivity, symmetry, transitivity.
  for (const auto& [rel, arity] : schema.relations) {
    AtomPattern base{rel, {}};
    for (int i = 0; i < arity; ++i) base.vars.push_back("x" + std::to_string(i + 1));
    for (int i = 0; i < arity; ++i) {
      const std::string& v = base.vars[i];
      out.push_back(make_tgd({base}, {AtomPattern{"Eq", {v, v}}}));
    }
  }
  out.push_back(make_tgd({AtomPattern{"Eq", {"x", "y"}}}, {AtomPattern{"Eq", {"y", "x"}}}));
  out.push_back(make_tgd({AtomPattern{"Eq", {"x", "y"}}, AtomPattern{"Eq", {"y", "z"}}},
                         {AtomPattern{"Eq", {"x", "z"}}}));

  // Substitution rules: replace any position through Eq.
  for (const auto& [rel, arity] : schema.relations) {
    for (int i = 0; i < arity; ++i) {
      AtomPattern body{rel, {}};
      AtomPattern head{rel, {}};
      for (int k = 0; k < arity; ++k) {
        std::string v = "x" + std::to_string(k + 1);
        body.vars.push_back(v);
        head.vars.push_back(k == i ? "y" : v);
      }
      out.push_back(make_tgd({body, AtomPattern{"Eq", {body.vars[i], "y"}}}, {head}));
    }
  }
  return out;
}

ChaseOutcome run_skolem_chase(const std::vector<Dependency>& deps, Instance I0,
                              std::size_t budget) {
  std::vector<SkolemRule> rules;
  for (std::size_t i = 0; i < deps.size(); ++i) {
    if (!deps[i].is_tgd())
      throw std::invalid_argument("run_skolem_chase requires TGDs; singularize EGDs first");
    rules.push_back(skolemize(deps[i].tgd(), i + 1));
  }

  ChaseOutcome out{ChaseStatus::BudgetExceeded, std::move(I0), {}};
  Instance delta = out.instance;
  Instance previous;  // instance as of the start of the previous round

  auto ground_head = [](const SkolemRule& rule, const Assignment& h) {
    std::vector<Atom> atoms;
    for (const auto& atomp : rule.head) {
      Atom atom;
      atom.rel = atomp.rel;
      for (const auto& arg : atomp.args) {
        if (!arg.var.empty()) {
          atom.args.push_back(h.at(arg.var));
        } else {
          std::vector<DomainElement> sargs;
          for (const auto& v : arg.fn_args) sargs.push_back(h.at(v));
          atom.args.push_back(DomainElement::skolem(arg.fn, std::move(sargs)));
        }
      }
      atoms.push_back(std::move(atom));
    }
    return atoms;
  };

  for (std::size_t round = 0; round < budget; ++round) {
    Instance next_delta;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const auto& rule = rules[r];
      // semi-naive: require at least one body atom in the delta
      std::set<Assignment> matches;
      for (std::size_t pivot = 0; pivot < rule.body.size(); ++pivot) {
        std::function<void(std::size_t, Assignment&)> join = [&](std::size_t i, Assignment& h) {
          if (i == rule.body.size()) {
            matches.insert(h);
            return;
          }
          const Instance& source = i < pivot ? previous : (i == pivot ? delta : out.instance);
          for (const auto& atom : source) {
            if (atom.rel != rule.body[i].rel ||
                atom.args.size() != rule.body[i].vars.size())
              continue;
            std::vector<std::string> bound;
            bool ok = true;
            for (std::size_t k = 0; k < atom.args.size(); ++k) {
              const auto& v = rule.body[i].vars[k];
              auto hit = h.find(v);
              if (hit != h.end()) {
                if (hit->second != atom.args[k]) {
                  ok = false;
                  break;
                }
              } else {
                h.emplace(v, atom.args[k]);
                bound.push_back(v);
              }
            }
            if (ok) join(i + 1, h);
            for (const auto& v : bound) h.erase(v);
          }
        };
        Assignment h;
        join(0, h);
      }
      for (const auto& h : matches) {
        for (auto& atom : ground_head(rule, h)) {
          if (!out.instance.count(atom) && !next_delta.count(atom)) {
            next_delta.insert(atom);
            out.steps.push_back({r, h});
          }
        }
      }
    }
    if (next_delta.empty()) {
      out.status = ChaseStatus::Terminated;
      return out;
    }
    previous = out.instance;
    out.instance.insert(next_delta.begin(), next_delta.end());
    delta = std::move(next_delta);
  }
  return out;
}

// ---- Homomorphisms --------------------------------------------------------

namespace {

struct HomSearch {
  const std::vector<const Atom*>& src;
  const std::map<std::string, std::vector<const Atom*>>& dst_by_rel;
  std::size_t budget;
  std::size_t visited = 0;
  bool injective;
  InstanceHom assign;
  std::set<DomainElement> used;  // images, for injective search

  bool unify(const DomainElement& a, const DomainElement& b,
             std::vector<DomainElement>& trail) {
    if (a.is_constant()) return a == b;
    auto it = assign.find(a);
    if (it != assign.end()) return it->second == b;
    if (injective && used.count(b)) return false;
    assign.emplace(a, b);
    if (injective) used.insert(b);
    trail.push_back(a);
    return true;
  }

  bool rec(std::size_t i) {
    if (++visited > budget)
      throw std::runtime_error("homomorphism search budget exceeded");
    if (i == src.size()) return true;
    const Atom& atom = *src[i];
    auto it = dst_by_rel.find(atom.rel);
    if (it == dst_by_rel.end()) return false;
    for (const Atom* cand : it->second) {
      if (cand->args.size() != atom.args.size()) continue;
      std::vector<DomainElement> trail;
      bool ok = true;
      for (std::size_t k = 0; k < atom.args.size() && ok; ++k)
        ok = unify(atom.args[k], cand->args[k], trail);
      if (ok && rec(i + 1)) return true;
      for (const auto& key : trail) {
        if (injective) used.erase(assign.at(key));
        assign.erase(key);
      }
    }
    return false;
  }
};

// Visits every homomorphism; the callback returns true to stop early.
struct HomEnumerator {
  const std::vector<const Atom*>& src;
  const std::map<std::string, std::vector<const Atom*>>& dst_by_rel;
  std::size_t budget;
  std::size_t visited = 0;
  InstanceHom assign;

  bool rec(std::size_t i, const std::function<bool(const InstanceHom&)>& cb) {
    if (++visited > budget)
      throw std::runtime_error("homomorphism search budget exceeded");
    if (i == src.size()) return cb(assign);
    const Atom& atom = *src[i];
    auto it = dst_by_rel.find(atom.rel);
    if (it == dst_by_rel.end()) return false;
    for (const Atom* cand : it->second) {
      if (cand->args.size() != atom.args.size()) continue;
      std::vector<DomainElement> trail;
      bool ok = true;
      for (std::size_t k = 0; k < atom.args.size() && ok; ++k) {
        const auto& a = atom.args[k];
        const auto& b = cand->args[k];
        if (a.is_constant()) {
          ok = a == b;
        } else {
          auto hit = assign.find(a);
          if (hit != assign.end()) {
            ok = hit->second == b;
          } else {
            assign.emplace(a, b);
            trail.push_back(a);
          }
        }
      }
      if (ok && rec(i + 1, cb)) return true;
      for (const auto& key : trail) assign.erase(key);
    }
    return false;
  }
};

std::vector<const Atom*> atom_ptrs(const Instance& I) {
  std::vector<const Atom*> out;
  for (const auto& a : I) out.push_back(&a);
  return out;
}

std::map<std::string, std::vector<const Atom*>> group_by_rel(const Instance& I) {
  std::map<std::string, std::vector<const Atom*>> out;
  for (const auto& a : I) out[a.rel].push_back(&a);
  return out;
}

}  // namespace

std::optional<InstanceHom> find_instance_hom(const Instance& I, const Instance& J,
                                             std::size_t search_budget) {
  auto src = atom_ptrs(I);
  auto dst = group_by_rel(J);
  HomSearch search{src, dst, search_budget, 0, /*injective=*/false, {}, {}};
  if (search.rec(0)) {
    // complete to a total map on the active domain (constants to themselves)
    for (const auto& e : active_domain(I))
      if (e.is_constant()) search.assign.emplace(e, e);
    return search.assign;
  }
  return std::nullopt;
}

bool is_core(const Instance& I, std::size_t search_budget) {
  auto src = atom_ptrs(I);
  auto grouped = group_by_rel(I);
  auto domain = active_domain(I);
  HomEnumerator en{src, grouped, search_budget, 0, {}};
  bool found_noninjective = en.rec(0, [&](const InstanceHom& h) {
    std::set<DomainElement> image;
    for (const auto& e : domain) {
      auto it = h.find(e);
      image.insert(it == h.end() ? e : it->second);
    }
    return image.size() < domain.size();  // stop at a collapsing endomorphism
  });
  return !found_noninjective;
}

bool instances_isomorphic(const Instance& I, const Instance& J, std::size_t search_budget) {
  if (I.size() != J.size()) return false;
  auto dom_i = active_domain(I);
  auto dom_j = active_domain(J);
  if (dom_i.size() != dom_j.size()) return false;
  auto src = atom_ptrs(I);
  auto dst = group_by_rel(J);
  HomSearch search{src, dst, search_budget, 0, /*injective=*/true, {}, {}};
  if (!search.rec(0)) return false;
  // injective on atoms and equal cardinality: the image is exactly J
  return true;
}

// ---- Text formats ---------------------------------------------------------

namespace {

struct DepTokenizer {
  explicit DepTokenizer(const std::string& s, int line) : text(s), lineno(line) {}

  std::string peek() {
    auto save = pos;
    auto t = next();
    pos = save;
    return t;
  }

  std::string next() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) return "";
    char c = text[pos];
    if (c == '(' || c == ')' || c == ',' || c == '.' || c == '=') {
      ++pos;
      return std::string(1, c);
    }
    if (c == '-' && pos + 1 < text.size() && text[pos + 1] == '>') {
      pos += 2;
      return "->";
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                   text[pos] == '_'))
        ++pos;
      return text.substr(start, pos - start);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", lineno);
  }

  void expect(const std::string& tok) {
    auto t = next();
    if (t != tok) throw ParseError("expected '" + tok + "', got '" + t + "'", lineno);
  }

  const std::string& text;
  std::size_t pos = 0;
  int lineno;
};

AtomPattern parse_atom_pattern(DepTokenizer& tok) {
  AtomPattern atom;
  atom.rel = tok.next();
  if (atom.rel.empty()) throw ParseError("expected relation name", tok.lineno);
  tok.expect("(");
  if (tok.peek() == ")") {
    tok.next();
    return atom;
  }
  while (true) {
    auto v = tok.next();
    if (v.empty() || v == "," || v == ")")
      throw ParseError("expected variable in atom", tok.lineno);
    atom.vars.push_back(v);
    auto sep = tok.next();
    if (sep == ")") break;
    if (sep != ",") throw ParseError("expected ',' or ')'", tok.lineno);
  }
  return atom;
}

std::vector<AtomPattern> parse_atom_list(DepTokenizer& tok, const std::string& stop) {
  std::vector<AtomPattern> atoms;
  while (true) {
    atoms.push_back(parse_atom_pattern(tok));
    auto p = tok.peek();
    if (p == ",") {
      tok.next();
      continue;
    }
    if (p == stop) return atoms;
    throw ParseError("expected ',' or '" + stop + "'", tok.lineno);
  }
}

}  // namespace

std::vector<Dependency> parse_dependencies(const std::string& text) {
  std::vector<Dependency> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    DepTokenizer tok(line, lineno);
    auto body = parse_atom_list(tok, "->");
    tok.expect("->");
    // head: either `x = y`, or an optional exists-prefix plus an atom list
    auto save = tok.pos;
    auto first_tok = tok.next();
    auto second_tok = tok.peek();
    if (second_tok == "=") {
      tok.next();
      auto rhs = tok.next();
      if (!tok.next().empty()) throw ParseError("trailing input after EGD", lineno);
      try {
        out.push_back(make_egd(std::move(body), first_tok, rhs));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), lineno);
      }
      continue;
    }
    std::vector<std::string> existentials;
    if (first_tok == "exists") {
      while (true) {
        auto v = tok.next();
        if (v.empty() || v == "." || v == ",")
          throw ParseError("expected variable after exists", lineno);
        existentials.push_back(v);
        auto sep = tok.next();
        if (sep == ".") break;
        if (sep != ",") throw ParseError("expected ',' or '.' in exists list", lineno);
      }
    } else {
      tok.pos = save;  // plain atom list
    }
    auto head = parse_atom_list(tok, "");
    try {
      auto dep = make_tgd(std::move(body), std::move(head));
      // existentials are recomputed; check the declared ones match
      auto& computed = std::get<Tgd>(dep.d).existentials;
      std::set<std::string> declared(existentials.begin(), existentials.end());
      std::set<std::string> found(computed.begin(), computed.end());
      if (!existentials.empty() && declared != found)
        throw ParseError("exists list does not match the head's unbound variables", lineno);
      if (existentials.empty() && !found.empty())
        throw ParseError("head uses unbound variables without an exists prefix", lineno);
      out.push_back(std::move(dep));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return out;
}

std::string print_dependencies(const std::vector<Dependency>& deps) {
  std::string out;
  for (const auto& d : deps) out += d.str() + "\n";
  return out;
}

namespace {

DomainElement parse_element(DepTokenizer& tok, std::map<std::string, std::uint64_t>& nulls) {
  auto name = tok.next();
  if (name.empty()) throw ParseError("expected domain element", tok.lineno);
  if (tok.peek() == "(") {
    tok.next();
    std::vector<DomainElement> args;
    if (tok.peek() == ")") {
      tok.next();
    } else {
      while (true) {
        args.push_back(parse_element(tok, nulls));
        auto sep = tok.next();
        if (sep == ")") break;
        if (sep != ",") throw ParseError("expected ',' or ')'", tok.lineno);
      }
    }
    return DomainElement::skolem(name, std::move(args));
  }
  if (name[0] == '_') {
    auto [it, inserted] = nulls.emplace(name, nulls.size());
    return DomainElement::null(it->second);
  }
  return DomainElement::constant(name);
}

}  // namespace

Instance parse_instance(const std::string& text) {
  Instance out;
  std::map<std::string, std::uint64_t> nulls;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    DepTokenizer tok(line, lineno);
    Atom atom;
    atom.rel = tok.next();
    tok.expect("(");
    if (tok.peek() == ")") {
      tok.next();
    } else {
      while (true) {
        atom.args.push_back(parse_element(tok, nulls));
        auto sep = tok.next();
        if (sep == ")") break;
        if (sep != ",") throw ParseError("expected ',' or ')'", lineno);
      }
    }
    if (!tok.next().empty()) throw ParseError("trailing input after atom", lineno);
    out.insert(std::move(atom));
  }
  return out;
}

std::string print_instance(const Instance& I) {
  std::string out;
  for (const auto& atom : I) out += atom.str() + "\n";
  return out;
}

std::string format_chase_trace(const std::vector<Dependency>& deps,
                               const std::vector<ChaseStep>& steps) {
  std::ostringstream out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out << "step=" << (i + 1) << " dep=" << (steps[i].dep + 1) << " trigger={";
    bool first = true;
    for (const auto& [v, e] : steps[i].trigger) {
      out << (first ? "" : ",") << v << "=" << e.str();
      first = false;
    }
    out << "} kind=" << (deps[steps[i].dep].is_tgd() ? "tgd" : "egd") << "\n";
  }
  return out.str();
}

}  // namespace saturachase
