#include "saturachase/bridge.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace saturachase {

namespace {

Pattern fold_conjunction(const std::vector<Pattern>& atoms) {
  Pattern acc = Pattern::app(SkolemEncoding::kTop);
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it)
    acc = Pattern::app(SkolemEncoding::kAnd, {*it, acc});
  return acc;
}

}  // namespace

SkolemEncoding encode_skolem_to_eqsat(const Schema& schema,
                                      const std::vector<Dependency>& deps,
                                      const Instance& I0) {
  SkolemEncoding enc;
  enc.sig.add(SkolemEncoding::kTop, 0);
  enc.sig.add(SkolemEncoding::kAnd, 2);

  for (const auto& [rel, arity] : schema.relations) {
    enc.sig.add(rel, arity);
    enc.relation_symbols.insert(rel);
  }

  std::vector<SkolemRule> rules;
  for (std::size_t i = 0; i < deps.size(); ++i) {
    if (!deps[i].is_tgd())
      throw std::invalid_argument("encode_skolem_to_eqsat requires TGDs; singularize first");
    rules.push_back(skolemize(deps[i].tgd(), i + 1));
    for (const auto& atom : rules.back().head)
      for (const auto& arg : atom.args)
        if (!arg.fn.empty()) {
          enc.sig.add(arg.fn, static_cast<int>(arg.fn_args.size()));
          enc.skolem_symbols.insert(arg.fn);
        }
  }
  for (const auto& atom : I0) {
    for (const auto& e : atom.args) {
      if (!e.is_constant())
        throw std::invalid_argument(
            "the Skolem encoding expects a null-free initial instance");
      enc.sig.add(e.name, 0);
      enc.constant_symbols.insert(e.name);
    }
  }

  enc.trs.sig = enc.sig;
  Pattern top = Pattern::app(SkolemEncoding::kTop);
  // r_top
  enc.trs.rules.push_back({top, Pattern::app(SkolemEncoding::kAnd, {top, top})});
  // r_R per relation
  for (const auto& [rel, arity] : schema.relations) {
    std::vector<Pattern> vars;
    for (int i = 0; i < arity; ++i) vars.push_back(Pattern::variable("x" + std::to_string(i + 1)));
    enc.trs.rules.push_back({Pattern::app(rel, std::move(vars)), top});
  }
  // r_d per dependency
  for (const auto& rule : rules) {
    std::vector<Pattern> body;
    for (const auto& atom : rule.body) {
      std::vector<Pattern> args;
      for (const auto& v : atom.vars) args.push_back(Pattern::variable(v));
      body.push_back(Pattern::app(atom.rel, std::move(args)));
    }
    std::vector<Pattern> head;
    for (const auto& atom : rule.head) {
      std::vector<Pattern> args;
      for (const auto& arg : atom.args) {
        if (!arg.var.empty()) {
          args.push_back(Pattern::variable(arg.var));
        } else {
          std::vector<Pattern> sargs;
          for (const auto& v : arg.fn_args) sargs.push_back(Pattern::variable(v));
          args.push_back(Pattern::app(arg.fn, std::move(sargs)));
        }
      }
      head.push_back(Pattern::app(atom.rel, std::move(args)));
    }
    enc.trs.rules.push_back({fold_conjunction(body), fold_conjunction(head)});
  }
  // r_t per input tuple
  for (const auto& atom : I0) {
    std::vector<Pattern> args;
    for (const auto& e : atom.args) args.push_back(Pattern::app(e.name));
    enc.trs.rules.push_back({top, Pattern::app(atom.rel, std::move(args))});
  }
  validate_trs(enc.trs);
  enc.initial = Term(SkolemEncoding::kTop);
  return enc;
}

namespace {

// All constant/Skolem-term readbacks of a class. Guards against cycles
// through Skolem symbols, which a well-formed encoding never produces.
std::set<DomainElement> readbacks(const EGraph& g, const SkolemEncoding& enc, ClassId c,
                                  std::map<ClassId, std::set<DomainElement>>& memo,
                                  std::set<ClassId>& in_progress) {
  c = g.find(c);
  auto hit = memo.find(c);
  if (hit != memo.end()) return hit->second;
  if (!in_progress.insert(c).second)
    throw std::runtime_error("malformed encoding: cyclic Skolem-term class " +
                             g.class_name(c));
  std::set<DomainElement> out;
  for (const auto& node : g.nodes_of(c)) {
    if (enc.constant_symbols.count(node.op)) {
      out.insert(DomainElement::constant(node.op));
    } else if (enc.skolem_symbols.count(node.op)) {
      std::vector<std::set<DomainElement>> child_sets;
      for (ClassId ch : node.children)
        child_sets.push_back(readbacks(g, enc, ch, memo, in_progress));
      std::vector<DomainElement> acc;
      std::function<void(std::size_t)> combos = [&](std::size_t i) {
        if (i == child_sets.size()) {
          out.insert(DomainElement::skolem(node.op, acc));
          return;
        }
        for (const auto& e : child_sets[i]) {
          acc.push_back(e);
          combos(i + 1);
          acc.pop_back();
        }
      };
      combos(0);
    }
  }
  in_progress.erase(c);
  memo.emplace(c, out);
  return out;
}

}  // namespace

Instance xi(const EGraph& g, const SkolemEncoding& enc) {
  Instance out;
  std::map<ClassId, std::set<DomainElement>> memo;
  std::set<ClassId> in_progress;
  for (const auto& [node, target] : g.nodes()) {
    (void)target;
    if (!enc.relation_symbols.count(node.op)) continue;
    std::vector<std::set<DomainElement>> arg_sets;
    for (ClassId ch : node.children) {
      auto elems = readbacks(g, enc, ch, memo, in_progress);
      if (elems.empty())
        throw std::runtime_error(
            "malformed encoding: relation argument class " + g.class_name(ch) +
            " represents no constant or Skolem term");
      arg_sets.push_back(std::move(elems));
    }
    std::vector<DomainElement> acc;
    std::function<void(std::size_t)> combos = [&](std::size_t i) {
      if (i == arg_sets.size()) {
        out.insert(Atom{node.op, acc});
        return;
      }
      for (const auto& e : arg_sets[i]) {
        acc.push_back(e);
        combos(i + 1);
        acc.pop_back();
      }
    };
    combos(0);
  }
  return out;
}

SkolemEquivReport verify_skolem_equiv(const Schema& schema,
                                      const std::vector<Dependency>& deps,
                                      const Instance& I0, std::size_t budget,
                                      std::size_t node_cap) {
  SkolemEncoding enc = encode_skolem_to_eqsat(schema, deps, I0);
  auto eq = eqsat(enc.trs, enc.initial, budget, node_cap);
  auto sk = run_skolem_chase(deps, I0, budget);

  SkolemEquivReport report;
  report.eqsat_status = eq.status;
  report.skolem_status = sk.status;
  report.statuses_agree =
      (eq.status == RunStatus::Terminated) == (sk.status == ChaseStatus::Terminated);
  if (eq.status == RunStatus::Terminated && sk.status == ChaseStatus::Terminated) {
    Instance from_eqsat = xi(eq.egraph, enc);
    report.sets_equal = from_eqsat == sk.instance;
    std::set_difference(from_eqsat.begin(), from_eqsat.end(), sk.instance.begin(),
                        sk.instance.end(),
                        std::inserter(report.only_in_eqsat, report.only_in_eqsat.end()));
    std::set_difference(sk.instance.begin(), sk.instance.end(), from_eqsat.begin(),
                        from_eqsat.end(),
                        std::inserter(report.only_in_skolem, report.only_in_skolem.end()));
  }
  return report;
}

// ---- EqSat -> standard chase ----------------------------------------------

namespace {

std::string relation_for(const std::string& symbol) { return "R_" + symbol; }

}  // namespace

std::pair<Schema, Instance> encode_egraph_to_instance(const EGraph& g) {
  Schema schema;
  for (const auto& [name, arity] : g.sig().symbols())
    schema.add(relation_for(name), arity + 1);
  Instance I;
  for (const auto& [node, target] : g.nodes()) {
    Atom atom;
    atom.rel = relation_for(node.op);
    for (ClassId c : node.children) atom.args.push_back(DomainElement::null(g.find(c)));
    atom.args.push_back(DomainElement::null(target));
    I.insert(std::move(atom));
  }
  return {std::move(schema), std::move(I)};
}

EGraph decode_instance_to_egraph(const Instance& I, const Signature& sig) {
  Automaton a(sig);
  std::map<DomainElement, ClassId> states;
  auto state = [&](const DomainElement& e) {
    auto it = states.find(e);
    if (it != states.end()) return it->second;
    ClassId id = a.add_state(e.str());
    states.emplace(e, id);
    return id;
  };
  for (const auto& atom : I) {
    if (atom.rel.rfind("R_", 0) != 0)
      throw std::invalid_argument("not an E-graph encoding: relation " + atom.rel);
    std::string symbol = atom.rel.substr(2);
    if (!sig.contains(symbol))
      throw std::invalid_argument("unknown encoded symbol " + symbol);
    if (atom.args.empty())
      throw std::invalid_argument("encoded atom missing its target argument");
    ENode node;
    node.op = symbol;
    for (std::size_t i = 0; i + 1 < atom.args.size(); ++i)
      node.children.push_back(state(atom.args[i]));
    a.add_transition(std::move(node), state(atom.args.back()));
  }
  auto violations = check_invariants(a);
  if (!violations.empty())
    throw std::invalid_argument("instance does not encode an E-graph: " + violations.front());
  return rebuild(a).egraph;
}

EGraph decode_instance_to_egraph(const Instance& I) {
  Signature sig;
  for (const auto& atom : I) {
    if (atom.rel.rfind("R_", 0) != 0)
      throw std::invalid_argument("not an E-graph encoding: relation " + atom.rel);
    sig.add(atom.rel.substr(2), static_cast<int>(atom.args.size()) - 1);
  }
  return decode_instance_to_egraph(I, sig);
}

namespace {

// Turns a pattern into body/head atoms sharing the rule's variable space.
// Internal (non-root, non-variable) nodes get fresh variables; shared
// sub-patterns within one side reuse one variable.
struct PatternFlattener {
  std::set<std::string>& used;
  int counter = 0;

  std::string fresh() {
    std::string name;
    do {
      name = "w" + std::to_string(++counter);
    } while (used.count(name));
    used.insert(name);
    return name;
  }

  // Flattens p rooted at `root_var`, appending atoms; returns the
  // variables freshly introduced (in introduction order).
  std::vector<std::string> flatten(const Pattern& p, const std::string& root_var,
                                   std::vector<AtomPattern>& atoms) {
    std::vector<std::string> introduced;
    std::map<Pattern, std::string> names;
    std::function<std::string(const Pattern&, bool)> rec =
        [&](const Pattern& q, bool is_root) -> std::string {
      if (q.is_var()) return q.var;
      if (!is_root) {
        auto it = names.find(q);
        if (it != names.end()) return it->second;
      }
      AtomPattern atom;
      atom.rel = relation_for(q.head);
      for (const auto& c : q.children) atom.vars.push_back(rec(c, false));
      std::string var = is_root ? root_var : fresh();
      if (!is_root) {
        names.emplace(q, var);
        introduced.push_back(var);
      }
      atom.vars.push_back(var);
      atoms.push_back(std::move(atom));
      return var;
    };
    rec(p, true);
    return introduced;
  }
};

void encode_rule(const Pattern& lhs, const Pattern& rhs, const Signature& sig,
                 std::vector<Dependency>& out) {
  if (lhs.is_var()) {
    // Ground the bare variable with one dependency per symbol; the rule's
    // variable doubles as the root, so the head needs no root unification.
    for (const auto& [name, arity] : sig.symbols()) {
      std::set<std::string> used = rhs.vars();
      used.insert(lhs.var);
      AtomPattern ground{relation_for(name), {}};
      int counter = 0;
      while (static_cast<int>(ground.vars.size()) < arity) {
        std::string v = "y" + std::to_string(++counter);
        if (used.insert(v).second) ground.vars.push_back(v);
      }
      ground.vars.push_back(lhs.var);
      std::vector<AtomPattern> body{ground};
      if (rhs.is_var()) {
        out.push_back(make_egd(std::move(body), rhs.var, lhs.var));
        continue;
      }
      PatternFlattener fl{used};
      std::vector<AtomPattern> head;
      fl.flatten(rhs, lhs.var, head);
      out.push_back(make_tgd(std::move(body), std::move(head)));
    }
    return;
  }

  std::set<std::string> used = lhs.vars();
  for (const auto& v : rhs.vars()) used.insert(v);
  std::string root = "r";
  while (used.count(root)) root += "_";
  used.insert(root);
  PatternFlattener fl{used};

  std::vector<AtomPattern> body;
  fl.flatten(lhs, root, body);

  if (rhs.is_var()) {
    out.push_back(make_egd(std::move(body), rhs.var, root));
    return;
  }
  std::vector<AtomPattern> head;
  fl.flatten(rhs, root, head);
  out.push_back(make_tgd(std::move(body), std::move(head)));
}

}  // namespace

std::pair<Schema, std::vector<Dependency>> encode_trs_to_deps(const Trs& trs) {
  Schema schema;
  std::vector<Dependency> deps;
  // functional dependency per symbol
  for (const auto& [name, arity] : trs.sig.symbols()) {
    schema.add(relation_for(name), arity + 1);
    AtomPattern a{relation_for(name), {}};
    AtomPattern b{relation_for(name), {}};
    for (int i = 0; i < arity; ++i) {
      a.vars.push_back("x" + std::to_string(i + 1));
      b.vars.push_back("x" + std::to_string(i + 1));
    }
    a.vars.push_back("x");
    b.vars.push_back("x_");
    deps.push_back(make_egd({a, b}, "x", "x_"));
  }
  for (const auto& rule : trs.rules) encode_rule(rule.lhs, rule.rhs, trs.sig, deps);
  return {std::move(schema), std::move(deps)};
}

ChaseEquivReport verify_chase_equiv(const Trs& trs, const EGraph& g,
                                    const std::vector<std::uint64_t>& seeds,
                                    std::size_t budget, std::size_t node_cap) {
  ChaseEquivReport report;
  auto eq = eqsat(trs, g, budget, node_cap);
  report.eqsat_status = eq.status;

  auto [schema, deps] = encode_trs_to_deps(trs);
  (void)schema;
  auto [schema2, I0] = encode_egraph_to_instance(g);
  (void)schema2;

  Instance expected;
  if (eq.status == RunStatus::Terminated)
    expected = encode_egraph_to_instance(eq.egraph).second;

  std::size_t chase_budget = budget * 40;
  std::vector<std::pair<std::string, Scheduler>> schedules;
  schedules.emplace_back("egd_fair", Scheduler::egd_fair());
  for (auto s : seeds)
    schedules.emplace_back("random_fair(" + std::to_string(s) + ")", Scheduler::random_fair(s));

  for (const auto& [name, sched] : schedules) {
    auto outcome = run_standard_chase(deps, I0, sched, chase_budget);
    ChaseEquivRun run{name, outcome.status, false};
    if (outcome.status == ChaseStatus::Terminated && eq.status == RunStatus::Terminated)
      run.isomorphic = instances_isomorphic(outcome.instance, expected);
    report.runs.push_back(std::move(run));
  }
  return report;
}

std::string format_report_line(const std::string& check, bool pass, const std::string& detail) {
  std::string line = "check=" + check + " status=" + (pass ? "pass" : "fail");
  if (!detail.empty()) line += " detail=" + detail;
  return line + "\n";
}

}  // namespace saturachase
