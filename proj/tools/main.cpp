// saturachase: equality saturation, the chase, the reductions between
// them, and the termination analyses, behind one command line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "saturachase/acyclicity.hpp"
#include "saturachase/bridge.hpp"
#include "saturachase/eqsat.hpp"
#include "saturachase/generators.hpp"

using namespace saturachase;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

bool trace_enabled() {
  const char* env = std::getenv("SATURACHASE_LOG");
  return env && std::string(env) == "trace";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

EGraph load_egraph(const std::string& path, const Signature& sig) {
  Automaton a = parse_egraph_file(slurp(path), sig);
  auto violations = check_invariants(a);
  if (!violations.empty())
    throw std::runtime_error(path + " is not an E-graph: " + violations.front());
  return rebuild(a).egraph;
}

struct CommonOpts {
  std::string trs_path, term_path, egraph_path, deps_path, instance_path;
  std::size_t budget = kDefaultBudget;
  std::size_t node_cap = kDefaultNodeCap;
  std::string scheduler = "egd_fair";
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string dot_path;
  std::string out_trs, out_term, out_deps, out_instance;
  bool strict = false;
  bool sym = false;
  std::string input;
};

Scheduler scheduler_by_name(const std::string& name, std::uint64_t seed) {
  if (name == "egd_fair") return Scheduler::egd_fair();
  if (name == "fifo") return Scheduler::fifo_fair();
  if (name == "random") return Scheduler::random_fair(seed);
  throw std::runtime_error("unknown scheduler " + name);
}

int run_eqsat(const CommonOpts& opt) {
  Trs trs = parse_trs(slurp(opt.trs_path));
  EGraph g0 = [&] {
    if (!opt.term_path.empty()) {
      Term t = parse_term(slurp(opt.term_path), trs.sig);
      auto [a, root] = flatten(trs.sig, t);
      (void)root;
      return rebuild(a).egraph;
    }
    if (!opt.egraph_path.empty()) return load_egraph(opt.egraph_path, trs.sig);
    throw std::runtime_error("eqsat run needs --term or --egraph");
  }();
  auto outcome = eqsat(trs, std::move(g0), opt.budget, opt.node_cap);
  if (trace_enabled()) std::cout << format_run_report(outcome);
  std::cout << "status=" << (outcome.status == RunStatus::Terminated ? "terminated" : "budget")
            << " classes=" << outcome.egraph.num_classes()
            << " nodes=" << outcome.egraph.num_nodes()
            << " iterations=" << outcome.iterations << "\n";
  if (!opt.dot_path.empty()) spit(opt.dot_path, egraph_to_dot(outcome.egraph));
  if (outcome.status == RunStatus::BudgetExceeded && opt.strict) return kExitBudget;
  return kExitPass;
}

int run_chase(const CommonOpts& opt) {
  auto deps = parse_dependencies(slurp(opt.deps_path));
  Instance I0 = parse_instance(slurp(opt.instance_path));
  Scheduler sched = scheduler_by_name(opt.scheduler, opt.seeds.empty() ? 0 : opt.seeds[0]);
  auto outcome = run_standard_chase(deps, std::move(I0), sched, opt.budget);
  if (trace_enabled()) std::cout << format_chase_trace(deps, outcome.steps);
  const char* status = outcome.status == ChaseStatus::Terminated   ? "terminated"
                       : outcome.status == ChaseStatus::Failed     ? "failed"
                                                                   : "budget";
  std::cout << "status=" << status << " steps=" << outcome.steps.size()
            << " atoms=" << outcome.instance.size() << "\n";
  if (!opt.out_instance.empty()) spit(opt.out_instance, print_instance(outcome.instance));
  if (outcome.status == ChaseStatus::BudgetExceeded && opt.strict) return kExitBudget;
  return kExitPass;
}

int run_skolem(const CommonOpts& opt) {
  auto deps = parse_dependencies(slurp(opt.deps_path));
  Instance I0 = parse_instance(slurp(opt.instance_path));
  bool has_egd = false;
  for (const auto& d : deps) has_egd |= !d.is_tgd();
  if (has_egd) deps = singularize(deps, infer_schema(deps));
  auto outcome = run_skolem_chase(deps, std::move(I0), opt.budget);
  const char* status = outcome.status == ChaseStatus::Terminated ? "terminated" : "budget";
  std::cout << "status=" << status << " atoms=" << outcome.instance.size() << "\n";
  if (!opt.out_instance.empty()) spit(opt.out_instance, print_instance(outcome.instance));
  if (outcome.status == ChaseStatus::BudgetExceeded && opt.strict) return kExitBudget;
  return kExitPass;
}

int run_encode_skolem(const CommonOpts& opt) {
  auto deps = parse_dependencies(slurp(opt.deps_path));
  Instance I0 = parse_instance(slurp(opt.instance_path));
  auto enc = encode_skolem_to_eqsat(infer_schema(deps), deps, I0);
  std::string trs_text = print_trs(enc.trs);
  std::string term_text = enc.initial.str() + "\n";
  if (!opt.out_trs.empty())
    spit(opt.out_trs, trs_text);
  else
    std::cout << trs_text;
  if (!opt.out_term.empty())
    spit(opt.out_term, term_text);
  else
    std::cout << term_text;
  return kExitPass;
}

int run_encode_chase(const CommonOpts& opt) {
  Trs trs = parse_trs(slurp(opt.trs_path));
  EGraph g = load_egraph(opt.egraph_path, trs.sig);
  auto [schema, deps] = encode_trs_to_deps(trs);
  (void)schema;
  auto [schema2, instance] = encode_egraph_to_instance(g);
  (void)schema2;
  std::string deps_text = print_dependencies(deps);
  std::string inst_text = print_instance(instance);
  if (!opt.out_deps.empty())
    spit(opt.out_deps, deps_text);
  else
    std::cout << deps_text;
  if (!opt.out_instance.empty())
    spit(opt.out_instance, inst_text);
  else
    std::cout << inst_text;
  return kExitPass;
}

int run_verify_thm15(const CommonOpts& opt) {
  auto deps = parse_dependencies(slurp(opt.deps_path));
  Instance I0 = parse_instance(slurp(opt.instance_path));
  auto report = verify_skolem_equiv(infer_schema(deps), deps, I0, opt.budget, opt.node_cap);
  std::ostringstream detail;
  detail << "eqsat=" << (report.eqsat_status == RunStatus::Terminated ? "terminated" : "budget")
         << " skolem="
         << (report.skolem_status == ChaseStatus::Terminated ? "terminated" : "budget");
  if (report.eqsat_status == RunStatus::Terminated &&
      report.skolem_status == ChaseStatus::Terminated)
    detail << " set_equal=" << (report.sets_equal ? "yes" : "no");
  std::cout << format_report_line("thm15", report.pass(), detail.str());
  for (const auto& atom : report.only_in_eqsat)
    std::cout << "; only in eqsat: " << atom.str() << "\n";
  for (const auto& atom : report.only_in_skolem)
    std::cout << "; only in skolem chase: " << atom.str() << "\n";
  return report.pass() ? kExitPass : kExitFail;
}

int run_verify_thm17(const CommonOpts& opt) {
  Trs trs = parse_trs(slurp(opt.trs_path));
  EGraph g = load_egraph(opt.egraph_path, trs.sig);
  auto report = verify_chase_equiv(trs, g, opt.seeds, opt.budget, opt.node_cap);
  std::ostringstream detail;
  detail << "eqsat=" << (report.eqsat_status == RunStatus::Terminated ? "terminated" : "budget");
  for (const auto& run : report.runs) {
    detail << " " << run.name << "="
           << (run.status == ChaseStatus::Terminated
                   ? (run.isomorphic ? "isomorphic" : "terminated")
                   : run.status == ChaseStatus::Failed ? "failed" : "budget");
  }
  std::cout << format_report_line("thm17", report.pass(), detail.str());
  return report.pass() ? kExitPass : kExitFail;
}

int run_check_acyclic(const CommonOpts& opt) {
  if (!opt.trs_path.empty()) {
    Trs trs = parse_trs(slurp(opt.trs_path));
    auto result = is_weakly_term_acyclic(trs);
    std::cout << "weak_term_acyclic=" << (result.acyclic ? "true" : "false") << "\n";
    if (!result.acyclic) std::cout << "witness=" << format_witness(result.witness) << "\n";
    if (!opt.dot_path.empty())
      spit(opt.dot_path, wtdg_to_dot(build_wtdg(expand_degenerate(trs))));
    return kExitPass;
  }
  if (!opt.deps_path.empty()) {
    auto deps = parse_dependencies(slurp(opt.deps_path));
    std::cout << "weakly_acyclic=" << (is_weakly_acyclic_deps(deps) ? "true" : "false")
              << "\n";
    return kExitPass;
  }
  throw std::runtime_error("check-acyclic needs --trs or --deps");
}

int run_export_dot(const CommonOpts& opt) {
  EGraph g = [&] {
    if (!opt.trs_path.empty())
      return load_egraph(opt.egraph_path, parse_trs(slurp(opt.trs_path)).sig);
    Automaton a = parse_egraph_file(slurp(opt.egraph_path));
    auto violations = check_invariants(a);
    if (!violations.empty())
      throw std::runtime_error(opt.egraph_path + " is not an E-graph: " + violations.front());
    return rebuild(a).egraph;
  }();
  std::string dot = egraph_to_dot(g);
  if (!opt.dot_path.empty())
    spit(opt.dot_path, dot);
  else
    std::cout << dot;
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equality saturation / chase workbench"};
  app.require_subcommand(1);
  CommonOpts opt;

  auto add_budget = [&](CLI::App* cmd) {
    cmd->add_option("--budget", opt.budget, "iteration or step budget");
    cmd->add_option("--node-cap", opt.node_cap, "E-node cap for saturation");
    cmd->add_flag("--strict", opt.strict, "exit 3 on budget exhaustion");
  };

  auto* eqsat_cmd = app.add_subcommand("eqsat", "equality saturation");
  auto* eqsat_run = eqsat_cmd->add_subcommand("run", "saturate a term or E-graph");
  eqsat_run->add_option("--trs", opt.trs_path, "rewrite rules file")->required();
  eqsat_run->add_option("--term", opt.term_path, "start term file");
  eqsat_run->add_option("--egraph", opt.egraph_path, "start E-graph file");
  eqsat_run->add_option("--dot", opt.dot_path, "write the result as DOT");
  add_budget(eqsat_run);

  auto* chase_cmd = app.add_subcommand("chase", "standard chase");
  auto* chase_run = chase_cmd->add_subcommand("run", "chase an instance");
  chase_run->add_option("--deps", opt.deps_path, "dependencies file")->required();
  chase_run->add_option("--instance", opt.instance_path, "instance file")->required();
  chase_run->add_option("--scheduler", opt.scheduler, "egd_fair|fifo|random");
  chase_run->add_option("--seeds", opt.seeds, "random scheduler seeds")->delimiter(',');
  chase_run->add_option("--out", opt.out_instance, "write the result instance");
  add_budget(chase_run);

  auto* skolem_cmd = app.add_subcommand("skolem", "Skolem chase");
  auto* skolem_run = skolem_cmd->add_subcommand("run", "saturate the skolemized rules");
  skolem_run->add_option("--deps", opt.deps_path, "dependencies file")->required();
  skolem_run->add_option("--instance", opt.instance_path, "instance file")->required();
  skolem_run->add_option("--out", opt.out_instance, "write the result instance");
  add_budget(skolem_run);

  auto* encode_cmd = app.add_subcommand("encode", "the two reductions");
  auto* enc_skolem = encode_cmd->add_subcommand("skolem2eqsat", "dependencies to rewrite rules");
  enc_skolem->add_option("--deps", opt.deps_path)->required();
  enc_skolem->add_option("--instance", opt.instance_path)->required();
  enc_skolem->add_option("--out-trs", opt.out_trs);
  enc_skolem->add_option("--out-term", opt.out_term);
  auto* enc_chase = encode_cmd->add_subcommand("eqsat2chase", "rewrite rules to dependencies");
  enc_chase->add_option("--trs", opt.trs_path)->required();
  enc_chase->add_option("--egraph", opt.egraph_path)->required();
  enc_chase->add_option("--out-deps", opt.out_deps);
  enc_chase->add_option("--out-instance", opt.out_instance);

  auto* verify_cmd = app.add_subcommand("verify", "cross-verify the reductions");
  auto* v15 = verify_cmd->add_subcommand("thm15", "Skolem chase vs encoded EqSat");
  v15->add_option("--deps", opt.deps_path)->required();
  v15->add_option("--instance", opt.instance_path)->required();
  add_budget(v15);
  auto* v17 = verify_cmd->add_subcommand("thm17", "EqSat vs encoded standard chase");
  v17->add_option("--trs", opt.trs_path)->required();
  v17->add_option("--egraph", opt.egraph_path)->required();
  v17->add_option("--seeds", opt.seeds, "random-fair seeds")->delimiter(',');
  add_budget(v17);

  auto* acyclic = app.add_subcommand("check-acyclic", "weak term acyclicity");
  acyclic->add_option("--trs", opt.trs_path, "rewrite rules file");
  acyclic->add_option("--deps", opt.deps_path, "dependencies file (classic criterion)");
  acyclic->add_option("--dot", opt.dot_path, "write the dependency graph as DOT");

  std::string tm_path, pcp_path;
  auto* gen_cmd = app.add_subcommand("gen", "nontermination corpora");
  auto* gen_tm = gen_cmd->add_subcommand("tm", "Turing machine to rewrite system");
  gen_tm->add_option("--tm", tm_path, "machine file")->required();
  gen_tm->add_option("--input", opt.input, "input word (single-character symbols)");
  gen_tm->add_flag("--sym", opt.sym, "emit the symmetric closure");
  gen_tm->add_option("--out-trs", opt.out_trs);
  gen_tm->add_option("--out-term", opt.out_term);
  auto* gen_pcp = gen_cmd->add_subcommand("pcp", "PCP instance to rewrite system");
  gen_pcp->add_option("--pcp", pcp_path, "pairs file")->required();
  gen_pcp->add_option("--out-trs", opt.out_trs);
  gen_pcp->add_option("--out-term", opt.out_term);

  auto* export_cmd = app.add_subcommand("export", "exports");
  auto* export_dot = export_cmd->add_subcommand("dot", "E-graph to DOT");
  export_dot->add_option("--egraph", opt.egraph_path)->required();
  export_dot->add_option("--trs", opt.trs_path, "signature source");
  export_dot->add_option("--dot", opt.dot_path, "output path (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (eqsat_run->parsed()) return run_eqsat(opt);
    if (chase_run->parsed()) return run_chase(opt);
    if (skolem_run->parsed()) return run_skolem(opt);
    if (enc_skolem->parsed()) return run_encode_skolem(opt);
    if (enc_chase->parsed()) return run_encode_chase(opt);
    if (v15->parsed()) return run_verify_thm15(opt);
    if (v17->parsed()) return run_verify_thm17(opt);
    if (acyclic->parsed()) return run_check_acyclic(opt);
    if (gen_tm->parsed()) {
      TuringMachine m = parse_tm(slurp(tm_path));
      TmEncoding enc = tm_to_srs(m);
      Trs trs = srs_to_trs(enc.srs);
      if (opt.sym) trs = symmetric_closure(trs);
      Str input;
      for (char ch : opt.input) input.push_back(std::string(1, ch));
      Term start = string_to_term(initial_config_string(m, input));
      if (!opt.out_trs.empty())
        spit(opt.out_trs, print_trs(trs));
      else
        std::cout << print_trs(trs);
      if (!opt.out_term.empty())
        spit(opt.out_term, start.str() + "\n");
      else
        std::cout << start.str() << "\n";
      return kExitPass;
    }
    if (gen_pcp->parsed()) {
      Trs trs = pcp_to_trs(parse_pcp(slurp(pcp_path)));
      if (!opt.out_trs.empty())
        spit(opt.out_trs, print_trs(trs));
      else
        std::cout << print_trs(trs);
      if (!opt.out_term.empty())
        spit(opt.out_term, pcp_start_term().str() + "\n");
      else
        std::cout << pcp_start_term().str() << "\n";
      return kExitPass;
    }
    if (export_dot->parsed()) return run_export_dot(opt);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cerr << "error: no subcommand\n";
  return kExitUsage;
}
