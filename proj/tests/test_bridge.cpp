#include "doctest.h"
#include "fixtures.hpp"
#include "saturachase/bridge.hpp"

using namespace saturachase;
using namespace saturachase::testing;

namespace {

DomainElement cst(const std::string& n) { return DomainElement::constant(n); }

}  // namespace

TEST_SUITE("bridge") {
  TEST_CASE("the skolem encoding instantiates the four rule families") {
    auto deps = parse_dependencies("R(x) -> exists z. S(x,z)");
    Schema schema = infer_schema(deps);
    Instance I0{{"R", {cst("a")}}};
    auto enc = encode_skolem_to_eqsat(schema, deps, I0);

    CHECK(enc.sig.arity("top") == 0);
    CHECK(enc.sig.arity("and") == 2);
    CHECK(enc.sig.arity("R") == 1);
    CHECK(enc.sig.arity("S") == 2);
    CHECK(enc.sig.arity("f1_z") == 1);
    CHECK(enc.sig.arity("a") == 0);
    CHECK(enc.initial == Term("top"));
    // r_top, r_R, r_S, r_d, r_t
    CHECK(enc.trs.rules.size() == 5);
    CHECK(enc.trs.rules.front().str() == "top -> (and top top)");
    CHECK(enc.trs.rules.back().str() == "top -> (R a)");
  }

  TEST_CASE("empty dependencies encode to the truth split alone") {
    auto enc = encode_skolem_to_eqsat(Schema{}, {}, Instance{});
    CHECK(enc.trs.rules.size() == 1);
    CHECK(enc.relation_symbols.empty());
  }

  TEST_CASE("two-atom bodies nest conjunctions to the right") {
    auto deps = parse_dependencies("R(x,y), S(y) -> T(x)");
    Schema schema = infer_schema(deps);
    auto enc = encode_skolem_to_eqsat(schema, deps, Instance{});
    bool found = false;
    for (const auto& rule : enc.trs.rules)
      if (rule.str() == "(and (R ?x ?y) (and (S ?y) top)) -> (and (T ?x) top)")
        found = true;
    CHECK(found);
  }

  TEST_CASE("xi reads the derived instance off the e-graph") {
    auto deps = parse_dependencies("R(x) -> exists z. S(x,z)");
    Schema schema = infer_schema(deps);
    Instance I0{{"R", {cst("a")}}};
    auto enc = encode_skolem_to_eqsat(schema, deps, I0);
    auto outcome = eqsat(enc.trs, enc.initial);
    REQUIRE(outcome.status == RunStatus::Terminated);
    Instance read = xi(outcome.egraph, enc);
    Instance expected{{"R", {cst("a")}},
                      {"S", {cst("a"), DomainElement::skolem("f1_z", {cst("a")})}}};
    CHECK(read == expected);
  }

  TEST_CASE("xi of a top-only e-graph is empty") {
    auto enc = encode_skolem_to_eqsat(Schema{}, {}, Instance{});
    auto [a, root] = flatten(enc.sig, enc.initial);
    (void)root;
    CHECK(xi(rebuild(a).egraph, enc).empty());
  }

  TEST_CASE("thm15 equivalence on curated programs") {
    SUBCASE("single existential dependency") {
      auto deps = parse_dependencies("R(x) -> exists z. S(x,z)");
      Instance I0{{"R", {cst("a")}}, {"R", {cst("b")}}};
      auto report = verify_skolem_equiv(infer_schema(deps), deps, I0);
      CHECK(report.pass());
      CHECK(report.eqsat_status == RunStatus::Terminated);
    }
    SUBCASE("datalog closure") {
      auto deps = parse_dependencies("E(x,y), E(y,z) -> E(x,z)");
      Instance I0{{"E", {cst("a"), cst("b")}}, {"E", {cst("b"), cst("c")}}};
      auto report = verify_skolem_equiv(infer_schema(deps), deps, I0);
      CHECK(report.pass());
      CHECK(report.eqsat_status == RunStatus::Terminated);
    }
    SUBCASE("two-rule weakly acyclic program") {
      auto deps = parse_dependencies(
          "R(x,y) -> exists z. S(y,z)\n"
          "S(x,z) -> T(x)\n");
      Instance I0{{"R", {cst("a"), cst("b")}}};
      auto report = verify_skolem_equiv(infer_schema(deps), deps, I0);
      CHECK(report.pass());
      CHECK(report.eqsat_status == RunStatus::Terminated);
    }
    SUBCASE("nonterminating skolem tower") {
      auto deps = parse_dependencies(
          "R(x) -> exists z. S(x,z)\n"
          "S(x,z) -> R(z)\n");
      Instance I0{{"R", {cst("a")}}};
      auto report = verify_skolem_equiv(infer_schema(deps), deps, I0, 12, 3000);
      CHECK(report.pass());
      CHECK(report.eqsat_status == RunStatus::BudgetExceeded);
      CHECK(report.skolem_status == ChaseStatus::BudgetExceeded);
    }
    SUBCASE("empty dependencies reproduce the input") {
      Instance I0{{"R", {cst("a")}}};
      Schema schema;
      schema.add("R", 1);
      auto report = verify_skolem_equiv(schema, {}, I0);
      CHECK(report.pass());
    }
  }

  TEST_CASE("egraph/instance codecs are mutually inverse") {
    EGraph g = saturated_chain_egraph();
    auto [schema, I] = encode_egraph_to_instance(g);
    CHECK(schema.relations.at("R_f") == 3);
    CHECK(I.size() == g.num_nodes());
    EGraph back = decode_instance_to_egraph(I, g.sig());
    CHECK(is_isomorphic(back, g));
    auto I2 = encode_egraph_to_instance(back).second;
    CHECK(instances_isomorphic(I, I2));
  }

  TEST_CASE("flatten example maps to unary and ternary atoms") {
    Signature sig;
    sig.add("f", 2);
    sig.add("a", 0);
    auto [a, root] = flatten(sig, Term("f", {Term("a"), Term("a")}));
    (void)root;
    EGraph g = rebuild(a).egraph;
    auto [schema, I] = encode_egraph_to_instance(g);
    (void)schema;
    REQUIRE(I.size() == 2);
    std::set<std::string> rels;
    for (const auto& atom : I) rels.insert(atom.rel);
    CHECK(rels == std::set<std::string>{"R_a", "R_f"});
  }

  TEST_CASE("decoding rejects nondeterministic encodings") {
    Signature sig;
    sig.add("f", 1);
    sig.add("a", 0);
    Instance I{{"R_a", {DomainElement::null(1)}},
               {"R_f", {DomainElement::null(1), DomainElement::null(2)}},
               {"R_f", {DomainElement::null(1), DomainElement::null(3)}}};
    CHECK_THROWS(decode_instance_to_egraph(I, sig));
  }

  TEST_CASE("rule flattening matches the associativity example") {
    Trs trs = parse_trs("sig f/2\n(f (f ?x ?y) ?z) -> (f ?x (f ?y ?z))");
    auto [schema, deps] = encode_trs_to_deps(trs);
    (void)schema;
    // one FD for f plus the flattened rule
    REQUIRE(deps.size() == 2);
    CHECK_FALSE(deps[0].is_tgd());
    REQUIRE(deps[1].is_tgd());
    const auto& t = deps[1].tgd();
    REQUIRE(t.body.size() == 2);
    CHECK(t.body[0].str() == "R_f(x,y,w1)");
    CHECK(t.body[1].str() == "R_f(w1,z,r)");
    REQUIRE(t.head.size() == 2);
    CHECK(t.head[0].str() == "R_f(y,z,w2)");
    CHECK(t.head[1].str() == "R_f(x,w2,r)");
    CHECK(t.existentials == std::vector<std::string>{"w2"});
  }

  TEST_CASE("degenerate lhs grounds through every symbol") {
    Trs trs = parse_trs("sig f/2 g/1\n?x -> (g ?x)");
    auto [schema, deps] = encode_trs_to_deps(trs);
    (void)schema;
    // two FDs plus one grounding per symbol
    REQUIRE(deps.size() == 4);
    std::vector<std::string> tgds;
    for (const auto& d : deps)
      if (d.is_tgd()) tgds.push_back(d.str());
    REQUIRE(tgds.size() == 2);
    CHECK(tgds[0] == "R_f(y1,y2,x) -> R_g(x,x)");
    CHECK(tgds[1] == "R_g(y1,x) -> R_g(x,x)");
  }

  TEST_CASE("bare-variable rhs becomes the projection EGD") {
    Trs trs = parse_trs("sig f/2\n(f ?x ?y) -> ?x");
    auto [schema, deps] = encode_trs_to_deps(trs);
    (void)schema;
    REQUIRE(deps.size() == 2);
    CHECK_FALSE(deps[1].is_tgd());
    CHECK(deps[1].str() == "R_f(x,y,r) -> x = r");
  }

  TEST_CASE("thm17 equivalence on the saturating chain") {
    Trs trs = parse_trs("sig f/2 g/2 a/0\n(f ?x ?x) -> (g ?x ?x)");
    auto report = verify_chase_equiv(trs, chain_egraph(), {1, 2, 3});
    CHECK(report.eqsat_status == RunStatus::Terminated);
    CHECK(report.runs.size() == 4);
    CHECK(report.pass());
  }

  TEST_CASE("thm17 on the cyclic instance: both sides exceed budget") {
    Trs trs = parse_trs("sig f/1 g/1 a/0\n(f (g ?x)) -> (g (f ?x))");
    auto report = verify_chase_equiv(trs, cyclic_egraph(), {}, 25, 2500);
    CHECK(report.eqsat_status == RunStatus::BudgetExceeded);
    REQUIRE(report.runs.size() == 1);
    CHECK(report.runs[0].status == ChaseStatus::BudgetExceeded);
    CHECK(report.pass());
  }

  TEST_CASE("thm17 with no rules is an instant isomorphism") {
    Signature sig;
    sig.add("a", 0);
    sig.add("f", 1);
    Trs empty{sig, {}};
    Automaton a = parse_egraph_file("a() -> c0\nf(c0) -> c1\n", sig);
    auto report = verify_chase_equiv(empty, rebuild(a).egraph, {5});
    CHECK(report.pass());
    CHECK(report.eqsat_status == RunStatus::Terminated);
  }

  TEST_CASE("xi is monotone along the ico chain") {
    auto deps = parse_dependencies(
        "R(x,y) -> exists z. S(y,z)\n"
        "S(x,z) -> T(x)\n");
    Schema schema = infer_schema(deps);
    Instance I0{{"R", {cst("a"), cst("b")}}};
    auto enc = encode_skolem_to_eqsat(schema, deps, I0);
    auto [a, root] = flatten(enc.sig, enc.initial);
    (void)root;
    EGraph g = rebuild(a).egraph;
    Instance prev = xi(g, enc);
    for (int i = 0; i < 4; ++i) {
      g = ico_step(g, enc.trs);
      Instance next = xi(g, enc);
      for (const auto& atom : prev) CHECK(next.count(atom) == 1);
      prev = std::move(next);
    }
  }

  TEST_CASE("intermediate EGD-saturated bridge instances are cores") {
    Trs trs = parse_trs("sig f/2 g/2 a/0\n(f ?x ?x) -> (g ?x ?x)");
    auto [schema, deps] = encode_trs_to_deps(trs);
    (void)schema;
    auto [schema2, I0] = encode_egraph_to_instance(chain_egraph());
    (void)schema2;
    auto outcome = run_standard_chase(deps, I0, Scheduler::egd_fair());
    REQUIRE(outcome.status == ChaseStatus::Terminated);
    CHECK(is_core(outcome.instance));
    CHECK(is_core(I0));
  }
}
