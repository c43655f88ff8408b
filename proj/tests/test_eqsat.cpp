#include "doctest.h"
#include "fixtures.hpp"
#include "saturachase/eqsat.hpp"

using namespace saturachase;
using namespace saturachase::testing;

namespace {

Trs fxx_to_gxx() { return parse_trs("sig f/2 g/2 a/0\n(f ?x ?x) -> (g ?x ?x)"); }

}  // namespace

TEST_SUITE("eqsat") {
  TEST_CASE("ematch finds the three chain matches") {
    EGraph g = chain_egraph();
    auto matches = ematch(g, fxx_to_gxx().rules[0].lhs);
    REQUIRE(matches.size() == 3);
    for (const auto& m : matches) {
      REQUIRE(m.subst.size() == 1);
      ClassId x = m.subst.at("x");
      // the root is the class of f(x, x)
      auto found = g.lookup(ENode{"f", {x, x}});
      REQUIRE(found.has_value());
      CHECK(*found == g.find(m.root));
    }
  }

  TEST_CASE("a bare variable matches every class") {
    EGraph g = chain_egraph();
    auto matches = ematch(g, Pattern::variable("x"));
    CHECK(matches.size() == g.num_classes());
    for (const auto& m : matches) CHECK(m.subst.at("x") == g.find(m.root));
  }

  TEST_CASE("nonlinear patterns respect class equality") {
    Signature sig;
    sig.add("f", 2);
    sig.add("a", 0);
    sig.add("b", 0);
    Automaton a = parse_egraph_file("a() -> ca\nb() -> cb\nf(ca,cb) -> c\n", sig);
    EGraph g = rebuild(a).egraph;
    Pattern fxx = Pattern::app("f", {Pattern::variable("x"), Pattern::variable("x")});
    CHECK(ematch(g, fxx).empty());
  }

  TEST_CASE("one ico step saturates the chain") {
    EGraph g = chain_egraph();
    EGraph h = ico_step(g, fxx_to_gxx());
    CHECK(is_isomorphic(h, saturated_chain_egraph()));
    CHECK(find_homomorphism(g, h).has_value());  // inflationary
    EGraph h2 = ico_step(h, fxx_to_gxx());
    CHECK(is_isomorphic(h2, h));  // fixpoint
  }

  TEST_CASE("apply_matches with no rules leaves the graph unchanged") {
    EGraph g = chain_egraph();
    Trs empty{g.sig(), {}};
    Automaton a = apply_matches(g, empty);
    CHECK(a.transitions().size() == g.num_nodes());
    CHECK(is_isomorphic(rebuild(a).egraph, g));
  }

  TEST_CASE("a bare-variable rhs merges the matched class") {
    Trs trs = parse_trs("sig f/2 a/0 b/0\n(f ?x ?y) -> ?x");
    Signature sig = trs.sig;
    auto [a0, root] = flatten(sig, parse_term("(f a b)", sig));
    EGraph g = rebuild(a0).egraph;
    EGraph h = ico_step(g, trs);
    auto fa = accepts(h, parse_term("(f a b)", sig));
    auto aa = accepts(h, parse_term("a", sig));
    REQUIRE(fa.has_value());
    REQUIRE(aa.has_value());
    CHECK(*fa == *aa);
    CHECK(h.find(root) == *aa);
  }

  TEST_CASE("eqsat terminates on the power term with 4 classes and 7 nodes") {
    auto outcome = eqsat(fxx_to_gxx(), power_term());
    CHECK(outcome.status == RunStatus::Terminated);
    CHECK(outcome.egraph.num_classes() == 4);
    CHECK(outcome.egraph.num_nodes() == 7);
    CHECK(check_model(outcome.egraph, fxx_to_gxx()).empty());
  }

  TEST_CASE("eqsat equates f(g(a)) with g(f(a)) on the flat start") {
    Trs trs = parse_trs("sig f/1 g/1 a/0\n(f (g ?x)) -> (g (f ?x))");
    auto outcome = eqsat(trs, parse_term("(f (g a))", trs.sig));
    CHECK(outcome.status == RunStatus::Terminated);
    CHECK(pcr_related(outcome.egraph, parse_term("(f (g a))", trs.sig),
                      parse_term("(g (f a))", trs.sig)));
  }

  TEST_CASE("eqsat exceeds the budget on the cyclic e-graph") {
    Trs trs = parse_trs("sig f/1 g/1 a/0\n(f (g ?x)) -> (g (f ?x))");
    auto outcome = eqsat(trs, cyclic_egraph(), 40, 4000);
    CHECK(outcome.status == RunStatus::BudgetExceeded);
  }

  TEST_CASE("terminated runs are models and one more step is isomorphic") {
    Trs trs = fxx_to_gxx();
    auto outcome = eqsat(trs, power_term());
    REQUIRE(outcome.status == RunStatus::Terminated);
    CHECK(check_model(outcome.egraph, trs).empty());
    CHECK(is_isomorphic(ico_step(outcome.egraph, trs), outcome.egraph));
  }

  TEST_CASE("history changes strictly until the final round") {
    auto outcome = eqsat(fxx_to_gxx(), power_term());
    REQUIRE(outcome.status == RunStatus::Terminated);
    REQUIRE(outcome.iterations == outcome.history.size());
    const auto& h = outcome.history;
    for (std::size_t i = 1; i + 1 < h.size(); ++i) {
      bool changed = h[i].merges > 0 || h[i].nodes != h[i - 1].nodes ||
                     h[i].classes != h[i - 1].classes;
      CHECK(changed);
    }
    // the final round is the detected fixpoint
    REQUIRE(h.size() >= 2);
    CHECK(h.back().merges == 0);
    CHECK(h.back().nodes == h[h.size() - 2].nodes);
    CHECK(h.back().classes == h[h.size() - 2].classes);
  }

  TEST_CASE("check_model pinpoints the violating substitution") {
    EGraph g = chain_egraph();
    auto violations = check_model(g, fxx_to_gxx());
    CHECK(violations.size() == 3);
    CHECK(check_model(saturated_chain_egraph(), fxx_to_gxx()).empty());
    Trs empty{g.sig(), {}};
    CHECK(check_model(g, empty).empty());
  }

  TEST_CASE("representation lemma is strict for the dropping system") {
    Trs trs = parse_trs("sig f/2 a/0 b/0 c/0\na -> b\nc -> b");
    Term fab = parse_term("(f a b)", trs.sig);
    auto [a0, root] = flatten(trs.sig, fab);
    (void)root;
    EGraph g0 = rebuild(a0).egraph;
    auto outcome = eqsat(trs, g0);
    REQUIRE(outcome.status == RunStatus::Terminated);
    auto report = verify_representation(trs, g0, outcome.egraph, fab, 3);
    CHECK(report.holds());
    CHECK(report.reachable.size() == 2);
    CHECK(report.egraph_class.size() == 4);
    CHECK(report.joined_class.size() == 9);
  }

  TEST_CASE("representation collapses to equality for symmetric systems") {
    Trs trs = parse_trs("sig f/1 g/1 a/0\n(f (g ?x)) -> (g (f ?x))");
    Trs sym = symmetric_closure(trs);
    Term start = parse_term("(f (g a))", trs.sig);
    auto [a0, root] = flatten(trs.sig, start);
    (void)root;
    EGraph g0 = rebuild(a0).egraph;
    auto outcome = eqsat(sym, g0);
    REQUIRE(outcome.status == RunStatus::Terminated);
    auto report = verify_representation(sym, g0, outcome.egraph, start, 6);
    CHECK(report.all_equal());
  }

  TEST_CASE("empty rule set keeps the start class as the whole story") {
    Signature sig;
    sig.add("f", 2);
    sig.add("a", 0);
    sig.add("b", 0);
    Trs empty{sig, {}};
    Term fab = parse_term("(f a b)", sig);
    auto [a0, root] = flatten(sig, fab);
    (void)root;
    EGraph g0 = rebuild(a0).egraph;
    auto outcome = eqsat(empty, g0);
    REQUIRE(outcome.status == RunStatus::Terminated);
    auto report = verify_representation(empty, g0, outcome.egraph, fab, 4);
    CHECK(report.all_equal());
    CHECK(report.reachable == std::set<Term>{fab});
  }

  TEST_CASE("run report format is stable") {
    auto outcome = eqsat(fxx_to_gxx(), power_term());
    std::string report = format_run_report(outcome);
    CHECK(report.find("iter=1 classes=4 nodes=7") == 0);
    CHECK(report.find("status=terminated") != std::string::npos);
  }
}
