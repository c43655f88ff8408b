#include "doctest.h"
#include "fixtures.hpp"
#include "saturachase/bridge.hpp"
#include "saturachase/eqsat.hpp"
#include "support.hpp"

using namespace saturachase;
using namespace saturachase::testing;

namespace {

Signature random_sig(Rng& rng) {
  Signature sig;
  sig.add("a", 0);
  if (rng() % 2 == 0) sig.add("b", 0);
  sig.add("f", 1 + static_cast<int>(rng() % 2));
  if (rng() % 2 == 0) sig.add("g", 1);
  return sig;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("rigidity: the self-homomorphism is the identity") {
    Rng rng(0xA11CE);
    for (int i = 0; i < 120; ++i) {
      EGraph g = random_egraph(rng, random_sig(rng), 6);
      auto hom = find_homomorphism(g, g);
      REQUIRE(hom.has_value());
      for (const auto& [c, image] : *hom) CHECK(c == image);
    }
  }

  TEST_CASE("mutual homomorphisms imply isomorphism") {
    Rng rng(0xB0B);
    int isomorphic_pairs = 0;
    for (int i = 0; i < 120; ++i) {
      Signature sig = random_sig(rng);
      EGraph g = random_egraph(rng, sig, 5);
      EGraph h = random_egraph(rng, sig, 5);
      bool gh = find_homomorphism(g, h).has_value();
      bool hg = find_homomorphism(h, g).has_value();
      if (gh && hg) {
        ++isomorphic_pairs;
        CHECK(is_isomorphic(g, h));
      }
    }
    CHECK(isomorphic_pairs > 0);
  }

  TEST_CASE("homomorphisms transport accepted terms") {
    Rng rng(0xC0FFEE);
    Trs trs = parse_trs("sig f/2 g/2 a/0\n(f ?x ?x) -> (g ?x ?x)");
    for (int i = 0; i < 100; ++i) {
      EGraph g = random_egraph(rng, sig_fg2a(), 5);
      EGraph h = ico_step(g, trs);
      auto hom = find_homomorphism(g, h);
      REQUIRE(hom.has_value());
      for (ClassId c : g.classes()) {
        for (const auto& t : enumerate_terms(g, c, 7)) {
          auto target = accepts(h, t);
          REQUIRE(target.has_value());
          CHECK(*target == hom->at(c));
        }
      }
    }
  }

  TEST_CASE("pcr containment along homomorphisms") {
    Rng rng(0xDE11A);
    Trs trs = parse_trs("sig f/2 g/2 a/0\n(f ?x ?y) -> (f ?y ?x)");
    for (int i = 0; i < 100; ++i) {
      EGraph g = random_egraph(rng, sig_fg2a(), 4);
      EGraph h = ico_step(g, trs);
      std::vector<Term> sample;
      for (ClassId c : g.classes()) {
        auto terms = enumerate_terms(g, c, 5);
        sample.insert(sample.end(), terms.begin(), terms.end());
        if (sample.size() > 12) break;
      }
      for (const auto& t1 : sample)
        for (const auto& t2 : sample)
          if (pcr_related(g, t1, t2)) CHECK(pcr_related(h, t1, t2));
    }
  }

  TEST_CASE("rebuild is idempotent and order-independent") {
    Rng rng(0xF00D);
    for (int i = 0; i < 120; ++i) {
      EGraph g = random_egraph(rng, random_sig(rng), 6);
      CHECK(is_isomorphic(rebuild(g.to_automaton()).egraph, g));

      // shuffle the transitions and rebuild again
      Automaton a = g.to_automaton();
      Automaton shuffled(g.sig());
      for (std::size_t s = 0; s < a.num_states(); ++s)
        shuffled.add_state(a.state_name(static_cast<ClassId>(s)));
      std::vector<Transition> ts = a.transitions();
      std::shuffle(ts.begin(), ts.end(), rng);
      for (const auto& t : ts) shuffled.add_transition(t.node, t.target);
      CHECK(is_isomorphic(rebuild(shuffled).egraph, g));
    }
  }

  TEST_CASE("congruence-closure universality on explicit upper bounds") {
    Rng rng(0x5EED);
    Trs trs = parse_trs("sig f/2 g/2 a/0\n(f ?x ?x) -> (g ?x ?x)");
    for (int i = 0; i < 60; ++i) {
      EGraph g = random_egraph(rng, sig_fg2a(), 4);
      // A = T_R(G) is below its rebuild, and below any e-graph above A
      Automaton a = apply_matches(g, trs);
      EGraph rebuilt = rebuild(a).egraph;
      EGraph upper = ico_step(rebuilt, trs);  // an explicit upper bound of A
      REQUIRE(find_homomorphism(rebuilt, upper).has_value());
    }
  }

  TEST_CASE("ranks only decrease along homomorphisms") {
    Rng rng(0xAB5);
    Trs trs = parse_trs("sig f/2 g/2 a/0\n(f ?x ?x) -> (g ?x ?x)");
    for (int i = 0; i < 100; ++i) {
      EGraph g = random_egraph(rng, sig_fg2a(), 6);
      EGraph h = ico_step(g, trs);
      auto hom = find_homomorphism(g, h);
      REQUIRE(hom.has_value());
      for (ClassId c : g.classes()) CHECK(rank(g, c) >= rank(h, hom->at(c)));
    }
  }

  TEST_CASE("pcr_related agrees with the brute-force congruence oracle") {
    Rng rng(0x0DDB411);
    for (int i = 0; i < 100; ++i) {
      Signature sig = random_sig(rng);
      std::vector<std::pair<Term, Term>> identities;
      std::size_t count = 1 + pick(rng, 3);
      for (std::size_t k = 0; k < count; ++k)
        identities.emplace_back(random_term(rng, sig, 5), random_term(rng, sig, 5));
      CongruenceOracle oracle(identities);
      EGraph g = egraph_of_identities(sig, identities);
      const auto& universe = oracle.universe();
      for (const auto& s : universe)
        for (const auto& t : universe)
          CHECK(pcr_related(g, s, t) == oracle.related(s, t));
    }
  }

  TEST_CASE("terminated chases map into every hand-built model") {
    Rng rng(0xCAFE);
    auto deps = parse_dependencies(
        "R(x,y) -> exists z. S(y,z)\n"
        "S(x,z) -> T(x)\n"
        "T(x) -> exists w. S(x,w)\n");
    std::vector<std::string> consts{"a", "b", "c"};
    for (int i = 0; i < 100; ++i) {
      Instance I;
      std::size_t atoms = 1 + pick(rng, 3);
      for (std::size_t k = 0; k < atoms; ++k)
        I.insert({"R", {DomainElement::constant(consts[pick(rng, 3)]),
                        DomainElement::constant(consts[pick(rng, 3)])}});
      auto chased = run_standard_chase(deps, I, Scheduler::egd_fair());
      REQUIRE(chased.status == ChaseStatus::Terminated);

      // hand-built model: saturate the instance extended with junk atoms
      Instance extended = I;
      extended.insert({"T", {DomainElement::constant(consts[pick(rng, 3)])}});
      extended.insert({"S", {DomainElement::constant(consts[pick(rng, 3)]),
                             DomainElement::constant(consts[pick(rng, 3)])}});
      auto model = run_standard_chase(deps, extended, Scheduler::egd_fair());
      REQUIRE(model.status == ChaseStatus::Terminated);
      REQUIRE(is_model(model.instance, deps));
      CHECK(find_instance_hom(chased.instance, model.instance).has_value());
    }
  }

  TEST_CASE("trace fidelity of the machine encoding") {
    Rng rng(0x7E4);
    int trace_steps_checked = 0;
    for (int i = 0; i < 100; ++i) {
      TuringMachine m = random_tm(rng, 3);
      TmEncoding enc = tm_to_srs(m);
      Str w = random_config_string(rng, m, enc);
      REQUIRE(in_config(enc, m, w));
      for (int step = 0; step < 20; ++step) {
        auto successors = srs_one_step(enc.srs, w);
        // determinism over CONFIG
        REQUIRE(successors.size() <= 1);
        if (successors.empty()) {
          // normal form: the projected configuration is halting
          TmConfig c = config_of_string(m, pi(enc, m, w));
          CHECK_FALSE(tm_step(m, c).has_value());
          break;
        }
        Str next = *successors.begin();
        REQUIRE(in_config(enc, m, next));
        TmConfig before = config_of_string(m, pi(enc, m, w));
        TmConfig after = config_of_string(m, pi(enc, m, next));
        if (before == after) {
          // a type-B shuffle step
        } else {
          auto stepped = tm_step(m, before);
          REQUIRE(stepped.has_value());
          CHECK(*stepped == after);
          ++trace_steps_checked;
        }
        w = std::move(next);
      }
    }
    CHECK(trace_steps_checked > 100);
  }

  TEST_CASE("weak term acyclicity implies eqsat termination on random graphs") {
    Rng rng(0xAC1);
    Trs ex19 = parse_trs("sig f/2 g/1 a/0\n(f (f ?x ?y) ?z) -> (g (f ?z ?x))");
    for (int i = 0; i < 50; ++i) {
      EGraph g = random_egraph(rng, ex19.sig, 6);
      auto outcome = eqsat(ex19, g, 500, 60000);
      CHECK(outcome.status == RunStatus::Terminated);
    }
  }
}
