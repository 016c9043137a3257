#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shiq/oracle.hpp"
#include "shiq/syntax.hpp"
#include "support.hpp"

using namespace shiq;

namespace {
const Concept A = Concept::atom("A");
const Concept B = Concept::atom("B");
const Role R{"R", false};

// Domain {0,1}, R = {(0,1)}, A = {1}.
Interpretation two_chain() {
  Interpretation i(2);
  i.set_concept("A", 0b10);
  i.clear_role("R");
  i.add_to_role("R", 0, 1);
  return i;
}
}  // namespace

TEST_CASE("concept evaluation follows the valuation table") {
  Interpretation i = two_chain();
  // Witness enumeration cross-check for the existential: element x is in
  // the extension iff some y with R(x,y) and A(y) exists.
  std::uint64_t expected = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if (i.in_role(R, x, y) && i.in_concept("A", y)) expected |= 1ull << x;
    }
  }
  CHECK(expected == 0b01);
  CHECK(eval_concept(i, Concept::exist(R, A)) == expected);

  CHECK(eval_concept(i, Concept::negation(A)) == 0b01);  // complement

  Interpretation j(2);
  j.set_concept("A", 0b11);
  j.clear_role("R");
  j.add_to_role("R", 0, 0);
  j.add_to_role("R", 0, 1);
  CHECK((eval_concept(j, Concept::at_most(1, R, A)) & 1) == 0);  // 0 has two R-A successors
  CHECK(eval_concept(j, Concept::at_least(2, R, A)) == 0b01);
}

TEST_CASE("inverse roles evaluate by pair swapping") {
  Interpretation i = two_chain();
  CHECK(eval_concept(i, Concept::exist(Role{"R", true}, Concept::negation(A))) == 0b10);
  CHECK(i.in_role(Role{"R", true}, 1, 0));
}

TEST_CASE("strict mode rejects unknown names") {
  Interpretation i(1);
  CHECK_THROWS_AS(eval_concept(i, A, NameMode::Strict), OracleError);
  CHECK(eval_concept(i, A, NameMode::Lenient) == 0);
}

TEST_CASE("model checking a knowledge base") {
  // The disjunction countermodel: domain {d}, A = C = {d}, B empty.
  KnowledgeBase kb = parse_kb("distinguished B. axiom A <= (or B C). assert A(a).");
  Interpretation i(1);
  i.set_concept("A", 1);
  i.set_concept("B", 0);
  i.set_concept("C", 1);
  i.map_individual("a", 0);
  CHECK(is_model_kb(i, kb));
  i.set_concept("C", 0);
  CHECK_FALSE(is_model_kb(i, kb));
}

TEST_CASE("inequalities require distinct images") {
  KnowledgeBase kb;
  kb.assert_distinct("a", "b");
  kb.assert_concept("a", A);
  Interpretation i(2);
  i.set_concept("A", 0b01);
  i.map_individual("a", 0);
  i.map_individual("b", 0);
  CHECK_FALSE(is_model_kb(i, kb));
  i.map_individual("b", 1);
  CHECK(is_model_kb(i, kb));
}

TEST_CASE("model checking a forest") {
  KnowledgeBase kb;
  kb.assert_concept("a", A);
  kb.assert_role("a", R, "b");
  kb.add_gci(A, B);
  auto kbp = std::make_shared<const KnowledgeBase>(kb);
  CompletionForest f = CompletionForest::initial(kbp);

  Interpretation i(2);
  i.set_concept("A", 0b01);
  i.set_concept("B", 0b01);
  i.clear_role("R");
  i.add_to_role("R", 0, 1);
  i.map_individual("a", 0);
  i.map_individual("b", 1);

  std::map<NodeId, int> node_map{{*f.root_of("a"), 0}, {*f.root_of("b"), 1}};
  CHECK(is_model_forest(i, f, kb, node_map));

  // Violating a label membership breaks it.
  f.add_to_label(*f.root_of("b"), A);
  CHECK_FALSE(is_model_forest(i, f, kb, node_map));
}

TEST_CASE("neq violations break forest modelhood") {
  KnowledgeBase kb;
  kb.assert_role("a", R, "b");
  auto kbp = std::make_shared<const KnowledgeBase>(kb);
  CompletionForest f = CompletionForest::initial(kbp);
  f.add_neq(*f.root_of("a"), *f.root_of("b"));

  Interpretation i(1);
  i.clear_role("R");
  i.add_to_role("R", 0, 0);
  i.map_individual("a", 0);
  i.map_individual("b", 0);
  std::map<NodeId, int> node_map{{*f.root_of("a"), 0}, {*f.root_of("b"), 0}};
  CHECK(is_model_kb(i, kb));
  CHECK_FALSE(is_model_forest(i, f, kb, node_map));
}

TEST_CASE("query satisfaction") {
  Interpretation i(2);
  i.set_concept("B", 0b10);
  i.clear_role("R");
  i.add_to_role("R", 0, 1);
  i.map_individual("a", 0);

  Query q = parse_query("R(a, ?y), B(?y)");
  CHECK(satisfies_query(i, q));

  Query miss = parse_query("B(a)");
  CHECK_FALSE(satisfies_query(i, miss));

  // Variable-free queries reduce to direct fact lookups.
  Interpretation j(1);
  j.set_concept("B", 1);
  j.map_individual("a", 0);
  CHECK(satisfies_query(j, parse_query("B(a)")));

  CHECK_THROWS_AS(satisfies_query(i, parse_query("B(zz)")), OracleError);
}

TEST_CASE("countermodel search finds the disjunction witness at domain 1") {
  KnowledgeBase kb = parse_kb("distinguished B. axiom A <= (or B C). assert A(a).");
  Query q = parse_query("B(a)", &kb);
  auto found = countermodel_search(kb, q, 1);
  REQUIRE(found.has_value());
  CHECK(is_model_kb(*found, kb));
  CHECK_FALSE(satisfies_query(*found, q));
  CHECK(found->size() == 1);
  CHECK(found->concept_mask("B") == 0);
}

TEST_CASE("countermodel search is empty for unsatisfiable KBs and entailed queries") {
  KnowledgeBase unsat = parse_kb("axiom A <= B. axiom A <= (not B). assert A(a).");
  Query q1 = parse_query("A(a)");
  CHECK_FALSE(countermodel_search(unsat, q1, 3).has_value());

  KnowledgeBase e1 = parse_kb("distinguished B. axiom A <= (some R B). assert A(a).");
  Query q2 = parse_query("R(a, ?y), B(?y)", &e1);
  CHECK_FALSE(countermodel_search(e1, q2, 3).has_value());
}

TEST_CASE("countermodel search is monotone and deterministic in the bound") {
  testsupport::KbGen gen(808);
  int found_count = 0;
  for (int k = 0; k < 12; ++k) {
    const KnowledgeBase kb = gen.gen();
    const Query q = gen.gen_query(kb);
    auto at2 = countermodel_search(kb, q, 2);
    auto at3 = countermodel_search(kb, q, 3);
    if (at2) {
      ++found_count;
      REQUIRE(at3.has_value());
      CHECK(at3->render() == at2->render());  // first in canonical order
    }
  }
  CHECK(found_count > 3);
}

TEST_CASE("role closure enforces transitivity and the hierarchy") {
  RoleBox rbox;
  rbox.add_transitive("R");
  rbox.add_inclusion(R, Role{"S", false});

  std::mt19937 rng(11);
  for (int round = 0; round < 50; ++round) {
    Interpretation i(3);
    i.clear_role("R");
    i.clear_role("S");
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (rng() % 3 == 0) i.add_to_role("R", a, b);
        if (rng() % 3 == 0) i.add_to_role("S", a, b);
      }
    }
    i.close_roles(rbox);
    CHECK(i.closed_under(rbox));
    // Chains of R must be present in R, and R pairs in S.
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        for (int c = 0; c < 3; ++c) {
          if (i.in_role(R, a, b) && i.in_role(R, b, c)) CHECK(i.in_role(R, a, c));
        }
        if (i.in_role(R, a, b)) CHECK(i.in_role(Role{"S", false}, a, b));
      }
    }
  }
}

TEST_CASE("enumeration visits each canonical interpretation once") {
  Signature sig;
  sig.concepts = {"A"};
  std::set<std::string> seen;
  for_each_interpretation(sig, 2, nullptr, [&](const Interpretation& i) {
    CHECK(seen.insert(i.render()).second);
    return true;
  });
  // size 1: A in {{},{0}}; size 2: canonical masks {}, {0}, {0,1} ({1} is
  // a permutation of {0}).
  CHECK(seen.size() == 5);
}
