#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "shiq/engine.hpp"
#include "shiq/syntax.hpp"
#include "support.hpp"

using namespace shiq;

namespace {
const Concept A = Concept::atom("A");
const Concept B = Concept::atom("B");
const Role R{"R", false};
const Role S{"S", false};

std::shared_ptr<const KnowledgeBase> share(const KnowledgeBase& kb) {
  return std::make_shared<const KnowledgeBase>(kb);
}

// Stepwise walk recording (forest, applicable instances) pairs along the
// first branch.
std::vector<std::pair<CompletionForest, std::vector<RuleInstance>>> walk_first_branch(
    const KnowledgeBase& kb, unsigned n, int max_steps) {
  std::vector<std::pair<CompletionForest, std::vector<RuleInstance>>> out;
  CompletionForest f = CompletionForest::initial(std::make_shared<const KnowledgeBase>(kb));
  for (int step = 0; step < max_steps; ++step) {
    std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, n);
    out.push_back({f, instances});
    if (instances.empty()) break;
    std::vector<CompletionForest> next = apply_rule(f, instances.front(), kb);
    f = next.front();
  }
  return out;
}
}  // namespace

TEST_CASE("conjunction guard fires until both conjuncts are present") {
  KnowledgeBase kb = parse_kb("assert (and A B)(a).");
  CompletionForest f = CompletionForest::initial(share(kb));
  std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, 1);
  REQUIRE(instances.size() == 1);
  CHECK(instances[0].tag == RuleTag::And);

  std::vector<CompletionForest> next = apply_rule(f, instances[0], kb);
  REQUIRE(next.size() == 1);
  CHECK(next[0].node(0).label.count(A) == 1);
  CHECK(next[0].node(0).label.count(B) == 1);
  CHECK(applicable_rule_instances(next[0], kb, 1).empty());  // complete now
}

TEST_CASE("disjunction branches into both outcomes") {
  KnowledgeBase kb = parse_kb("assert (or A B)(a).");
  CompletionForest f = CompletionForest::initial(share(kb));
  std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, 1);
  REQUIRE(instances.size() == 1);
  CHECK(instances[0].tag == RuleTag::Or);
  std::vector<CompletionForest> next = apply_rule(f, instances[0], kb);
  REQUIRE(next.size() == 2);
  CHECK(next[0].node(0).label.count(A) == 1);
  CHECK(next[1].node(0).label.count(B) == 1);
}

TEST_CASE("the existential rule creates a fresh constrained node") {
  KnowledgeBase kb = parse_kb("axiom B <= A. assert (some S A)(a).");
  CompletionForest f = CompletionForest::initial(share(kb));
  std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, 1);
  // The root also carries the global-constraint disjunction, which
  // outranks generating rules; pick the exists-instance directly.
  auto it = std::find_if(instances.begin(), instances.end(),
                         [](const RuleInstance& i) { return i.tag == RuleTag::Exists; });
  REQUIRE(it != instances.end());
  CHECK(instances.front().tag == RuleTag::Or);
  std::vector<CompletionForest> next = apply_rule(f, *it, kb);
  REQUIRE(next.size() == 1);
  REQUIRE(next[0].node_count() == 2);
  const ForestNode& fresh = next[0].node(1);
  CHECK(fresh.kind == NodeKind::Tree);
  std::set<Concept> expected = global_constraints(kb);
  expected.insert(A);
  CHECK(fresh.label == expected);
  CHECK(next[0].edge_label(0, 1) == std::set<Role>{S});

  // Re-running on the successor finds the neighbour satisfied.
  for (const RuleInstance& inst : applicable_rule_instances(next[0], kb, 1)) {
    CHECK(inst.tag != RuleTag::Exists);
  }
}

TEST_CASE("blocked nodes suppress generating rules") {
  KnowledgeBase kb = parse_kb("assert B(a).");
  CompletionForest f = CompletionForest::initial(share(kb));
  const NodeId a = *f.root_of("a");
  const Concept some_ra = Concept::exist(R, A);
  const NodeId x1 = f.add_tree_node(a, {R}, {A, some_ra});
  const NodeId x2 = f.add_tree_node(x1, {R}, {A, some_ra});
  // At depth 0 the label repetition blocks x2 directly.
  REQUIRE(f.blocking_status(x2, 0).kind == BlockKind::Directly);
  for (const RuleInstance& inst : applicable_rule_instances(f, kb, 0)) {
    CHECK(inst.x != x2);
  }
  // x1 is satisfied by x2, so no exists-instance there either; the forest
  // is complete at depth 0 despite the pending obligation at x2.
  CHECK(applicable_rule_instances(f, kb, 0).empty());
}

TEST_CASE("stale instances are rejected after the forest moved on") {
  KnowledgeBase kb = parse_kb("assert (or A B)(a).");
  CompletionForest f = CompletionForest::initial(share(kb));
  std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, 1);
  REQUIRE(instances.size() == 1);
  CompletionForest g = apply_rule(f, instances[0], kb)[0];
  CHECK_THROWS_AS(apply_rule(g, instances[0], kb), StaleRuleError);
}

TEST_CASE("choose rule decides filler membership both ways") {
  KnowledgeBase kb = parse_kb("assert (atmost 1 S A)(x). assert S(x,y).");
  CompletionForest f = CompletionForest::initial(share(kb));
  std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, 1);
  REQUIRE(instances.size() == 1);
  CHECK(instances[0].tag == RuleTag::Choose);
  std::vector<CompletionForest> next = apply_rule(f, instances[0], kb);
  REQUIRE(next.size() == 2);
  const NodeId y = *f.root_of("y");
  CHECK(next[0].node(y).label.count(A) == 1);
  CHECK(next[1].node(y).label.count(Concept::negation(A)) == 1);
}

TEST_CASE("atleast creates pairwise distinct witnesses") {
  KnowledgeBase kb = parse_kb("assert (atleast 2 S B)(a).");
  CompletionForest f = CompletionForest::initial(share(kb));
  std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, 1);
  REQUIRE(instances.size() == 1);
  CHECK(instances[0].tag == RuleTag::AtLeast);
  CompletionForest g = apply_rule(f, instances[0], kb)[0];
  REQUIRE(g.node_count() == 3);
  CHECK(g.neq(1, 2));
  CHECK(g.node(1).label.count(B) == 1);
  CHECK(applicable_rule_instances(g, kb, 1).empty());
}

TEST_CASE("root merges branch over admissible pairs") {
  KnowledgeBase kb =
      parse_kb("assert (atmost 1 S B)(a). assert S(a,b). assert S(a,c). assert B(b). assert B(c).");
  CompletionForest f = CompletionForest::initial(share(kb));
  std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, 1);
  REQUIRE(!instances.empty());
  CHECK(instances[0].tag == RuleTag::AtMostRoot);
  CHECK(instances[0].merge_pairs.size() == 2);  // (b,c) and (c,b)
  std::vector<CompletionForest> next = apply_rule(f, instances[0], kb);
  REQUIRE(next.size() == 2);
  for (const CompletionForest& g : next) {
    CHECK(g.alive_nodes().size() == 2);
    CHECK_FALSE(g.clash().has_value());
  }
}

TEST_CASE("tree-node merges fire for excess qualified children") {
  KnowledgeBase kb = parse_kb(
      "assert (some R A)(x). assert (some R B)(x). assert (atmost 1 R (or A B))(x).");
  ExpandStats stats;
  std::vector<CompletionForest> ccf = ccf_forests(kb, 1, {}, {}, &stats);
  REQUIRE(!ccf.empty());
  // Some branch decides both children into (or A B) and must merge them:
  // look for a surviving child carrying both fillers behind a pruned edge
  // sibling.
  bool merged_branch = false;
  for (const CompletionForest& f : ccf) {
    for (NodeId x : f.alive_nodes()) {
      const ForestNode& node = f.node(x);
      if (node.kind != NodeKind::Tree) continue;
      if (node.label.count(Concept::atom("A")) && node.label.count(Concept::atom("B"))) {
        merged_branch = true;
        // The absorbed sibling sits behind an emptied edge, indirectly
        // blocked.
        for (NodeId other : f.alive_nodes()) {
          const ForestNode& o = f.node(other);
          if (other != x && o.kind == NodeKind::Tree &&
              f.edge_label(*o.parent, other).empty()) {
            CHECK(f.blocking_status(other, 1).kind == BlockKind::Indirectly);
          }
        }
      }
    }
  }
  CHECK(merged_branch);
}

TEST_CASE("transitive propagation targets R-neighbours only") {
  // R is a transitive subrole of S; T is a plain subrole. The universal
  // on S propagates its transitive variant along R edges but not T edges.
  KnowledgeBase kb = parse_kb(
      "trans R. role R <= S. role T <= S. assert (all S B)(a). assert R(a,b). assert T(a,c).");
  CompletionForest f = CompletionForest::initial(share(kb));
  const NodeId b = *f.root_of("b");
  const NodeId c = *f.root_of("c");
  bool plus_to_b = false;
  bool plus_to_c = false;
  int forall_count = 0;
  for (const RuleInstance& inst : applicable_rule_instances(f, kb, 1)) {
    if (inst.tag == RuleTag::ForallPlus) {
      if (inst.y == b) plus_to_b = true;
      if (inst.y == c) plus_to_c = true;
      CHECK(inst.propagated == R);
    }
    if (inst.tag == RuleTag::Forall) ++forall_count;
  }
  CHECK(plus_to_b);
  CHECK_FALSE(plus_to_c);
  CHECK(forall_count == 2);  // plain propagation reaches both neighbours

  // Applying it stamps the universal for the transitive subrole.
  for (const RuleInstance& inst : applicable_rule_instances(f, kb, 1)) {
    if (inst.tag == RuleTag::ForallPlus && inst.y == b) {
      CompletionForest g = apply_rule(f, inst, kb).front();
      CHECK(g.node(b).label.count(Concept::univ(R, Concept::atom("B"))) == 1);
      break;
    }
  }
}

TEST_CASE("choose also fires on atleast restrictions") {
  KnowledgeBase kb = parse_kb("assert (atleast 1 S A)(x). assert S(x,y).");
  CompletionForest f = CompletionForest::initial(share(kb));
  bool choose_found = false;
  for (const RuleInstance& inst : applicable_rule_instances(f, kb, 1)) {
    if (inst.tag == RuleTag::Choose) choose_found = true;
  }
  CHECK(choose_found);
}

TEST_CASE("expansion of a forced contradiction yields no clash-free forest") {
  KnowledgeBase kb = parse_kb("axiom A <= B. axiom A <= (not B). assert A(a).");
  ExpandStats stats;
  std::vector<CompletionForest> ccf = ccf_forests(kb, 1, {}, {}, &stats);
  CHECK(ccf.empty());
  CHECK(stats.ccf_count == 0);
  CHECK(stats.forests_explored > 1);
  CHECK_FALSE(stats.budget_hit);
}

TEST_CASE("existential loops terminate by blocking at depth 1") {
  KnowledgeBase kb = parse_kb("axiom A <= (some R A). assert A(a).");
  ExpandStats stats;
  std::vector<CompletionForest> ccf = ccf_forests(kb, 1, {}, {}, &stats);
  CHECK_FALSE(stats.budget_hit);
  REQUIRE(!ccf.empty());
  bool some_blocked = false;
  for (const CompletionForest& f : ccf) {
    for (NodeId x : f.alive_nodes()) {
      if (f.blocking_status(x, 1).kind == BlockKind::Directly) some_blocked = true;
    }
  }
  CHECK(some_blocked);
}

TEST_CASE("a KB without applicable rules expands to its initial forest") {
  KnowledgeBase kb = parse_kb("assert A(a).");
  ExpandStats stats;
  std::vector<CompletionForest> ccf = ccf_forests(kb, 1, {}, {}, &stats);
  REQUIRE(ccf.size() == 1);
  CHECK(stats.forests_explored == 1);
  CHECK(ccf[0].node_count() == 1);
  CHECK(ccf[0].node(0).label == std::set<Concept>{A});
}

TEST_CASE("expansion refuses invalid inputs") {
  KnowledgeBase empty;
  empty.add_gci(A, B);
  CHECK_THROWS_AS(ccf_forests(empty, 1), std::invalid_argument);
  KnowledgeBase kb = parse_kb("assert A(a).");
  CHECK_THROWS_AS(ccf_forests(kb, 0), std::invalid_argument);
}

TEST_CASE("budget ceilings abort without a verdict") {
  KnowledgeBase kb = parse_kb("axiom A <= (some R A). assert A(a).");
  Budget tight;
  tight.max_forests = 3;
  ExpandStats stats;
  ccf_forests(kb, 1, tight, {}, &stats);
  CHECK(stats.budget_hit);

  Budget node_cap;
  node_cap.max_nodes = 2;
  ExpandStats stats2;
  ccf_forests(kb, 1, node_cap, {}, &stats2);
  CHECK(stats2.budget_hit);
}

TEST_CASE("satisfiability verdicts are stable under rule-priority shuffles") {
  std::mt19937 rng(2024);
  for (const KnowledgeBase& kb : testsupport::small_corpus()) {
    ExpandStats base_stats;
    ccf_forests(kb, 1, {}, {}, &base_stats);
    const bool base_sat = base_stats.ccf_count > 0;
    for (int round = 0; round < 3; ++round) {
      ExpandOptions opts;
      std::shuffle(opts.priority.begin(), opts.priority.end(), rng);
      ExpandStats stats;
      ccf_forests(kb, 1, {}, opts, &stats);
      CHECK(base_sat == (stats.ccf_count > 0));
    }
  }
}

TEST_CASE("expansion terminates on the corpus for depths 1..3") {
  for (const KnowledgeBase& kb : testsupport::small_corpus()) {
    for (unsigned n = 1; n <= 3; ++n) {
      Budget generous;
      generous.max_forests = 200000;
      generous.timeout_ms = 30000;
      ExpandStats stats;
      ccf_forests(kb, n, generous, {}, &stats);
      CHECK_FALSE(stats.budget_hit);
    }
  }
}

TEST_CASE("every reached forest keeps the structural invariants") {
  for (const KnowledgeBase& kb : testsupport::small_corpus()) {
    auto walk = walk_first_branch(kb, 1, 20);
    for (const auto& [f, instances] : walk) {
      const auto issues = testsupport::forest_invariant_issues(f, kb);
      CAPTURE(f.dump());
      CHECK(issues.empty());
    }
    expand(kb, 1, {}, [&](const CompletionForest& f, bool) {
      CHECK(testsupport::forest_invariant_issues(f, kb).empty());
      return VisitResult::Continue;
    });
  }
}

TEST_CASE("materialized models read labels and close roles") {
  KnowledgeBase kb = parse_kb("distinguished B. assert (some R B)(a).");
  std::vector<CompletionForest> ccf = ccf_forests(kb, 1);
  REQUIRE(!ccf.empty());
  bool checked = false;
  for (const CompletionForest& f : ccf) {
    Interpretation i = materialize_model(f, kb);
    const int a = *i.individual("a");
    bool found = false;
    for (int e = 0; e < i.size(); ++e) {
      if (i.in_role(R, a, e) && i.in_concept("B", e)) found = true;
    }
    CHECK(found);
    CHECK(is_model_kb(i, kb));
    checked = true;
  }
  CHECK(checked);
}

TEST_CASE("materialization closes transitive chains and subrole pairs") {
  KnowledgeBase trans = parse_kb("trans S. assert S(a,b). assert S(b,c).");
  CompletionForest f = CompletionForest::initial(share(trans));
  Interpretation i = materialize_model(f, trans);
  CHECK(i.in_role(S, *i.individual("a"), *i.individual("c")));

  KnowledgeBase sub = parse_kb("role R <= S. assert R(a,b).");
  CompletionForest g = CompletionForest::initial(share(sub));
  Interpretation j = materialize_model(g, sub);
  CHECK(j.in_role(S, *j.individual("a"), *j.individual("b")));
  CHECK(is_model_kb(j, sub));
}

TEST_CASE("materialization rejects unsaturated or pruned forests") {
  KnowledgeBase kb = parse_kb("assert (some R A)(a).");
  CompletionForest f = CompletionForest::initial(share(kb));
  CHECK_THROWS_AS(materialize_model(f, kb), BlockedForestError);  // obligation unmet

  KnowledgeBase kb2 = parse_kb("assert A(a).");
  CompletionForest g = CompletionForest::initial(share(kb2));
  const NodeId y = g.add_tree_node(0, {R}, {A});
  g.clear_edge(0, y);
  CHECK_THROWS_AS(materialize_model(g, kb2), BlockedForestError);
}

TEST_CASE("materialized models satisfy all label members pointwise") {
  for (const KnowledgeBase& kb : testsupport::small_corpus()) {
    std::vector<CompletionForest> ccf = ccf_forests(kb, 1);
    for (const CompletionForest& f : ccf) {
      Interpretation i;
      try {
        i = materialize_model(f, kb);
      } catch (const BlockedForestError&) {
        continue;
      }
      CHECK(is_model_kb(i, kb));
      std::map<NodeId, int> index;
      int next = 0;
      for (NodeId x : f.alive_nodes()) index[x] = next++;
      CHECK(is_model_forest(i, f, kb, index));
      // Global constraints hold at every domain element.
      for (const Concept& g : global_constraints(kb)) {
        CHECK(eval_concept(i, g, NameMode::Lenient) == i.domain_mask());
      }
    }
  }
}

TEST_CASE("rule applications never lose oracle models") {
  int instances_checked = 0;
  for (const KnowledgeBase& kb : testsupport::small_corpus()) {
    const Signature sig = kb_signature(kb);
    if (sig.concepts.size() + sig.roles.size() > 3) continue;  // keep sweeps cheap here
    auto walk = walk_first_branch(kb, 1, 6);
    for (const auto& [f, instances] : walk) {
      if (instances.empty()) continue;
      for (const RuleInstance& inst : instances) {
        std::vector<CompletionForest> successors = apply_rule(f, inst, kb);
        ++instances_checked;
        for_each_interpretation(sig, 2, &kb.rbox(), [&](const Interpretation& i) {
          if (!testsupport::find_node_map(i, f, kb)) return true;
          bool preserved = false;
          for (const CompletionForest& g : successors) {
            if (testsupport::find_node_map(i, g, kb)) {
              preserved = true;
              break;
            }
          }
          CHECK_MESSAGE(preserved, rule_name(inst.tag));
          return true;
        });
      }
    }
  }
  CHECK(instances_checked >= 10);
}
