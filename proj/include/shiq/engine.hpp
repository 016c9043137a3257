// Expansion-rule scheduler and exhaustive nondeterministic search over
// completion forests, plus canonical-model materialization for complete,
// clash-free, unblocked forests.

#ifndef SHIQ_ENGINE_HPP_
#define SHIQ_ENGINE_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiq/forest.hpp"
#include "shiq/oracle.hpp"

namespace shiq {

enum class RuleTag : std::uint8_t {
  AtMostRoot,  // root-node merge
  And,
  Forall,
  ForallPlus,  // transitive propagation
  Or,
  Choose,
  AtMost,  // tree-node merge
  Exists,
  AtLeast,
};

const char* rule_name(RuleTag tag);

struct RuleInstance {
  RuleTag tag;
  NodeId x = 0;      // focus node
  Concept trigger;   // the label member that fired
  NodeId y = 0;      // target neighbour (forall / forall-plus / choose)
  Role propagated;   // forall-plus: the transitive subrole pushed to y
  unsigned depth = 1;  // blocking depth the guards were evaluated under
  // Alternative outcomes of the nondeterministic rules.
  std::vector<Concept> label_choices;                  // or / choose
  std::vector<std::pair<NodeId, NodeId>> merge_pairs;  // atmost / atmost-root (y,z)
};

struct StaleRuleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExpandOptions {
  // Priority rank per rule tag; lower fires first. The default order is:
  // root merges, then deterministic non-generating, then nondeterministic
  // non-generating, then generating rules.
  std::array<RuleTag, 9> priority = {RuleTag::AtMostRoot, RuleTag::And,   RuleTag::Forall,
                                     RuleTag::ForallPlus, RuleTag::Or,    RuleTag::Choose,
                                     RuleTag::AtMost,     RuleTag::Exists, RuleTag::AtLeast};
};

struct Budget {
  std::uint64_t max_forests = 0;  // explored states; 0 = unlimited
  std::uint64_t max_nodes = 0;    // per forest; 0 = unlimited
  std::uint64_t timeout_ms = 0;   // wall clock; 0 = unlimited
};

struct ExpandStats {
  std::uint64_t forests_explored = 0;
  std::uint64_t ccf_count = 0;
  std::uint64_t max_nodes = 0;
  std::uint64_t rule_applications = 0;
  bool budget_hit = false;
  bool stopped_early = false;  // visitor asked to stop (not a budget event)

  std::string report() const;  // line-oriented key=value
};

// Every rule instance whose guard holds on f under depth-n blocking,
// in priority order; empty iff f is complete.
std::vector<RuleInstance> applicable_rule_instances(const CompletionForest& f,
                                                    const KnowledgeBase& kb, unsigned n,
                                                    const ExpandOptions& opts = {});

// Successor forests of one rule application: one per outcome. Re-checks
// the guard and throws StaleRuleError when the instance no longer applies.
std::vector<CompletionForest> apply_rule(const CompletionForest& f, const RuleInstance& inst,
                                         const KnowledgeBase& kb);

enum class VisitResult : std::uint8_t { Continue, Stop };

// Depth-first exhaustive expansion from the initial forest, branching over
// every nondeterministic outcome, pruning branches that revisit a forest
// already seen in this expansion. Clashed branches are cut at detection
// (a clash survives every rule, so finishing them changes nothing); the
// visitor sees each complete clash-free forest and each cut clashed
// forest once, tagged accordingly. Requires n >= 1.
ExpandStats expand(const KnowledgeBase& kb, unsigned n, const Budget& budget,
                   const std::function<VisitResult(const CompletionForest&, bool clash_free)>& visit,
                   const ExpandOptions& opts = {});

// Convenience: collect all complete clash-free forests.
std::vector<CompletionForest> ccf_forests(const KnowledgeBase& kb, unsigned n,
                                          const Budget& budget = {}, const ExpandOptions& opts = {},
                                          ExpandStats* stats_out = nullptr);

struct BlockedForestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The canonical interpretation of a complete, clash-free forest without
// blocked nodes: alive nodes as domain, atomic label members as concept
// extensions, role extensions closed under the hierarchy and transitivity,
// individuals at their merge-resolved roots.
Interpretation materialize_model(const CompletionForest& f, const KnowledgeBase& kb);

}  // namespace shiq

#endif  // SHIQ_ENGINE_HPP_
