// Blocking-depth selection, query-into-forest homomorphism search, and the
// top-level conjunctive-query entailment decision.

#ifndef SHIQ_ENTAIL_HPP_
#define SHIQ_ENTAIL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "shiq/engine.hpp"
#include "shiq/forest.hpp"
#include "shiq/oracle.hpp"
#include "shiq/query.hpp"

namespace shiq {

// 2^(2*conccard + rolecard), saturating at the uint64 ceiling.
std::uint64_t labelling_bound(std::size_t conccard, std::size_t rolecard);

struct BlockingParams {
  enum class Derivation : std::uint8_t { LiteralCount, LabellingBound, Override };
  std::uint64_t depth = 1;
  Derivation derivation = Derivation::LiteralCount;
  std::uint64_t bound = 1;  // the depth the derivation rule asks for
  bool complete = true;     // depth >= bound
};

// Without occurring transitive roles the literal count suffices; with
// them the depth scales by the labelling bound. An override below the
// bound is honored but marked incomplete.
BlockingParams blocking_depth(const KnowledgeBase& kb, const Query& q,
                              std::optional<std::uint64_t> override_depth = std::nullopt);

// A query-to-forest homomorphism: identity on constants (merge-resolved),
// concept atoms members of the image labels, role atoms r_connected.
// Exhaustive; nothing iff no mapping exists. Variables map to any alive
// node. Throws on constants that are not roots of the forest.
std::optional<std::map<std::string, NodeId>> maps_into(const CompletionForest& f, const Query& q,
                                                       const KnowledgeBase& kb);

enum class Conclusion : std::uint8_t {
  Entailed,            // every complete clash-free forest admits a mapping
  EntailedVacuously,   // no complete clash-free forest at all
  NotEntailed,         // witness forest found at a complete blocking depth
  NoMappingAtDepth,    // witness found below the sufficient depth: no verdict
};

struct EntailmentVerdict {
  Conclusion conclusion = Conclusion::Entailed;
  BlockingParams blocking;
  std::optional<CompletionForest> witness;       // present iff not entailed
  std::optional<Interpretation> countermodel;    // witness unblocked only
  std::optional<std::map<std::string, NodeId>> last_mapping;  // entailed runs: final forest's mapping
  ExpandStats stats;
  std::string note;

  bool entailed() const {
    return conclusion == Conclusion::Entailed || conclusion == Conclusion::EntailedVacuously;
  }
  // Single-line machine-readable record.
  std::string report_line() const;
};

struct BudgetExceededError : std::runtime_error {
  ExpandStats stats;
  explicit BudgetExceededError(ExpandStats s)
      : std::runtime_error("expansion budget exceeded: " + s.report()), stats(s) {}
};

struct EntailOptions {
  std::optional<std::uint64_t> depth_override;
  Budget budget;
  ExpandOptions expand;
};

// Expands at the selected blocking depth and checks the mapping on every
// complete clash-free forest, short-circuiting on the first forest that
// admits none. Throws BudgetExceededError when the expansion budget runs
// out before a verdict, and std::invalid_argument on invalid inputs.
EntailmentVerdict entails(const KnowledgeBase& kb, const Query& q, const EntailOptions& opts = {});

}  // namespace shiq

#endif  // SHIQ_ENTAIL_HPP_
