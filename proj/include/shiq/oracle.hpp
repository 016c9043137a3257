// Brute-force finite-model semantics: explicit interpretations over small
// domains, concept evaluation, model checking for knowledge bases and
// completion forests, query satisfaction, exhaustive countermodel search.

#ifndef SHIQ_ORACLE_HPP_
#define SHIQ_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiq/forest.hpp"
#include "shiq/kb.hpp"
#include "shiq/query.hpp"

namespace shiq {

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Extensions are bitmasks over domain elements 0..size-1; role extensions
// are one successor mask per element. Domains are capped at 64 elements,
// far beyond what exhaustive search can visit anyway.
class Interpretation {
 public:
  static constexpr int kMaxDomain = 64;

  explicit Interpretation(int size = 1);

  int size() const { return size_; }
  std::uint64_t domain_mask() const;

  void set_concept(const std::string& name, std::uint64_t mask);
  void add_to_concept(const std::string& name, int element);
  bool in_concept(const std::string& name, int element) const;
  std::uint64_t concept_mask(const std::string& name) const;  // 0 when absent

  void clear_role(const std::string& name);
  void add_to_role(const std::string& name, int from, int to);
  bool in_role(const Role& r, int from, int to) const;  // inverses swap
  // Successors of `from` under r (transposed for inverted roles).
  std::uint64_t role_row(const Role& r, int from) const;
  std::vector<std::pair<int, int>> role_pairs(const std::string& name) const;

  void map_individual(const std::string& name, int element);
  std::optional<int> individual(const std::string& name) const;

  const std::map<std::string, std::uint64_t>& concepts() const { return concepts_; }
  const std::map<std::string, std::vector<std::uint64_t>>& roles() const { return roles_; }
  const std::map<std::string, int>& individuals() const { return indivs_; }

  // Transitive roles transitively closed and every inclusion satisfied.
  bool closed_under(const RoleBox& rbox) const;
  // Enforce those constraints by fixpoint, growing role extensions.
  void close_roles(const RoleBox& rbox);

  std::string render() const;  // deterministic text listing
  bool operator==(const Interpretation& o) const = default;

 private:
  int size_;
  std::map<std::string, std::uint64_t> concepts_;
  std::map<std::string, std::vector<std::uint64_t>> roles_;
  std::map<std::string, int> indivs_;
};

enum class NameMode : std::uint8_t { Strict, Lenient };

// The extension of c under i, per the standard valuation table. Strict
// mode rejects names the interpretation does not mention; lenient mode
// reads them as empty.
std::uint64_t eval_concept(const Interpretation& i, const Concept& c,
                           NameMode mode = NameMode::Strict);

bool is_model_kb(const Interpretation& i, const KnowledgeBase& kb);

// i models the forest: i models the KB, node labels hold at the mapped
// elements, edge labels hold as role pairs, inequalities map to distinct
// elements. node_map must cover every alive node.
bool is_model_forest(const Interpretation& i, const CompletionForest& f, const KnowledgeBase& kb,
                     const std::map<NodeId, int>& node_map);

bool satisfies_query(const Interpretation& i, const Query& q);

struct Signature {
  std::vector<std::string> concepts;     // sorted
  std::vector<std::string> roles;        // sorted role names
  std::vector<std::string> individuals;  // KB order
};

Signature kb_signature(const KnowledgeBase& kb);

// Exhaustive enumeration of interpretations over the signature with
// domains of size 1..max_domain. Individuals are pinned canonically (the
// first individual takes element 0, each next one an already-used element
// or the next fresh one) and candidates that are non-canonical under
// permutations of the anonymous elements are skipped. When a role box is
// given, role extensions are closed before visiting. The visitor returns
// false to stop; the function returns false iff stopped early.
bool for_each_interpretation(const Signature& sig, int max_domain,
                             const RoleBox* close_under,
                             const std::function<bool(const Interpretation&)>& visit);

// First interpretation in enumeration order that models the KB but not
// the query; nothing if none exists within the bound (which is not a
// proof of entailment).
std::optional<Interpretation> countermodel_search(const KnowledgeBase& kb, const Query& q,
                                                  int max_domain);

}  // namespace shiq

#endif  // SHIQ_ORACLE_HPP_
