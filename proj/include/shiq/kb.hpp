// Knowledge bases: A-Box assertions, role hierarchy, general concept
// inclusions, distinguished concept names, plus closure / global-constraint
// computation, validation and size metrics.

#ifndef SHIQ_KB_HPP_
#define SHIQ_KB_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shiq/concepts.hpp"

namespace shiq {

enum class AssertionKind : std::uint8_t { Concept, Role, Inequality };

struct Assertion {
  AssertionKind kind;
  std::optional<Concept> expr;  // Concept assertions, stored in NNF
  Role role;                       // Role assertions
  std::string a;
  std::string b;  // Role / Inequality only

  bool operator==(const Assertion& o) const {
    return kind == o.kind && expr == o.expr && role == o.role && a == o.a && b == o.b;
  }
};

struct Gci {
  Concept lhs;  // NNF
  Concept rhs;  // NNF
  bool operator==(const Gci& o) const { return lhs == o.lhs && rhs == o.rhs; }
};

// A knowledge base is mutable while being assembled and treated as
// immutable afterwards; all reasoning entry points take it by const
// reference. Concepts are NNF-normalized on insertion and the individual
// list tracks first occurrence in the A-Box.
class KnowledgeBase {
 public:
  void assert_concept(const std::string& individual, const Concept& c);
  void assert_role(const std::string& a, const Role& r, const std::string& b);
  void assert_distinct(const std::string& a, const std::string& b);
  void add_gci(const Concept& lhs, const Concept& rhs);
  void add_distinguished(const std::string& concept_name);

  RoleBox& rbox() { return rbox_; }
  const RoleBox& rbox() const { return rbox_; }
  const std::vector<Assertion>& abox() const { return abox_; }
  const std::vector<Gci>& tbox() const { return tbox_; }
  const std::vector<std::string>& distinguished() const { return distinguished_; }
  const std::vector<std::string>& individuals() const { return individuals_; }
  bool has_individual(const std::string& name) const;

  bool operator==(const KnowledgeBase& o) const {
    return abox_ == o.abox_ && tbox_ == o.tbox_ && rbox_ == o.rbox_ &&
           distinguished_ == o.distinguished_;
  }

 private:
  void note_individual(const std::string& name);

  std::vector<Assertion> abox_;
  RoleBox rbox_;
  std::vector<Gci> tbox_;
  std::vector<std::string> distinguished_;  // sorted unique concept names
  std::vector<std::string> individuals_;    // first-occurrence order
};

struct KbMetrics {
  std::size_t conccard = 0;   // |closure(kb) with distinguished names|
  std::size_t rolecard = 0;   // |roles occurring, with inverses|
  std::uint32_t maxnumrest = 0;
  std::size_t abox_size = 0;
};

struct ValidationIssue {
  enum class Where : std::uint8_t { RBox, TBox, ABox, General };
  Where where;
  std::size_t index;  // position within the section, 0 for General
  std::string message;
};

// The global constraint concepts: NNF(not C or D) per inclusion axiom
// plus C or (not C) per distinguished name. Seeded into every node label.
std::set<Concept> global_constraints(const KnowledgeBase& kb);

// Smallest set containing every asserted concept and every global
// constraint concept, closed under subconcepts and NNF negation. Also
// closed under the universal-restriction variants that transitive-role
// propagation introduces (all R.C for all S.C in the set, transitive
// R subrole-of S), so node labels always stay inside this set.
std::set<Concept> closure(const KnowledgeBase& kb);

// Empty report iff the KB is well-formed: acyclic role hierarchy, simple
// roles under number restrictions, NNF storage, non-empty A-Box.
std::vector<ValidationIssue> validate_kb(const KnowledgeBase& kb);

KbMetrics metrics(const KnowledgeBase& kb);

// Roles occurring in the KB, both polarities, sorted.
std::vector<Role> occurring_roles(const KnowledgeBase& kb);

// Atomic concept names occurring anywhere (distinguished included), sorted.
std::vector<std::string> occurring_concept_names(const KnowledgeBase& kb);

}  // namespace shiq

#endif  // SHIQ_KB_HPP_
