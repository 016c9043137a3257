// Boolean conjunctive queries: concept atoms C(t) and role atoms R(t,t')
// over variables and constants.

#ifndef SHIQ_QUERY_HPP_
#define SHIQ_QUERY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "shiq/kb.hpp"

namespace shiq {

struct QueryTerm {
  bool is_var = false;
  std::string name;
  auto operator<=>(const QueryTerm&) const = default;
  std::string str() const { return is_var ? "?" + name : name; }
};

struct QueryAtom {
  enum class Kind : std::uint8_t { Concept, Role };
  Kind kind;
  std::string pred;  // concept name or role name
  QueryTerm t0;
  QueryTerm t1;  // role atoms only
  auto operator<=>(const QueryAtom&) const = default;
  std::string str() const {
    return kind == Kind::Concept ? pred + "(" + t0.str() + ")"
                                 : pred + "(" + t0.str() + ", " + t1.str() + ")";
  }
};

class Query {
 public:
  // Duplicate atoms collapse; insertion order is kept for rendering.
  void add_atom(const QueryAtom& atom);

  const std::vector<QueryAtom>& atoms() const { return atoms_; }
  std::size_t literal_count() const { return atoms_.size(); }  // n_Q

  std::vector<std::string> variables() const;  // sorted unique
  std::vector<std::string> constants() const;  // sorted unique

  bool operator==(const Query& o) const { return atoms_ == o.atoms_; }

 private:
  std::vector<QueryAtom> atoms_;
};

// Query well-formedness against a KB: concept predicates must be
// distinguished names, role predicates occurring role names, constants
// known individuals. Empty report iff valid.
std::vector<std::string> validate_query(const KnowledgeBase& kb, const Query& q);

}  // namespace shiq

#endif  // SHIQ_QUERY_HPP_
