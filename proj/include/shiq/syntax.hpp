// Textual syntax for knowledge bases (.shiq) and conjunctive queries (.cq).
//
// Statements:
//   trans R.                    transitive role declaration
//   role R <= S.                role inclusion (inverse roles as (inv R))
//   axiom C <= D.               concept inclusion
//   distinguished A.            distinguished concept name
//   assert C(a).                concept assertion
//   assert R(a,b).              role assertion
//   assert a != b.              inequality assertion
// Concepts are fully parenthesized s-expressions: (and C D), (or C D),
// (not C), (all R C), (some R C), (atleast n R C), (atmost n R C).
// Queries are comma-separated atoms, variables prefixed with '?':
//   R(a, ?y), B(?y)
// '#' starts a line comment. Identifiers beginning with '_' are reserved.

#ifndef SHIQ_SYNTAX_HPP_
#define SHIQ_SYNTAX_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

#include "shiq/kb.hpp"
#include "shiq/query.hpp"

namespace shiq {

struct SourceSpan {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, bytes
  std::size_t begin = 0;   // byte offsets, begin <= end
  std::size_t end = 0;

  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(column);
  }
};

struct ParseError : std::runtime_error {
  SourceSpan span;
  ParseError(SourceSpan s, const std::string& message)
      : std::runtime_error(s.str() + ": " + message), span(s) {}
};

// Parses and (by default) validates; validation issues are reported as
// ParseErrors with the span of the offending statement.
KnowledgeBase parse_kb(const std::string& text, bool validate = true);

// With a KB, predicates are arity-checked against its role and concept
// names; without one the literal arity decides the atom kind.
Query parse_query(const std::string& text, const KnowledgeBase* kb = nullptr);

// Canonical rendering; parsing it back yields a structurally equal value.
std::string render_kb(const KnowledgeBase& kb);
std::string render_query(const Query& q);

}  // namespace shiq

#endif  // SHIQ_SYNTAX_HPP_
