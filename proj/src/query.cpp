#include "shiq/query.hpp"

#include <algorithm>
#include <set>

namespace shiq {

void Query::add_atom(const QueryAtom& atom) {
  if (std::find(atoms_.begin(), atoms_.end(), atom) == atoms_.end()) atoms_.push_back(atom);
}

std::vector<std::string> Query::variables() const {
  std::set<std::string> out;
  for (const QueryAtom& a : atoms_) {
    if (a.t0.is_var) out.insert(a.t0.name);
    if (a.kind == QueryAtom::Kind::Role && a.t1.is_var) out.insert(a.t1.name);
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> Query::constants() const {
  std::set<std::string> out;
  for (const QueryAtom& a : atoms_) {
    if (!a.t0.is_var) out.insert(a.t0.name);
    if (a.kind == QueryAtom::Kind::Role && !a.t1.is_var) out.insert(a.t1.name);
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> validate_query(const KnowledgeBase& kb, const Query& q) {
  std::vector<std::string> issues;
  if (q.atoms().empty()) {
    issues.push_back("query has no literals");
    return issues;
  }
  std::set<std::string> role_names;
  for (const Role& r : occurring_roles(kb)) role_names.insert(r.name);
  for (const QueryAtom& a : q.atoms()) {
    if (a.kind == QueryAtom::Kind::Concept) {
      const auto& d = kb.distinguished();
      if (std::find(d.begin(), d.end(), a.pred) == d.end()) {
        issues.push_back("concept atom predicate " + a.pred +
                         " is not a distinguished concept name of the KB");
      }
    } else if (role_names.count(a.pred) == 0) {
      issues.push_back("role atom predicate " + a.pred + " does not occur in the KB");
    }
  }
  for (const std::string& c : q.constants()) {
    if (!kb.has_individual(c)) {
      issues.push_back("constant " + c + " is not an individual of the KB");
    }
  }
  return issues;
}

}  // namespace shiq
