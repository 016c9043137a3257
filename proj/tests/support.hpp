// Shared test utilities: random generators, independent brute-force
// oracles and invariant checkers. Everything here stays independent of
// the implementation paths it cross-checks.

#ifndef SHIQ_TESTS_SUPPORT_HPP_
#define SHIQ_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "shiq/engine.hpp"
#include "shiq/entail.hpp"
#include "shiq/forest.hpp"
#include "shiq/kb.hpp"
#include "shiq/oracle.hpp"
#include "shiq/query.hpp"

namespace testsupport {

using namespace shiq;

// ---------------------------------------------------------------------------
// Random concepts

struct ConceptGen {
  std::mt19937 rng;
  std::vector<std::string> names{"A", "B"};
  std::vector<std::string> role_names{"R", "S"};
  bool allow_inverse = true;
  std::uint32_t max_count = 3;

  explicit ConceptGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Role role() {
    Role r{role_names[static_cast<std::size_t>(pick(static_cast<int>(role_names.size())))], false};
    if (allow_inverse && pick(3) == 0) r.inverted = true;
    return r;
  }

  Concept atom() { return Concept::atom(names[static_cast<std::size_t>(pick(static_cast<int>(names.size())))]); }

  // Arbitrary surface concept, negation anywhere.
  Concept gen(unsigned depth) {
    if (depth == 0) return pick(2) == 0 ? atom() : Concept::negation(atom());
    switch (pick(8)) {
      case 0: return atom();
      case 1: return Concept::negation(gen(depth - 1));
      case 2: return Concept::conj(gen(depth - 1), gen(depth - 1));
      case 3: return Concept::disj(gen(depth - 1), gen(depth - 1));
      case 4: return Concept::univ(role(), gen(depth - 1));
      case 5: return Concept::exist(role(), gen(depth - 1));
      case 6:
        return Concept::at_least(static_cast<std::uint32_t>(pick(static_cast<int>(max_count) + 1)),
                                 role(), gen(depth - 1));
      default:
        return Concept::at_most(static_cast<std::uint32_t>(pick(static_cast<int>(max_count) + 1)),
                                role(), gen(depth - 1));
    }
  }
};

// ---------------------------------------------------------------------------
// Extension sweeps over all interpretations of a concept's signature

inline Signature concept_signature(const std::vector<Concept>& concepts) {
  std::set<std::string> names;
  std::set<Role> roles;
  for (const Concept& c : concepts) {
    collect_atom_names(c, names);
    collect_roles(c, roles);
  }
  Signature sig;
  sig.concepts.assign(names.begin(), names.end());
  std::set<std::string> role_names;
  for (const Role& r : roles) role_names.insert(r.name);
  sig.roles.assign(role_names.begin(), role_names.end());
  return sig;
}

// extension(a) == extension(b) under every interpretation of their joint
// signature with domains up to max_domain.
inline bool extensions_equal(const Concept& a, const Concept& b, int max_domain) {
  const Signature sig = concept_signature({a, b});
  bool equal = true;
  for_each_interpretation(sig, max_domain, nullptr, [&](const Interpretation& i) {
    if (eval_concept(i, a, NameMode::Lenient) != eval_concept(i, b, NameMode::Lenient)) {
      equal = false;
      return false;
    }
    return true;
  });
  return equal;
}

// ---------------------------------------------------------------------------
// Independent subconcept/negation closure (the test-side oracle for
// shiq::closure)

inline void naive_subconcepts(const Concept& c, std::set<Concept>& out) {
  out.insert(c);
  switch (c.kind()) {
    case ConceptKind::Atom:
      return;
    case ConceptKind::Not:
    case ConceptKind::All:
    case ConceptKind::Some:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      naive_subconcepts(c.child(), out);
      return;
    case ConceptKind::And:
    case ConceptKind::Or:
      naive_subconcepts(c.lhs(), out);
      naive_subconcepts(c.rhs(), out);
      return;
  }
}

inline std::set<Concept> naive_closure(const std::set<Concept>& seed) {
  std::set<Concept> out;
  std::vector<Concept> todo(seed.begin(), seed.end());
  while (!todo.empty()) {
    Concept c = todo.back();
    todo.pop_back();
    std::set<Concept> subs;
    naive_subconcepts(c, subs);
    for (const Concept& s : subs) {
      if (out.insert(s).second) todo.push_back(negate_nnf(s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random small knowledge bases (oracle-reachable scale)

struct KbGen {
  std::mt19937 rng;
  int max_individuals = 3;
  int max_gcis = 2;
  bool with_role_assertions = true;
  int max_query_atoms = 2;
  std::vector<std::string> query_vars{"x", "y"};

  explicit KbGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  KnowledgeBase gen() {
    KnowledgeBase kb;
    const std::vector<std::string> indivs{"a", "b", "c"};
    const int n_ind = 1 + pick(max_individuals);
    const Concept A = Concept::atom("A");
    const Concept B = Concept::atom("B");
    const Role R{"R", false};

    const int n_gci = pick(max_gcis + 1);
    for (int g = 0; g < n_gci; ++g) {
      switch (pick(6)) {
        case 0: kb.add_gci(A, B); break;
        case 1: kb.add_gci(A, Concept::negation(B)); break;
        case 2: kb.add_gci(A, Concept::disj(B, Concept::negation(B))); break;
        case 3: kb.add_gci(A, Concept::exist(R, B)); break;
        case 4: kb.add_gci(A, Concept::univ(R, B)); break;
        default: kb.add_gci(Concept::exist(R, A), B); break;
      }
    }
    kb.add_distinguished("A");
    kb.add_distinguished("B");

    const int n_assert = 1 + pick(3);
    for (int k = 0; k < n_assert; ++k) {
      const std::string& x = indivs[static_cast<std::size_t>(pick(n_ind))];
      const std::string& y = indivs[static_cast<std::size_t>(pick(n_ind))];
      switch (pick(with_role_assertions ? 5 : 3)) {
        case 0: kb.assert_concept(x, A); break;
        case 1: kb.assert_concept(x, B); break;
        case 2: kb.assert_concept(x, Concept::disj(A, B)); break;
        case 3: kb.assert_role(x, R, y); break;
        default:
          if (x != y) {
            kb.assert_distinct(x, y);
          } else {
            kb.assert_concept(x, A);
          }
          break;
      }
    }
    return kb;
  }

  Query gen_query(const KnowledgeBase& kb) {
    Query q;
    const int n_atoms = 1 + pick(max_query_atoms);
    const std::vector<std::string>& vars = query_vars;
    const bool kb_has_role = !occurring_roles(kb).empty();
    auto term = [&]() -> QueryTerm {
      if (pick(2) == 0) {
        return QueryTerm{true, vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))]};
      }
      const auto& inds = kb.individuals();
      return QueryTerm{false, inds[static_cast<std::size_t>(pick(static_cast<int>(inds.size())))]};
    };
    for (int k = 0; k < n_atoms; ++k) {
      QueryAtom a;
      if (kb_has_role && pick(3) == 0) {
        a.kind = QueryAtom::Kind::Role;
        a.pred = "R";
        a.t0 = term();
        a.t1 = term();
      } else {
        a.kind = QueryAtom::Kind::Concept;
        a.pred = pick(2) == 0 ? "A" : "B";
        a.t0 = term();
      }
      q.add_atom(a);
    }
    return q;
  }
};

// ---------------------------------------------------------------------------
// Brute-force query-to-forest mapping (the oracle for maps_into)

inline bool atom_holds(const CompletionForest& f, const QueryAtom& a,
                       const std::map<std::string, NodeId>& assignment) {
  if (a.kind == QueryAtom::Kind::Concept) {
    return f.node(assignment.at(a.t0.name)).label.count(Concept::atom(a.pred)) > 0;
  }
  return f.r_connected(assignment.at(a.t0.name), assignment.at(a.t1.name), Role{a.pred, false});
}

inline std::optional<std::map<std::string, NodeId>> brute_force_maps_into(
    const CompletionForest& f, const Query& q) {
  std::map<std::string, NodeId> assignment;
  for (const std::string& c : q.constants()) {
    auto root = f.root_of(c);
    if (!root) return std::nullopt;
    assignment[c] = f.resolve(*root);
  }
  const std::vector<std::string> vars = q.variables();
  const std::vector<NodeId> nodes = f.alive_nodes();
  std::vector<std::size_t> counter(vars.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < vars.size(); ++i) assignment[vars[i]] = nodes[counter[i]];
    bool all = true;
    for (const QueryAtom& a : q.atoms()) {
      if (!atom_holds(f, a, assignment)) {
        all = false;
        break;
      }
    }
    if (all) {
      std::map<std::string, NodeId> out;
      for (const std::string& v : vars) out[v] = assignment[v];
      return out;
    }
    std::size_t d = 0;
    while (d < vars.size()) {
      if (++counter[d] < nodes.size()) break;
      counter[d] = 0;
      ++d;
    }
    if (d == vars.size()) return std::nullopt;
    if (vars.empty()) return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// "I models forest f" with the variable images searched (roots pinned to
// the individual images)

inline std::optional<std::map<NodeId, int>> find_node_map(const Interpretation& i,
                                                          const CompletionForest& f,
                                                          const KnowledgeBase& kb) {
  if (!is_model_kb(i, kb)) return std::nullopt;
  const std::vector<NodeId> nodes = f.alive_nodes();
  std::vector<std::uint64_t> candidates(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const ForestNode& node = f.node(nodes[k]);
    std::uint64_t mask = i.domain_mask();
    if (node.kind == NodeKind::Root) {
      auto e = i.individual(node.individual);
      if (!e) return std::nullopt;
      mask = 1ull << *e;
    }
    for (const Concept& c : node.label) mask &= eval_concept(i, c, NameMode::Lenient);
    if (mask == 0) return std::nullopt;
    candidates[k] = mask;
  }
  std::map<NodeId, int> assignment;
  // Nodes in creation order: parents precede children, so edge checks
  // against already-assigned endpoints prune early.
  auto consistent = [&](NodeId node, int elem) {
    for (const auto& [from, to] : f.edges()) {
      if (!f.alive(from) || !f.alive(to)) continue;
      int ef, et;
      if (from == node && assignment.count(to)) {
        ef = elem;
        et = assignment.at(to);
      } else if (to == node && assignment.count(from)) {
        ef = assignment.at(from);
        et = elem;
      } else {
        continue;
      }
      for (const Role& r : f.edge_label(from, to)) {
        if (!i.in_role(r, ef, et)) return false;
      }
    }
    for (const auto& [a, b] : f.neq_pairs()) {
      NodeId other;
      if (a == node && assignment.count(b)) {
        other = b;
      } else if (b == node && assignment.count(a)) {
        other = a;
      } else {
        continue;
      }
      if (assignment.at(other) == elem) return false;
    }
    return true;
  };
  std::function<bool(std::size_t)> go = [&](std::size_t k) {
    if (k == nodes.size()) return true;
    for (int e = 0; e < i.size(); ++e) {
      if (!((candidates[k] >> e) & 1)) continue;
      if (!consistent(nodes[k], e)) continue;
      assignment[nodes[k]] = e;
      if (go(k + 1)) return true;
      assignment.erase(nodes[k]);
    }
    return false;
  };
  if (!go(0)) return std::nullopt;
  return assignment;
}

// ---------------------------------------------------------------------------
// Forest structural invariants

inline std::vector<std::string> forest_invariant_issues(const CompletionForest& f,
                                                        const KnowledgeBase& kb) {
  std::vector<std::string> issues;
  std::set<Concept> allowed = closure(kb);
  for (const Concept& c : global_constraints(kb)) allowed.insert(c);
  for (NodeId x = 0; x < f.node_count(); ++x) {
    const ForestNode& n = f.node(x);
    if (n.kind == NodeKind::Root && n.parent) issues.push_back("root with parent");
    if (n.kind == NodeKind::Tree) {
      if (!n.parent) {
        issues.push_back("tree node without parent");
      } else if (*n.parent >= x) {
        issues.push_back("child created before parent");
      }
    }
    if (!f.alive(x)) continue;
    for (const Concept& c : n.label) {
      if (allowed.count(c) == 0) {
        issues.push_back("label member outside closure+constraints: " + c.str());
      }
    }
  }
  for (const auto& [a, b] : f.neq_pairs()) {
    if (a == b) issues.push_back("reflexive neq");
    if (!f.neq(a, b) || !f.neq(b, a)) issues.push_back("neq not symmetric");
  }
  return issues;
}

// Small corpus of well-formed KBs used across engine tests.
inline std::vector<KnowledgeBase> small_corpus() {
  std::vector<KnowledgeBase> out;
  const Concept A = Concept::atom("A");
  const Concept B = Concept::atom("B");
  const Role R{"R", false};
  {
    KnowledgeBase kb;  // forced clash
    kb.add_gci(A, B);
    kb.add_gci(A, Concept::negation(B));
    kb.assert_concept("a", A);
    out.push_back(kb);
  }
  {
    KnowledgeBase kb;  // existential loop, needs blocking
    kb.add_gci(A, Concept::exist(R, A));
    kb.assert_concept("a", A);
    out.push_back(kb);
  }
  {
    KnowledgeBase kb;  // disjunction branches
    kb.add_gci(A, Concept::disj(B, Concept::negation(B)));
    kb.assert_concept("a", A);
    kb.assert_role("a", R, "b");
    out.push_back(kb);
  }
  {
    KnowledgeBase kb;  // number restrictions force a root merge
    kb.assert_concept("a", Concept::at_most(1, R, B));
    kb.assert_role("a", R, "b");
    kb.assert_role("a", R, "c");
    kb.assert_concept("b", B);
    kb.assert_concept("c", B);
    out.push_back(kb);
  }
  {
    KnowledgeBase kb;  // atleast generates, universal propagates
    kb.assert_concept("a", Concept::at_least(2, R, B));
    kb.assert_concept("a", Concept::univ(R, A));
    out.push_back(kb);
  }
  {
    KnowledgeBase kb;  // transitive propagation
    kb.rbox().add_transitive("R");
    kb.assert_concept("a", Concept::univ(R, B));
    kb.assert_role("a", R, "b");
    kb.assert_role("b", R, "c");
    out.push_back(kb);
  }
  {
    KnowledgeBase kb;  // inverse role interaction
    kb.assert_concept("a", Concept::exist(Role{"R", true}, B));
    kb.assert_concept("a", A);
    out.push_back(kb);
  }
  {
    KnowledgeBase kb;  // hierarchy: R below S
    kb.rbox().add_inclusion(R, Role{"S", false});
    kb.assert_role("a", R, "b");
    kb.assert_concept("a", Concept::univ(Role{"S", false}, B));
    out.push_back(kb);
  }
  return out;
}

}  // namespace testsupport

#endif  // SHIQ_TESTS_SUPPORT_HPP_
