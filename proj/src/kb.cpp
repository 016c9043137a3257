#include "shiq/kb.hpp"

#include <algorithm>

namespace shiq {

void KnowledgeBase::note_individual(const std::string& name) {
  if (!has_individual(name)) individuals_.push_back(name);
}

bool KnowledgeBase::has_individual(const std::string& name) const {
  return std::find(individuals_.begin(), individuals_.end(), name) != individuals_.end();
}

void KnowledgeBase::assert_concept(const std::string& individual, const Concept& c) {
  Assertion as;
  as.kind = AssertionKind::Concept;
  as.expr = nnf(c);
  as.a = individual;
  abox_.push_back(std::move(as));
  note_individual(individual);
}

void KnowledgeBase::assert_role(const std::string& a, const Role& r, const std::string& b) {
  Assertion as;
  as.kind = AssertionKind::Role;
  as.role = r;
  as.a = a;
  as.b = b;
  abox_.push_back(std::move(as));
  note_individual(a);
  note_individual(b);
}

void KnowledgeBase::assert_distinct(const std::string& a, const std::string& b) {
  Assertion as;
  as.kind = AssertionKind::Inequality;
  as.a = a;
  as.b = b;
  abox_.push_back(std::move(as));
  note_individual(a);
  note_individual(b);
}

void KnowledgeBase::add_gci(const Concept& lhs, const Concept& rhs) {
  tbox_.push_back(Gci{nnf(lhs), nnf(rhs)});
}

void KnowledgeBase::add_distinguished(const std::string& concept_name) {
  auto pos = std::lower_bound(distinguished_.begin(), distinguished_.end(), concept_name);
  if (pos == distinguished_.end() || *pos != concept_name) distinguished_.insert(pos, concept_name);
}

std::set<Concept> global_constraints(const KnowledgeBase& kb) {
  std::set<Concept> out;
  for (const Gci& g : kb.tbox()) {
    out.insert(Concept::disj(negate_nnf(g.lhs), g.rhs));
  }
  for (const std::string& name : kb.distinguished()) {
    Concept a = Concept::atom(name);
    out.insert(Concept::disj(a, Concept::negation(a)));
  }
  return out;
}

std::set<Concept> closure(const KnowledgeBase& kb) {
  std::set<Concept> seed;
  for (const Assertion& as : kb.abox()) {
    if (as.kind == AssertionKind::Concept) seed.insert(*as.expr);
  }
  for (const Concept& c : global_constraints(kb)) seed.insert(c);

  std::set<Concept> out;
  // Close under subconcepts, then NNF negation of every member, to a
  // fixed point. Negating a member only introduces concepts whose
  // subconcepts are themselves negations of present subconcepts, so two
  // sweeps settle; the loop guards the general case.
  std::vector<Concept> frontier(seed.begin(), seed.end());
  while (!frontier.empty()) {
    std::set<Concept> grown;
    for (const Concept& c : frontier) collect_subconcepts(c, grown);
    frontier.clear();
    for (const Concept& c : grown) {
      if (out.insert(c).second) frontier.push_back(negate_nnf(c));
    }
  }

  // Transitive-role propagation can stamp (all R.C) for any transitive
  // R below the S of an (all S.C) already in the set; fold those in so
  // the set really bounds reachable node labels.
  const std::vector<Role> roles = occurring_roles(kb);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Concept> add;
    for (const Concept& c : out) {
      if (c.kind() != ConceptKind::All) continue;
      for (const Role& r : roles) {
        if (!kb.rbox().is_transitive(r) || !kb.rbox().subrole(r, c.role())) continue;
        Concept univ = Concept::univ(r, c.child());
        if (out.count(univ) == 0) add.push_back(univ);
      }
    }
    for (const Concept& c : add) {
      std::set<Concept> grown;
      collect_subconcepts(c, grown);
      collect_subconcepts(negate_nnf(c), grown);
      for (const Concept& g : grown) {
        if (out.insert(g).second) {
          out.insert(negate_nnf(g));
          changed = true;
        }
      }
    }
  }
  return out;
}

std::vector<Role> occurring_roles(const KnowledgeBase& kb) {
  std::set<Role> names;
  auto note = [&names](const Role& r) {
    names.insert(Role{r.name, false});
    names.insert(Role{r.name, true});
  };
  for (const Assertion& as : kb.abox()) {
    if (as.kind == AssertionKind::Role) note(as.role);
    if (as.kind == AssertionKind::Concept) {
      std::set<Role> rs;
      collect_roles(*as.expr, rs);
      for (const Role& r : rs) note(r);
    }
  }
  for (const Gci& g : kb.tbox()) {
    std::set<Role> rs;
    collect_roles(g.lhs, rs);
    collect_roles(g.rhs, rs);
    for (const Role& r : rs) note(r);
  }
  for (const Role& r : kb.rbox().mentioned_roles()) note(r);
  return {names.begin(), names.end()};
}

std::vector<std::string> occurring_concept_names(const KnowledgeBase& kb) {
  std::set<std::string> names;
  for (const Assertion& as : kb.abox()) {
    if (as.kind == AssertionKind::Concept) collect_atom_names(*as.expr, names);
  }
  for (const Gci& g : kb.tbox()) {
    collect_atom_names(g.lhs, names);
    collect_atom_names(g.rhs, names);
  }
  for (const std::string& d : kb.distinguished()) names.insert(d);
  return {names.begin(), names.end()};
}

namespace {

void check_simple_roles(const RoleBox& rbox, const Concept& c, ValidationIssue::Where where,
                        std::size_t index, std::vector<ValidationIssue>& out) {
  switch (c.kind()) {
    case ConceptKind::Atom:
      return;
    case ConceptKind::Not:
    case ConceptKind::All:
    case ConceptKind::Some:
      check_simple_roles(rbox, c.child(), where, index, out);
      return;
    case ConceptKind::And:
    case ConceptKind::Or:
      check_simple_roles(rbox, c.lhs(), where, index, out);
      check_simple_roles(rbox, c.rhs(), where, index, out);
      return;
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      if (!rbox.is_simple(c.role())) {
        out.push_back({where, index,
                       "number restriction on non-simple role " + c.role().str() + " in " + c.str()});
      }
      check_simple_roles(rbox, c.child(), where, index, out);
      return;
  }
}

}  // namespace

std::vector<ValidationIssue> validate_kb(const KnowledgeBase& kb) {
  std::vector<ValidationIssue> out;
  if (kb.rbox().has_cycle()) {
    out.push_back({ValidationIssue::Where::RBox, 0,
                   "role hierarchy contains a cycle among distinct roles"});
  }
  for (std::size_t i = 0; i < kb.tbox().size(); ++i) {
    const Gci& g = kb.tbox()[i];
    check_simple_roles(kb.rbox(), g.lhs, ValidationIssue::Where::TBox, i, out);
    check_simple_roles(kb.rbox(), g.rhs, ValidationIssue::Where::TBox, i, out);
    if (!g.lhs.is_nnf() || !g.rhs.is_nnf()) {
      out.push_back({ValidationIssue::Where::TBox, i, "inclusion axiom not in NNF"});
    }
  }
  for (std::size_t i = 0; i < kb.abox().size(); ++i) {
    const Assertion& as = kb.abox()[i];
    if (as.kind == AssertionKind::Concept) {
      check_simple_roles(kb.rbox(), *as.expr, ValidationIssue::Where::ABox, i, out);
      if (!as.expr->is_nnf()) {
        out.push_back({ValidationIssue::Where::ABox, i, "asserted concept not in NNF"});
      }
    }
    if (as.kind == AssertionKind::Inequality && as.a == as.b) {
      out.push_back({ValidationIssue::Where::ABox, i,
                     "inequality " + as.a + " != " + as.b + " is unsatisfiable"});
    }
  }
  if (kb.individuals().empty()) {
    out.push_back({ValidationIssue::Where::General, 0,
                   "A-Box is empty: at least one assertion is required"});
  }
  return out;
}

KbMetrics metrics(const KnowledgeBase& kb) {
  KbMetrics m;
  std::set<Concept> clos = closure(kb);
  for (const std::string& name : kb.distinguished()) clos.insert(Concept::atom(name));
  m.conccard = clos.size();
  m.rolecard = occurring_roles(kb).size();
  for (const Concept& c : clos) {
    std::set<Concept> subs;
    collect_subconcepts(c, subs);
    for (const Concept& s : subs) {
      if (s.kind() == ConceptKind::AtLeast || s.kind() == ConceptKind::AtMost) {
        m.maxnumrest = std::max(m.maxnumrest, s.count());
      }
    }
  }
  m.abox_size = kb.abox().size();
  return m;
}

}  // namespace shiq
