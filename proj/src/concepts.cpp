#include "shiq/concepts.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace shiq {

namespace {

std::size_t hash_mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

}  // namespace

// ---------------------------------------------------------------------------
// RoleBox

void RoleBox::add_inclusion(const Role& sub, const Role& super) {
  auto p = std::make_pair(sub, super);
  if (std::find(inclusions_.begin(), inclusions_.end(), p) == inclusions_.end()) {
    inclusions_.push_back(p);
    rebuild_closure();
  }
}

void RoleBox::add_transitive(const std::string& role_name) {
  transitive_.insert(role_name);
}

void RoleBox::rebuild_closure() {
  closure_.clear();
  for (const auto& [r, s] : inclusions_) {
    if (r != s) {
      closure_.insert({r, s});
      closure_.insert({r.inverse(), s.inverse()});
    }
  }
  // Transitive closure by saturation; the sets involved are tiny.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<Role, Role>> add;
    for (const auto& [a, b] : closure_) {
      for (const auto& [c, d] : closure_) {
        if (b == c && a != d && closure_.count({a, d}) == 0) add.push_back({a, d});
      }
    }
    for (const auto& p : add) {
      closure_.insert(p);
      changed = true;
    }
  }
}

bool RoleBox::subrole(const Role& r, const Role& s) const {
  return r == s || closure_.count({r, s}) > 0;
}

bool RoleBox::is_simple(const Role& r) const {
  if (is_transitive(r)) return false;
  for (const auto& [sub, super] : closure_) {
    if (super == r && is_transitive(sub)) return false;
  }
  return true;
}

bool RoleBox::has_cycle() const {
  for (const auto& [a, b] : closure_) {
    if (closure_.count({b, a}) > 0) return true;
  }
  return false;
}

std::vector<Role> RoleBox::mentioned_roles() const {
  std::set<Role> out;
  for (const auto& [r, s] : inclusions_) {
    out.insert(r);
    out.insert(r.inverse());
    out.insert(s);
    out.insert(s.inverse());
  }
  for (const auto& name : transitive_) {
    out.insert(Role{name, false});
    out.insert(Role{name, true});
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Concept

Concept Concept::make(Node n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ull;
  h = hash_mix(h, std::hash<std::string>{}(n.name));
  h = hash_mix(h, std::hash<std::string>{}(n.role.name));
  h = hash_mix(h, n.role.inverted ? 2 : 1);
  h = hash_mix(h, n.count);
  std::size_t sz = 1;
  for (const Concept& k : n.kids) {
    h = hash_mix(h, k.hash());
    sz += k.size();
  }
  n.hash = h;
  n.size = sz;
  return Concept(std::make_shared<const Node>(std::move(n)));
}

Concept Concept::atom(std::string name) {
  Node n;
  n.kind = ConceptKind::Atom;
  n.name = std::move(name);
  return make(std::move(n));
}

Concept Concept::negation(Concept c) {
  Node n;
  n.kind = ConceptKind::Not;
  n.kids.push_back(std::move(c));
  return make(std::move(n));
}

Concept Concept::conj(Concept lhs, Concept rhs) {
  Node n;
  n.kind = ConceptKind::And;
  n.kids.push_back(std::move(lhs));
  n.kids.push_back(std::move(rhs));
  return make(std::move(n));
}

Concept Concept::disj(Concept lhs, Concept rhs) {
  Node n;
  n.kind = ConceptKind::Or;
  n.kids.push_back(std::move(lhs));
  n.kids.push_back(std::move(rhs));
  return make(std::move(n));
}

Concept Concept::univ(Role r, Concept c) {
  Node n;
  n.kind = ConceptKind::All;
  n.role = std::move(r);
  n.kids.push_back(std::move(c));
  return make(std::move(n));
}

Concept Concept::exist(Role r, Concept c) {
  Node n;
  n.kind = ConceptKind::Some;
  n.role = std::move(r);
  n.kids.push_back(std::move(c));
  return make(std::move(n));
}

Concept Concept::at_least(std::uint32_t cnt, Role r, Concept c) {
  Node n;
  n.kind = ConceptKind::AtLeast;
  n.count = cnt;
  n.role = std::move(r);
  n.kids.push_back(std::move(c));
  return make(std::move(n));
}

Concept Concept::at_most(std::uint32_t cnt, Role r, Concept c) {
  Node n;
  n.kind = ConceptKind::AtMost;
  n.count = cnt;
  n.role = std::move(r);
  n.kids.push_back(std::move(c));
  return make(std::move(n));
}

Concept Concept::nothing() {
  Concept a = atom(kNothingName);
  return conj(a, negation(a));
}

bool Concept::is_nnf() const {
  switch (kind()) {
    case ConceptKind::Atom:
      return true;
    case ConceptKind::Not:
      return child().kind() == ConceptKind::Atom;
    case ConceptKind::And:
    case ConceptKind::Or:
      return lhs().is_nnf() && rhs().is_nnf();
    case ConceptKind::All:
    case ConceptKind::Some:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      return child().is_nnf();
  }
  return false;
}

std::string Concept::str() const {
  std::ostringstream os;
  switch (kind()) {
    case ConceptKind::Atom:
      os << atom_name();
      break;
    case ConceptKind::Not:
      os << "(not " << child().str() << ")";
      break;
    case ConceptKind::And:
      os << "(and " << lhs().str() << " " << rhs().str() << ")";
      break;
    case ConceptKind::Or:
      os << "(or " << lhs().str() << " " << rhs().str() << ")";
      break;
    case ConceptKind::All:
      os << "(all " << role().str() << " " << child().str() << ")";
      break;
    case ConceptKind::Some:
      os << "(some " << role().str() << " " << child().str() << ")";
      break;
    case ConceptKind::AtLeast:
      os << "(atleast " << count() << " " << role().str() << " " << child().str() << ")";
      break;
    case ConceptKind::AtMost:
      os << "(atmost " << count() << " " << role().str() << " " << child().str() << ")";
      break;
  }
  return os.str();
}

bool Concept::operator==(const Concept& o) const {
  if (node_ == o.node_) return true;
  if (node_->hash != o.node_->hash) return false;
  return (*this <=> o) == std::strong_ordering::equal;
}

std::strong_ordering Concept::operator<=>(const Concept& o) const {
  if (node_ == o.node_) return std::strong_ordering::equal;
  if (auto c = kind() <=> o.kind(); c != 0) return c;
  switch (kind()) {
    case ConceptKind::Atom:
      return atom_name() <=> o.atom_name();
    case ConceptKind::Not:
      return child() <=> o.child();
    case ConceptKind::And:
    case ConceptKind::Or: {
      if (auto c = lhs() <=> o.lhs(); c != 0) return c;
      return rhs() <=> o.rhs();
    }
    case ConceptKind::All:
    case ConceptKind::Some: {
      if (auto c = role() <=> o.role(); c != 0) return c;
      return child() <=> o.child();
    }
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost: {
      if (auto c = count() <=> o.count(); c != 0) return c;
      if (auto c = role() <=> o.role(); c != 0) return c;
      return child() <=> o.child();
    }
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// NNF

namespace {

// Returns NNF(not c) for arbitrary c.
Concept push_negation(const Concept& c) {
  switch (c.kind()) {
    case ConceptKind::Atom:
      return Concept::negation(c);
    case ConceptKind::Not:
      return nnf(c.child());
    case ConceptKind::And:
      return Concept::disj(push_negation(c.lhs()), push_negation(c.rhs()));
    case ConceptKind::Or:
      return Concept::conj(push_negation(c.lhs()), push_negation(c.rhs()));
    case ConceptKind::All:
      return Concept::exist(c.role(), push_negation(c.child()));
    case ConceptKind::Some:
      return Concept::univ(c.role(), push_negation(c.child()));
    case ConceptKind::AtLeast:
      // not(>= 0 R.C) holds nowhere.
      if (c.count() == 0) return Concept::nothing();
      return Concept::at_most(c.count() - 1, c.role(), nnf(c.child()));
    case ConceptKind::AtMost:
      return Concept::at_least(c.count() + 1, c.role(), nnf(c.child()));
  }
  throw std::logic_error("push_negation: bad kind");
}

}  // namespace

Concept nnf(const Concept& c) {
  switch (c.kind()) {
    case ConceptKind::Atom:
      return c;
    case ConceptKind::Not:
      return push_negation(c.child());
    case ConceptKind::And:
      return Concept::conj(nnf(c.lhs()), nnf(c.rhs()));
    case ConceptKind::Or:
      return Concept::disj(nnf(c.lhs()), nnf(c.rhs()));
    case ConceptKind::All:
      return Concept::univ(c.role(), nnf(c.child()));
    case ConceptKind::Some:
      return Concept::exist(c.role(), nnf(c.child()));
    case ConceptKind::AtLeast:
      return Concept::at_least(c.count(), c.role(), nnf(c.child()));
    case ConceptKind::AtMost:
      return Concept::at_most(c.count(), c.role(), nnf(c.child()));
  }
  throw std::logic_error("nnf: bad kind");
}

Concept negate_nnf(const Concept& c) {
  assert(c.is_nnf());
  return push_negation(c);
}

void collect_subconcepts(const Concept& c, std::set<Concept>& out) {
  if (!out.insert(c).second) return;
  switch (c.kind()) {
    case ConceptKind::Atom:
      break;
    case ConceptKind::Not:
    case ConceptKind::All:
    case ConceptKind::Some:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      collect_subconcepts(c.child(), out);
      break;
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_subconcepts(c.lhs(), out);
      collect_subconcepts(c.rhs(), out);
      break;
  }
}

void collect_roles(const Concept& c, std::set<Role>& out) {
  switch (c.kind()) {
    case ConceptKind::Atom:
      break;
    case ConceptKind::Not:
      collect_roles(c.child(), out);
      break;
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_roles(c.lhs(), out);
      collect_roles(c.rhs(), out);
      break;
    case ConceptKind::All:
    case ConceptKind::Some:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      out.insert(c.role());
      collect_roles(c.child(), out);
      break;
  }
}

void collect_atom_names(const Concept& c, std::set<std::string>& out) {
  switch (c.kind()) {
    case ConceptKind::Atom:
      out.insert(c.atom_name());
      break;
    case ConceptKind::Not:
    case ConceptKind::All:
    case ConceptKind::Some:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      collect_atom_names(c.child(), out);
      break;
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_atom_names(c.lhs(), out);
      collect_atom_names(c.rhs(), out);
      break;
  }
}

}  // namespace shiq
