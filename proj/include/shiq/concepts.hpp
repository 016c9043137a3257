// Concept and role algebra: NNF concept ASTs, role boxes with a
// reflexive-transitive, inverse-closed sub-role relation.

#ifndef SHIQ_CONCEPTS_HPP_
#define SHIQ_CONCEPTS_HPP_

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace shiq {

// Reserved atomic name used to encode an unsatisfiable concept as
// _Nothing AND (not _Nothing). User identifiers may not start with '_'.
inline constexpr const char* kNothingName = "_Nothing";

// A role: a role name or its inverse. Double inversion never appears;
// inverse() just flips the flag.
struct Role {
  std::string name;
  bool inverted = false;

  Role inverse() const { return Role{name, !inverted}; }
  auto operator<=>(const Role&) const = default;
  std::string str() const { return inverted ? "(inv " + name + ")" : name; }
};

// Role hierarchy plus the set of transitive role names. The sub-role
// relation is kept closed under inverses and transitivity and is
// reflexive; the closure is recomputed on every mutation (the boxes are
// tiny and immutable once a knowledge base is built).
class RoleBox {
 public:
  void add_inclusion(const Role& sub, const Role& super);
  void add_transitive(const std::string& role_name);

  const std::vector<std::pair<Role, Role>>& inclusions() const { return inclusions_; }
  const std::set<std::string>& transitive_names() const { return transitive_; }

  // Trans(R): R or its inverse is declared transitive.
  bool is_transitive(const Role& r) const { return transitive_.count(r.name) > 0; }

  // r subrole-of s: reflexive-transitive closure over the inclusions
  // augmented with their inverse forms.
  bool subrole(const Role& r, const Role& s) const;

  // Simple roles have no transitive sub-roles (themselves included).
  bool is_simple(const Role& r) const;

  // Some pair of distinct roles is both sub- and super-role of the other.
  bool has_cycle() const;

  // All roles mentioned in inclusions or transitivity declarations,
  // both polarities.
  std::vector<Role> mentioned_roles() const;

  bool operator==(const RoleBox& o) const {
    return inclusions_ == o.inclusions_ && transitive_ == o.transitive_;
  }

 private:
  void rebuild_closure();

  std::vector<std::pair<Role, Role>> inclusions_;
  std::set<std::string> transitive_;
  std::set<std::pair<Role, Role>> closure_;  // proper pairs only (r != s)
};

enum class ConceptKind : std::uint8_t {
  Atom,
  Not,
  And,
  Or,
  All,      // universal restriction
  Some,     // existential restriction
  AtLeast,  // qualified number restriction >= n
  AtMost,   // qualified number restriction <= n
};

// An immutable concept expression. Values share structure; equality and
// ordering are structural, so concepts are usable as set keys and render
// deterministically. Surface forms may contain arbitrary negation; NNF
// forms restrict Not to atoms (see nnf / is_nnf).
class Concept {
 public:
  static Concept atom(std::string name);
  static Concept negation(Concept c);
  static Concept conj(Concept lhs, Concept rhs);
  static Concept disj(Concept lhs, Concept rhs);
  static Concept univ(Role r, Concept c);
  static Concept exist(Role r, Concept c);
  static Concept at_least(std::uint32_t n, Role r, Concept c);
  static Concept at_most(std::uint32_t n, Role r, Concept c);
  static Concept nothing();  // _Nothing AND (not _Nothing)

  ConceptKind kind() const { return node_->kind; }
  const std::string& atom_name() const { return node_->name; }
  const Role& role() const { return node_->role; }
  std::uint32_t count() const { return node_->count; }
  const Concept& lhs() const { return node_->kids[0]; }
  const Concept& rhs() const { return node_->kids[1]; }
  // Child of Not and the filler of All/Some/AtLeast/AtMost.
  const Concept& child() const { return node_->kids[0]; }

  bool is_nnf() const;
  std::size_t size() const { return node_->size; }  // node count
  std::size_t hash() const { return node_->hash; }
  std::string str() const;  // canonical fully parenthesized s-expression

  bool operator==(const Concept& o) const;
  std::strong_ordering operator<=>(const Concept& o) const;

 private:
  struct Node {
    ConceptKind kind;
    std::string name;
    Role role;
    std::uint32_t count = 0;
    std::vector<Concept> kids;
    std::size_t hash = 0;
    std::size_t size = 1;
  };

  explicit Concept(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Concept make(Node n);

  std::shared_ptr<const Node> node_;
};

// Negation normal form. Total on well-formed input, semantically
// equivalent, at most linearly larger.
Concept nnf(const Concept& c);

// NNF(not c) for c already in NNF; an involution modulo nnf.
Concept negate_nnf(const Concept& c);

// All subconcepts of c, c included.
void collect_subconcepts(const Concept& c, std::set<Concept>& out);

// Roles occurring anywhere in c (as written, not inverse-closed).
void collect_roles(const Concept& c, std::set<Role>& out);

// Atomic names occurring in c.
void collect_atom_names(const Concept& c, std::set<std::string>& out);

}  // namespace shiq

#endif  // SHIQ_CONCEPTS_HPP_
