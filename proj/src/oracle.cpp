#include "shiq/oracle.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace shiq {

Interpretation::Interpretation(int size) : size_(size) {
  if (size < 1 || size > kMaxDomain) throw OracleError("domain size out of range");
}

std::uint64_t Interpretation::domain_mask() const {
  return size_ == 64 ? ~0ull : (1ull << size_) - 1;
}

void Interpretation::set_concept(const std::string& name, std::uint64_t mask) {
  concepts_[name] = mask & domain_mask();
}

void Interpretation::add_to_concept(const std::string& name, int element) {
  concepts_[name] |= 1ull << element;
}

bool Interpretation::in_concept(const std::string& name, int element) const {
  auto it = concepts_.find(name);
  return it != concepts_.end() && (it->second >> element) & 1;
}

std::uint64_t Interpretation::concept_mask(const std::string& name) const {
  auto it = concepts_.find(name);
  return it == concepts_.end() ? 0 : it->second;
}

void Interpretation::clear_role(const std::string& name) {
  roles_[name].assign(size_, 0);
}

void Interpretation::add_to_role(const std::string& name, int from, int to) {
  auto& rows = roles_[name];
  if (rows.empty()) rows.assign(size_, 0);
  rows[from] |= 1ull << to;
}

bool Interpretation::in_role(const Role& r, int from, int to) const {
  if (r.inverted) std::swap(from, to);
  auto it = roles_.find(r.name);
  return it != roles_.end() && !it->second.empty() && ((it->second[from] >> to) & 1);
}

std::uint64_t Interpretation::role_row(const Role& r, int from) const {
  auto it = roles_.find(r.name);
  if (it == roles_.end() || it->second.empty()) return 0;
  if (!r.inverted) return it->second[from];
  std::uint64_t row = 0;
  for (int j = 0; j < size_; ++j) {
    if ((it->second[j] >> from) & 1) row |= 1ull << j;
  }
  return row;
}

std::vector<std::pair<int, int>> Interpretation::role_pairs(const std::string& name) const {
  std::vector<std::pair<int, int>> out;
  auto it = roles_.find(name);
  if (it == roles_.end()) return out;
  for (int i = 0; i < size_ && i < static_cast<int>(it->second.size()); ++i) {
    for (int j = 0; j < size_; ++j) {
      if ((it->second[i] >> j) & 1) out.push_back({i, j});
    }
  }
  return out;
}

void Interpretation::map_individual(const std::string& name, int element) {
  indivs_[name] = element;
}

std::optional<int> Interpretation::individual(const std::string& name) const {
  auto it = indivs_.find(name);
  if (it == indivs_.end()) return std::nullopt;
  return it->second;
}

namespace {

void transitive_close(std::vector<std::uint64_t>& rows) {
  const int n = static_cast<int>(rows.size());
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if ((rows[i] >> k) & 1) rows[i] |= rows[k];
    }
  }
}

std::vector<std::uint64_t> transpose(const std::vector<std::uint64_t>& rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::uint64_t> out(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((rows[i] >> j) & 1) out[j] |= 1ull << i;
    }
  }
  return out;
}

}  // namespace

bool Interpretation::closed_under(const RoleBox& rbox) const {
  for (const std::string& name : rbox.transitive_names()) {
    auto it = roles_.find(name);
    if (it == roles_.end() || it->second.empty()) continue;
    auto closed = it->second;
    transitive_close(closed);
    if (closed != it->second) return false;
  }
  for (const auto& [sub, super] : rbox.inclusions()) {
    for (int i = 0; i < size_; ++i) {
      for (int j = 0; j < size_; ++j) {
        if (in_role(sub, i, j) && !in_role(super, i, j)) return false;
      }
    }
  }
  return true;
}

void Interpretation::close_roles(const RoleBox& rbox) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const std::string& name : rbox.transitive_names()) {
      auto it = roles_.find(name);
      if (it == roles_.end() || it->second.empty()) continue;
      auto closed = it->second;
      transitive_close(closed);
      if (closed != it->second) {
        it->second = std::move(closed);
        changed = true;
      }
    }
    for (const auto& [sub, super] : rbox.inclusions()) {
      auto sit = roles_.find(sub.name);
      if (sit == roles_.end() || sit->second.empty()) continue;
      std::vector<std::uint64_t> ext = sub.inverted ? transpose(sit->second) : sit->second;
      if (super.inverted) ext = transpose(ext);
      auto& target = roles_[super.name];
      if (target.empty()) target.assign(size_, 0);
      for (int i = 0; i < size_; ++i) {
        if ((target[i] | ext[i]) != target[i]) {
          target[i] |= ext[i];
          changed = true;
        }
      }
    }
  }
}

std::string Interpretation::render() const {
  std::ostringstream os;
  os << "domain=" << size_ << "\n";
  for (const auto& [name, elem] : indivs_) os << "indiv " << name << "=" << elem << "\n";
  for (const auto& [name, mask] : concepts_) {
    os << "concept " << name << "={";
    bool first = true;
    for (int i = 0; i < size_; ++i) {
      if ((mask >> i) & 1) {
        if (!first) os << ",";
        os << i;
        first = false;
      }
    }
    os << "}\n";
  }
  for (const auto& [name, rows] : roles_) {
    os << "role " << name << "={";
    bool first = true;
    for (const auto& [i, j] : role_pairs(name)) {
      if (!first) os << ",";
      os << "(" << i << "," << j << ")";
      first = false;
    }
    os << "}\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Concept evaluation

std::uint64_t eval_concept(const Interpretation& i, const Concept& c, NameMode mode) {
  const std::uint64_t dom = i.domain_mask();
  switch (c.kind()) {
    case ConceptKind::Atom: {
      if (mode == NameMode::Strict && i.concepts().count(c.atom_name()) == 0) {
        throw OracleError("unknown concept name " + c.atom_name());
      }
      return i.concept_mask(c.atom_name());
    }
    case ConceptKind::Not:
      return dom & ~eval_concept(i, c.child(), mode);
    case ConceptKind::And:
      return eval_concept(i, c.lhs(), mode) & eval_concept(i, c.rhs(), mode);
    case ConceptKind::Or:
      return eval_concept(i, c.lhs(), mode) | eval_concept(i, c.rhs(), mode);
    case ConceptKind::All:
    case ConceptKind::Some:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost: {
      if (mode == NameMode::Strict && i.roles().count(c.role().name) == 0) {
        throw OracleError("unknown role name " + c.role().name);
      }
      const std::uint64_t filler = eval_concept(i, c.child(), mode);
      std::uint64_t out = 0;
      for (int x = 0; x < i.size(); ++x) {
        const std::uint64_t row = i.role_row(c.role(), x);
        bool in = false;
        switch (c.kind()) {
          case ConceptKind::All:
            in = (row & ~filler) == 0;
            break;
          case ConceptKind::Some:
            in = (row & filler) != 0;
            break;
          case ConceptKind::AtLeast:
            in = std::popcount(row & filler) >= static_cast<int>(c.count());
            break;
          case ConceptKind::AtMost:
            in = std::popcount(row & filler) <= static_cast<int>(c.count());
            break;
          default:
            break;
        }
        if (in) out |= 1ull << x;
      }
      return out;
    }
  }
  throw OracleError("eval_concept: bad kind");
}

// ---------------------------------------------------------------------------
// Model checking

bool is_model_kb(const Interpretation& i, const KnowledgeBase& kb) {
  if (!i.closed_under(kb.rbox())) return false;
  for (const Assertion& as : kb.abox()) {
    switch (as.kind) {
      case AssertionKind::Concept: {
        auto e = i.individual(as.a);
        if (!e) return false;
        if (!((eval_concept(i, *as.expr, NameMode::Lenient) >> *e) & 1)) return false;
        break;
      }
      case AssertionKind::Role: {
        auto ea = i.individual(as.a);
        auto eb = i.individual(as.b);
        if (!ea || !eb || !i.in_role(as.role, *ea, *eb)) return false;
        break;
      }
      case AssertionKind::Inequality: {
        auto ea = i.individual(as.a);
        auto eb = i.individual(as.b);
        if (!ea || !eb || *ea == *eb) return false;
        break;
      }
    }
  }
  for (const Gci& g : kb.tbox()) {
    const std::uint64_t l = eval_concept(i, g.lhs, NameMode::Lenient);
    const std::uint64_t r = eval_concept(i, g.rhs, NameMode::Lenient);
    if ((l & ~r) != 0) return false;
  }
  return true;
}

bool is_model_forest(const Interpretation& i, const CompletionForest& f, const KnowledgeBase& kb,
                     const std::map<NodeId, int>& node_map) {
  if (!is_model_kb(i, kb)) return false;
  for (NodeId x : f.alive_nodes()) {
    auto it = node_map.find(x);
    if (it == node_map.end()) return false;
    for (const Concept& c : f.node(x).label) {
      if (!((eval_concept(i, c, NameMode::Lenient) >> it->second) & 1)) return false;
    }
  }
  for (const auto& [from, to] : f.edges()) {
    if (!f.alive(from) || !f.alive(to)) continue;
    for (const Role& r : f.edge_label(from, to)) {
      if (!i.in_role(r, node_map.at(from), node_map.at(to))) return false;
    }
  }
  for (const auto& [a, b] : f.neq_pairs()) {
    if (!f.alive(a) || !f.alive(b)) continue;
    if (node_map.at(a) == node_map.at(b)) return false;
  }
  return true;
}

namespace {

bool query_assign(const Interpretation& i, const Query& q,
                  const std::vector<std::string>& vars, std::size_t next,
                  std::map<std::string, int>& binding) {
  auto term_value = [&](const QueryTerm& t) -> std::optional<int> {
    if (t.is_var) {
      auto it = binding.find(t.name);
      if (it == binding.end()) return std::nullopt;
      return it->second;
    }
    auto e = i.individual(t.name);
    if (!e) throw OracleError("unknown constant " + t.name);
    return e;
  };
  // Check every atom whose terms are all bound so far.
  for (const QueryAtom& a : q.atoms()) {
    auto v0 = term_value(a.t0);
    if (!v0) continue;
    if (a.kind == QueryAtom::Kind::Concept) {
      if (!i.in_concept(a.pred, *v0)) return false;
    } else {
      auto v1 = term_value(a.t1);
      if (!v1) continue;
      if (!i.in_role(Role{a.pred, false}, *v0, *v1)) return false;
    }
  }
  if (next == vars.size()) return true;
  for (int e = 0; e < i.size(); ++e) {
    binding[vars[next]] = e;
    if (query_assign(i, q, vars, next + 1, binding)) return true;
  }
  binding.erase(vars[next]);
  return false;
}

}  // namespace

bool satisfies_query(const Interpretation& i, const Query& q) {
  std::vector<std::string> vars = q.variables();
  std::map<std::string, int> binding;
  return query_assign(i, q, vars, 0, binding);
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

Signature kb_signature(const KnowledgeBase& kb) {
  Signature sig;
  sig.concepts = occurring_concept_names(kb);
  std::set<std::string> role_names;
  for (const Role& r : occurring_roles(kb)) role_names.insert(r.name);
  sig.roles.assign(role_names.begin(), role_names.end());
  sig.individuals = kb.individuals();
  return sig;
}

namespace {

// Candidate interpretations are compared under permutations of the
// anonymous (non-individual-image) elements; only the lexicographically
// least representative is visited.
bool is_canonical(const Interpretation& i, const std::vector<int>& anon) {
  if (anon.size() < 2) return true;
  std::vector<int> perm(anon.begin(), anon.end());
  std::vector<int> map_buf(i.size());
  auto key_less_than_original = [&]() {
    // Build the element relabeling for the current permutation.
    std::iota(map_buf.begin(), map_buf.end(), 0);
    for (std::size_t k = 0; k < anon.size(); ++k) map_buf[anon[k]] = perm[k];
    for (const auto& [name, mask] : i.concepts()) {
      std::uint64_t permuted = 0;
      for (int e = 0; e < i.size(); ++e) {
        if ((mask >> e) & 1) permuted |= 1ull << map_buf[e];
      }
      if (permuted != mask) return permuted < mask;
    }
    for (const auto& [name, rows] : i.roles()) {
      for (int e = 0; e < i.size(); ++e) {
        std::uint64_t permuted = 0;
        // Row of the permuted interpretation at index e is derived from
        // the preimage row.
        int pre = 0;
        for (int c = 0; c < i.size(); ++c) {
          if (map_buf[c] == e) {
            pre = c;
            break;
          }
        }
        for (int c = 0; c < i.size(); ++c) {
          if ((rows[pre] >> c) & 1) permuted |= 1ull << map_buf[c];
        }
        if (permuted != rows[e]) return permuted < rows[e];
      }
    }
    return false;  // equal
  };
  std::sort(perm.begin(), perm.end());
  do {
    bool identity = true;
    for (std::size_t k = 0; k < anon.size(); ++k) {
      if (perm[k] != anon[k]) {
        identity = false;
        break;
      }
    }
    if (identity) continue;
    if (key_less_than_original()) return false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return true;
}

// Individual assignments in restricted-growth form: the first individual
// takes element 0, each following one an element already used or the next
// fresh one.
void enumerate_indiv_maps(int count, int size, std::vector<int>& current,
                          const std::function<bool(const std::vector<int>&)>& visit, bool& go_on) {
  if (!go_on) return;
  if (static_cast<int>(current.size()) == count) {
    go_on = visit(current);
    return;
  }
  int max_used = -1;
  for (int v : current) max_used = std::max(max_used, v);
  const int limit = std::min(size - 1, max_used + 1);
  for (int v = 0; v <= limit && go_on; ++v) {
    current.push_back(v);
    enumerate_indiv_maps(count, size, current, visit, go_on);
    current.pop_back();
  }
}

}  // namespace

bool for_each_interpretation(const Signature& sig, int max_domain, const RoleBox* close_under,
                             const std::function<bool(const Interpretation&)>& visit) {
  for (int size = 1; size <= max_domain; ++size) {
    const int cbits = size * static_cast<int>(sig.concepts.size());
    const int rbits = size * size * static_cast<int>(sig.roles.size());
    if (cbits > 62 || rbits > 62) {
      throw OracleError("signature too large for exhaustive enumeration");
    }
    bool go_on = true;
    std::vector<int> prefix;
    enumerate_indiv_maps(
        static_cast<int>(sig.individuals.size()), size, prefix,
        [&](const std::vector<int>& assignment) {
          std::vector<int> anon;
          for (int e = 0; e < size; ++e) {
            if (std::find(assignment.begin(), assignment.end(), e) == assignment.end()) {
              anon.push_back(e);
            }
          }
          Interpretation base(size);
          for (std::size_t k = 0; k < sig.individuals.size(); ++k) {
            base.map_individual(sig.individuals[k], assignment[k]);
          }
          for (std::uint64_t cpat = 0; cpat < (1ull << cbits); ++cpat) {
            Interpretation interp = base;
            for (std::size_t k = 0; k < sig.concepts.size(); ++k) {
              interp.set_concept(sig.concepts[k],
                                 (cpat >> (k * size)) & interp.domain_mask());
            }
            for (std::uint64_t rpat = 0; rpat < (1ull << rbits); ++rpat) {
              for (std::size_t k = 0; k < sig.roles.size(); ++k) {
                interp.clear_role(sig.roles[k]);
                for (int i = 0; i < size; ++i) {
                  for (int j = 0; j < size; ++j) {
                    if ((rpat >> (k * size * size + i * size + j)) & 1) {
                      interp.add_to_role(sig.roles[k], i, j);
                    }
                  }
                }
              }
              if (!is_canonical(interp, anon)) continue;
              if (close_under) {
                Interpretation closed = interp;
                closed.close_roles(*close_under);
                if (!visit(closed)) return false;
              } else {
                if (!visit(interp)) return false;
              }
            }
          }
          return true;
        },
        go_on);
    if (!go_on) return false;
  }
  return true;
}

std::optional<Interpretation> countermodel_search(const KnowledgeBase& kb, const Query& q,
                                                  int max_domain) {
  Signature sig = kb_signature(kb);
  std::optional<Interpretation> found;
  for_each_interpretation(sig, max_domain, &kb.rbox(), [&](const Interpretation& i) {
    if (is_model_kb(i, kb) && !satisfies_query(i, q)) {
      found = i;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace shiq
