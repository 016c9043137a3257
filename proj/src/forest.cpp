#include "shiq/forest.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace shiq {

namespace {
const std::set<Role> kEmptyRoleSet;

std::string label_text(const std::set<Concept>& label) {
  std::string out = "{";
  bool first = true;
  for (const Concept& c : label) {
    if (!first) out += ",";
    out += c.str();
    first = false;
  }
  return out + "}";
}

std::string roles_text(const std::set<Role>& roles) {
  std::string out = "{";
  bool first = true;
  for (const Role& r : roles) {
    if (!first) out += ",";
    out += r.str();
    first = false;
  }
  return out + "}";
}
}  // namespace

NodeId CompletionForest::new_node(ForestNode n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

CompletionForest CompletionForest::initial(std::shared_ptr<const KnowledgeBase> kb) {
  CompletionForest f(kb);
  const KnowledgeBase& k = *kb;
  if (k.individuals().empty()) {
    throw std::invalid_argument("initial forest requires a non-empty A-Box");
  }
  const std::set<Concept> axioms = global_constraints(k);
  for (const std::string& ind : k.individuals()) {
    ForestNode n;
    n.kind = NodeKind::Root;
    n.individual = ind;
    n.label = axioms;
    f.roots_[ind] = f.new_node(std::move(n));
  }
  for (const Assertion& as : k.abox()) {
    switch (as.kind) {
      case AssertionKind::Concept:
        f.nodes_[f.roots_.at(as.a)].label.insert(*as.expr);
        break;
      case AssertionKind::Role: {
        // Inverse role assertions land as the forward edge on the
        // inverted endpoints, keeping edge labels over plain roles too
        // when possible; (inv R)(a,b) is stored as edge <b,a> with R.
        NodeId from = f.roots_.at(as.a);
        NodeId to = f.roots_.at(as.b);
        Role r = as.role;
        if (r.inverted) {
          std::swap(from, to);
          r = r.inverse();
        }
        f.edges_[{from, to}].insert(r);
        break;
      }
      case AssertionKind::Inequality:
        f.add_neq(f.roots_.at(as.a), f.roots_.at(as.b));
        break;
    }
  }
  return f;
}

std::vector<NodeId> CompletionForest::alive_nodes() const {
  std::vector<NodeId> out;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (alive(id)) out.push_back(id);
  }
  return out;
}

NodeId CompletionForest::resolve(NodeId id) const {
  auto it = merged_.find(id);
  while (it != merged_.end()) {
    id = it->second;
    it = merged_.find(id);
  }
  return id;
}

std::optional<NodeId> CompletionForest::root_of(const std::string& individual) const {
  auto it = roots_.find(individual);
  if (it == roots_.end()) return std::nullopt;
  return it->second;
}

const std::set<Role>& CompletionForest::edge_label(NodeId from, NodeId to) const {
  auto it = edges_.find({from, to});
  return it == edges_.end() ? kEmptyRoleSet : it->second;
}

std::vector<std::pair<NodeId, NodeId>> CompletionForest::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edges_.size());
  for (const auto& [k, v] : edges_) out.push_back(k);
  return out;
}

bool CompletionForest::neq(NodeId a, NodeId b) const {
  if (a == b) return false;
  return neq_.count({std::min(a, b), std::max(a, b)}) > 0;
}

std::vector<std::pair<NodeId, NodeId>> CompletionForest::neq_pairs() const {
  return {neq_.begin(), neq_.end()};
}

std::vector<NodeId> CompletionForest::s_successors(NodeId x, const Role& s) const {
  std::set<NodeId> out;
  const RoleBox& rbox = kb_->rbox();
  for (const auto& [key, roles] : edges_) {
    if (key.first != x) continue;
    for (const Role& r : roles) {
      if (rbox.subrole(r, s)) {
        out.insert(key.second);
        break;
      }
    }
  }
  return {out.begin(), out.end()};
}

std::vector<NodeId> CompletionForest::s_neighbours(NodeId x, const Role& s) const {
  std::set<NodeId> out;
  const RoleBox& rbox = kb_->rbox();
  const Role inv_s = s.inverse();
  for (const auto& [key, roles] : edges_) {
    if (key.first == x) {
      for (const Role& r : roles) {
        if (rbox.subrole(r, s)) {
          out.insert(key.second);
          break;
        }
      }
    }
    if (key.second == x) {
      for (const Role& r : roles) {
        if (rbox.subrole(r, inv_s)) {
          out.insert(key.first);
          break;
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

bool CompletionForest::r_connected(NodeId x, NodeId y, const Role& r) const {
  const std::vector<NodeId> direct = s_neighbours(x, r);
  if (std::binary_search(direct.begin(), direct.end(), y)) return true;
  // A chain of S-neighbour steps for one transitive S below r. Each step
  // guarantees S(u,w) in every model, so a chain composes under
  // transitivity; this is the same closure the canonical model applies
  // to edge labels.
  for (const Role& s : occurring_roles(*kb_)) {
    if (!kb_->rbox().is_transitive(s) || !kb_->rbox().subrole(s, r)) continue;
    std::set<NodeId> seen;
    std::deque<NodeId> queue;
    for (NodeId z : s_neighbours(x, s)) {
      if (seen.insert(z).second) queue.push_back(z);
    }
    while (!queue.empty()) {
      NodeId z = queue.front();
      queue.pop_front();
      if (z == y) return true;
      for (NodeId w : s_neighbours(z, s)) {
        if (seen.insert(w).second) queue.push_back(w);
      }
    }
  }
  return false;
}

std::vector<NodeId> CompletionForest::tree_children(NodeId x) const {
  std::vector<NodeId> out;
  for (NodeId c : nodes_[x].children) {
    if (nodes_[c].parent == x && !edge_label(x, c).empty()) out.push_back(c);
  }
  return out;
}

bool CompletionForest::is_ancestor(NodeId ancestor, NodeId descendant) const {
  std::optional<NodeId> p = nodes_[descendant].parent;
  while (p) {
    if (*p == ancestor) return true;
    p = nodes_[*p].parent;
  }
  return false;
}

unsigned CompletionForest::depth(NodeId x) const {
  unsigned d = 0;
  std::optional<NodeId> p = nodes_[x].parent;
  while (p) {
    ++d;
    p = nodes_[*p].parent;
  }
  return d;
}

// ---------------------------------------------------------------------------
// n-tree codes and isomorphism

std::string CompletionForest::n_tree_code(
    NodeId v, unsigned n, std::map<std::pair<NodeId, unsigned>, std::string>& memo) const {
  auto key = std::make_pair(v, n);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::string code = "(" + label_text(nodes_[v].label);
  if (n > 0) {
    std::vector<std::string> parts;
    for (NodeId c : tree_children(v)) {
      parts.push_back(roles_text(edge_label(v, c)) + n_tree_code(c, n - 1, memo));
    }
    std::sort(parts.begin(), parts.end());
    for (const std::string& p : parts) code += p;
  }
  code += ")";
  memo.emplace(key, code);
  return code;
}

void CompletionForest::collect_iso(NodeId v, NodeId w, unsigned n, std::map<NodeId, NodeId>& out,
                                   std::map<std::pair<NodeId, unsigned>, std::string>& memo) const {
  out[v] = w;
  if (n == 0) return;
  // Children sorted by (arc label, subtree code) line up one-to-one when
  // the codes of v and w agree.
  auto sorted_kids = [&](NodeId p) {
    std::vector<std::pair<std::string, NodeId>> kids;
    for (NodeId c : tree_children(p)) {
      kids.push_back({roles_text(edge_label(p, c)) + n_tree_code(c, n - 1, memo), c});
    }
    std::sort(kids.begin(), kids.end());
    return kids;
  };
  auto kv = sorted_kids(v);
  auto kw = sorted_kids(w);
  for (std::size_t i = 0; i < kv.size() && i < kw.size(); ++i) {
    collect_iso(kv[i].second, kw[i].second, n - 1, out, memo);
  }
}

std::optional<std::map<NodeId, NodeId>> CompletionForest::n_tree_iso(NodeId v, NodeId w,
                                                                     unsigned n) const {
  std::map<std::pair<NodeId, unsigned>, std::string> memo;
  if (n_tree_code(v, n, memo) != n_tree_code(w, n, memo)) return std::nullopt;
  std::map<NodeId, NodeId> iso;
  collect_iso(v, w, n, iso, memo);
  return iso;
}

// ---------------------------------------------------------------------------
// Blocking

std::vector<BlockingStatus> CompletionForest::blocking_all(unsigned n) const {
  std::vector<BlockingStatus> status(nodes_.size());
  std::map<std::pair<NodeId, unsigned>, std::string> memo;
  // Parents are always created before their children, so one ascending
  // pass sees every ancestor before the node itself.
  for (NodeId x = 0; x < nodes_.size(); ++x) {
    const ForestNode& node = nodes_[x];
    if (node.kind == NodeKind::Root) continue;  // roots stay Unblocked
    NodeId parent = *node.parent;
    if (status[parent].blocked() || edge_label(parent, x).empty()) {
      status[x].kind = BlockKind::Indirectly;
      continue;
    }
    // Directly blocked: x is a leaf of the n-tree of some ancestor v
    // (x itself included) that has an n-witness w, i.e. an ancestor of v
    // outside whose own n-tree v lies, with isomorphic n-trees.
    const bool childless = tree_children(x).empty();
    NodeId v = x;
    for (unsigned d = 0; ; ++d) {
      const bool leaf_of_v = (d == n) || childless;
      if (leaf_of_v && nodes_[v].kind == NodeKind::Tree) {
        const std::string code_v = n_tree_code(v, n, memo);
        std::optional<NodeId> w = nodes_[v].parent;
        unsigned gap = 1;
        while (w) {
          if (gap > n && n_tree_code(*w, n, memo) == code_v) {
            status[x].kind = BlockKind::Directly;
            status[x].witness = *w;
            collect_iso(v, *w, n, status[x].iso, memo);
            break;
          }
          w = nodes_[*w].parent;
          ++gap;
        }
        if (status[x].kind == BlockKind::Directly) break;
      }
      if (d == n || !nodes_[v].parent) break;
      v = *nodes_[v].parent;
    }
  }
  return status;
}

BlockingStatus CompletionForest::blocking_status(NodeId x, unsigned n) const {
  return blocking_all(n)[x];
}

// ---------------------------------------------------------------------------
// Clash detection

namespace {
// True when `chosen` extends to a pairwise-neq subset of size `want`
// drawn from candidates[from..].
bool grow_clique(const CompletionForest& f, const std::vector<NodeId>& candidates,
                 std::size_t from, std::vector<NodeId>& chosen, std::size_t want) {
  if (chosen.size() == want) return true;
  for (std::size_t i = from; i < candidates.size(); ++i) {
    NodeId cand = candidates[i];
    bool ok = true;
    for (NodeId c : chosen) {
      if (!f.neq(c, cand)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    chosen.push_back(cand);
    if (grow_clique(f, candidates, i + 1, chosen, want)) return true;
    chosen.pop_back();
  }
  return false;
}
}  // namespace

bool exists_pairwise_neq_subset(const CompletionForest& f, const std::vector<NodeId>& candidates,
                                std::size_t k) {
  std::vector<NodeId> chosen;
  return grow_clique(f, candidates, 0, chosen, k);
}

std::optional<Clash> CompletionForest::clash() const {
  for (NodeId x = 0; x < nodes_.size(); ++x) {
    if (!alive(x)) continue;
    const std::set<Concept>& label = nodes_[x].label;
    for (const Concept& c : label) {
      if (c.kind() == ConceptKind::Not && label.count(c.child()) > 0) {
        return Clash{x, "node " + std::to_string(x) + " contains both " + c.child().str() +
                            " and " + c.str()};
      }
    }
    for (const Concept& c : label) {
      if (c.kind() != ConceptKind::AtMost) continue;
      std::vector<NodeId> qualified;
      for (NodeId y : s_neighbours(x, c.role())) {
        if (nodes_[y].label.count(c.child()) > 0) qualified.push_back(y);
      }
      if (qualified.size() <= c.count()) continue;
      std::vector<NodeId> chosen;
      if (grow_clique(*this, qualified, 0, chosen, c.count() + 1)) {
        return Clash{x, "node " + std::to_string(x) + " violates " + c.str() + " with " +
                            std::to_string(c.count() + 1) + " pairwise distinct neighbours"};
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Mutation

NodeId CompletionForest::add_tree_node(NodeId parent, std::set<Role> edge_roles,
                                       std::set<Concept> label) {
  ForestNode n;
  n.kind = NodeKind::Tree;
  n.parent = parent;
  n.label = std::move(label);
  NodeId id = new_node(std::move(n));
  nodes_[parent].children.push_back(id);
  edges_[{parent, id}] = std::move(edge_roles);
  return id;
}

void CompletionForest::union_label(NodeId into, const std::set<Concept>& from) {
  nodes_[into].label.insert(from.begin(), from.end());
}

void CompletionForest::union_edge(NodeId from, NodeId to, const std::set<Role>& roles) {
  edges_[{from, to}].insert(roles.begin(), roles.end());
}

void CompletionForest::clear_edge(NodeId from, NodeId to) {
  auto it = edges_.find({from, to});
  if (it != edges_.end()) it->second.clear();
}

void CompletionForest::add_neq(NodeId a, NodeId b) {
  if (a == b) throw std::logic_error("reflexive inequality");
  neq_.insert({std::min(a, b), std::max(a, b)});
}

void CompletionForest::merge_root_into(NodeId y, NodeId z) {
  if (nodes_[y].kind != NodeKind::Root || nodes_[z].kind != NodeKind::Root || y == z) {
    throw std::logic_error("merge_root_into expects two distinct roots");
  }
  union_label(z, nodes_[y].label);
  nodes_[y].label.clear();
  // Move edges off y; a self-loop at y becomes a self-loop at z.
  std::vector<std::pair<std::pair<NodeId, NodeId>, std::set<Role>>> moved;
  for (auto it = edges_.begin(); it != edges_.end();) {
    if (it->first.first == y || it->first.second == y) {
      moved.push_back(*it);
      it = edges_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto& [key, roles] : moved) {
    NodeId from = key.first == y ? z : key.first;
    NodeId to = key.second == y ? z : key.second;
    if (roles.empty()) continue;  // residue edges are not carried over
    edges_[{from, to}].insert(roles.begin(), roles.end());
  }
  // Re-hang y's tree children under z.
  for (NodeId c : nodes_[y].children) {
    if (nodes_[c].parent == y) {
      nodes_[c].parent = z;
      nodes_[z].children.push_back(c);
    }
  }
  nodes_[y].children.clear();
  // Transfer the inequality constraints of y onto z.
  std::vector<NodeId> partners;
  for (const auto& [a, b] : neq_) {
    if (a == y) partners.push_back(b);
    if (b == y) partners.push_back(a);
  }
  for (NodeId u : partners) {
    if (u != z) add_neq(u, z);
  }
  merged_[y] = z;
}

// ---------------------------------------------------------------------------
// Dump

std::string CompletionForest::dump(std::optional<unsigned> blocking_depth) const {
  std::vector<BlockingStatus> status;
  if (blocking_depth) status = blocking_all(*blocking_depth);
  std::ostringstream os;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const ForestNode& n = nodes_[id];
    os << "node " << id;
    if (n.kind == NodeKind::Root) {
      os << " root " << n.individual;
    } else {
      os << " tree parent=" << *n.parent << " edge=" << roles_text(edge_label(*n.parent, id));
    }
    os << " label=" << label_text(n.label);
    if (!alive(id)) os << " merged->" << resolve(id);
    if (blocking_depth && alive(id)) {
      switch (status[id].kind) {
        case BlockKind::Unblocked:
          break;
        case BlockKind::Directly:
          os << " blocked=direct witness=" << status[id].witness;
          break;
        case BlockKind::Indirectly:
          os << " blocked=indirect";
          break;
      }
    }
    os << "\n";
  }
  for (const auto& [key, roles] : edges_) {
    const auto& [from, to] = key;
    if (nodes_[to].kind == NodeKind::Tree && nodes_[to].parent == from) continue;  // shown inline
    os << "edge " << from << "->" << to << " " << roles_text(roles) << "\n";
  }
  for (const auto& [a, b] : neq_) os << "neq " << a << "," << b << "\n";
  return os.str();
}

}  // namespace shiq
