// Completion forests: a labeled root graph over the A-Box individuals with
// labeled variable trees grown below, an inequality relation, a merge
// record for retired roots, blocking and clash detection.

#ifndef SHIQ_FOREST_HPP_
#define SHIQ_FOREST_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shiq/kb.hpp"

namespace shiq {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Root, Tree };

struct ForestNode {
  NodeKind kind;
  std::string individual;  // Root nodes only
  std::set<Concept> label;
  std::optional<NodeId> parent;   // Tree nodes only
  std::vector<NodeId> children;   // tree children, creation order
};

enum class BlockKind : std::uint8_t { Unblocked, Directly, Indirectly };

struct BlockingStatus {
  BlockKind kind = BlockKind::Unblocked;
  // Directly blocked only: the witness subtree root w and the
  // label/arc-preserving isomorphism from the blocked subtree onto w's.
  NodeId witness = 0;
  std::map<NodeId, NodeId> iso;

  bool blocked() const { return kind != BlockKind::Unblocked; }
};

struct Clash {
  NodeId node;
  std::string description;
};

// Value type: copying yields an independent forest. The knowledge base is
// shared immutably for role-hierarchy lookups.
class CompletionForest {
 public:
  // One root per individual; labels from the concept assertions plus the
  // global constraints; edges from the role assertions; the inequality
  // relation from the A-Box.
  static CompletionForest initial(std::shared_ptr<const KnowledgeBase> kb);

  const KnowledgeBase& kb() const { return *kb_; }
  std::shared_ptr<const KnowledgeBase> kb_ptr() const { return kb_; }

  std::size_t node_count() const { return nodes_.size(); }
  const ForestNode& node(NodeId id) const { return nodes_[id]; }
  bool alive(NodeId id) const { return merged_.count(id) == 0; }
  std::vector<NodeId> alive_nodes() const;  // creation order
  // Chase the merge record down to the surviving node.
  NodeId resolve(NodeId id) const;
  std::optional<NodeId> root_of(const std::string& individual) const;
  const std::map<NodeId, NodeId>& merged() const { return merged_; }

  const std::set<Role>& edge_label(NodeId from, NodeId to) const;
  // All directed edges, including empty residue edges, sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;
  bool neq(NodeId a, NodeId b) const;
  std::vector<std::pair<NodeId, NodeId>> neq_pairs() const;  // a < b

  // y with an edge x->y carrying a subrole of s, or an edge y->x carrying
  // a subrole of inv(s). Sorted, deduplicated.
  std::vector<NodeId> s_neighbours(NodeId x, const Role& s) const;
  std::vector<NodeId> s_successors(NodeId x, const Role& s) const;

  // One-step s-neighbourhood for some subrole of r, or a chain of
  // S-neighbour steps of length >= 1 for some transitive S below r.
  // Root-graph edges participate; cycles are fine.
  bool r_connected(NodeId x, NodeId y, const Role& r) const;

  // Depth-n subtree isomorphism (labels and arc labels preserved),
  // computed via canonical codes. Returns the node mapping or nothing.
  std::optional<std::map<NodeId, NodeId>> n_tree_iso(NodeId v, NodeId w, unsigned n) const;

  BlockingStatus blocking_status(NodeId x, unsigned n) const;
  std::vector<BlockingStatus> blocking_all(unsigned n) const;

  // First clash in node order: {C, not C} in a label, or n+1 pairwise
  // distinct qualified neighbours against an atmost restriction.
  std::optional<Clash> clash() const;

  // Deterministic text rendering; with a blocking depth the per-node
  // blocking status is included.
  std::string dump(std::optional<unsigned> blocking_depth = std::nullopt) const;
  // Structure-only key used for duplicate suppression.
  std::string structure_key() const { return dump(); }

  // --- mutation (used by the expansion rules) ---
  NodeId add_tree_node(NodeId parent, std::set<Role> edge_roles, std::set<Concept> label);
  void add_to_label(NodeId x, const Concept& c) { nodes_[x].label.insert(c); }
  void union_label(NodeId into, const std::set<Concept>& from);
  void clear_label(NodeId x) { nodes_[x].label.clear(); }
  void union_edge(NodeId from, NodeId to, const std::set<Role>& roles);
  void clear_edge(NodeId from, NodeId to);  // keeps the empty residue entry
  void add_neq(NodeId a, NodeId b);
  // The root-merge of the atmost-root rule: z absorbs y's label and
  // edges, y's tree children are re-hung under z, y retires.
  void merge_root_into(NodeId y, NodeId z);

  // Tree ancestry (parent chains only; the root graph does not count).
  bool is_ancestor(NodeId ancestor, NodeId descendant) const;
  unsigned depth(NodeId x) const;

  // Tree children reachable through a non-empty edge, i.e. the children
  // that belong to n-trees.
  std::vector<NodeId> tree_children(NodeId x) const;

 private:
  explicit CompletionForest(std::shared_ptr<const KnowledgeBase> kb) : kb_(std::move(kb)) {}
  NodeId new_node(ForestNode n);
  std::string n_tree_code(NodeId v, unsigned n, std::map<std::pair<NodeId, unsigned>, std::string>& memo) const;
  void collect_iso(NodeId v, NodeId w, unsigned n, std::map<NodeId, NodeId>& out,
                   std::map<std::pair<NodeId, unsigned>, std::string>& memo) const;

  std::shared_ptr<const KnowledgeBase> kb_;
  std::vector<ForestNode> nodes_;
  std::map<std::pair<NodeId, NodeId>, std::set<Role>> edges_;
  std::set<std::pair<NodeId, NodeId>> neq_;  // normalized a < b
  std::map<NodeId, NodeId> merged_;          // retired root -> survivor
  std::map<std::string, NodeId> roots_;      // individual -> root node
};

// Free-function forms of the forest entry points.
inline CompletionForest init_forest(std::shared_ptr<const KnowledgeBase> kb) {
  return CompletionForest::initial(std::move(kb));
}
inline std::optional<Clash> has_clash(const CompletionForest& f) { return f.clash(); }

// True when some k of the candidates are pairwise related by neq.
bool exists_pairwise_neq_subset(const CompletionForest& f, const std::vector<NodeId>& candidates,
                                std::size_t k);

}  // namespace shiq

#endif  // SHIQ_FOREST_HPP_
