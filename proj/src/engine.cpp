#include "shiq/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace shiq {

const char* rule_name(RuleTag tag) {
  switch (tag) {
    case RuleTag::AtMostRoot: return "atmost-root";
    case RuleTag::And: return "and";
    case RuleTag::Forall: return "forall";
    case RuleTag::ForallPlus: return "forall-plus";
    case RuleTag::Or: return "or";
    case RuleTag::Choose: return "choose";
    case RuleTag::AtMost: return "atmost";
    case RuleTag::Exists: return "exists";
    case RuleTag::AtLeast: return "atleast";
  }
  return "?";
}

std::string ExpandStats::report() const {
  std::ostringstream os;
  os << "forests_explored=" << forests_explored << " ccf_count=" << ccf_count
     << " max_nodes=" << max_nodes << " rule_applications=" << rule_applications
     << " budget_hit=" << (budget_hit ? "true" : "false");
  return os.str();
}

namespace {

std::set<Role> inverted_roles(const std::set<Role>& roles) {
  std::set<Role> out;
  for (const Role& r : roles) out.insert(r.inverse());
  return out;
}

std::vector<NodeId> qualified_neighbours(const CompletionForest& f, NodeId x, const Role& s,
                                         const Concept& filler) {
  std::vector<NodeId> out;
  for (NodeId y : f.s_neighbours(x, s)) {
    if (f.node(y).label.count(filler) > 0) out.push_back(y);
  }
  return out;
}

struct InstanceBuilder {
  const CompletionForest& f;
  const KnowledgeBase& kb;
  unsigned n;
  const std::vector<BlockingStatus>& blocking;
  const std::vector<Role>& roles;
  std::vector<RuleInstance>& out;

  bool indirectly_blocked(NodeId x) const { return blocking[x].kind == BlockKind::Indirectly; }
  bool blocked(NodeId x) const { return blocking[x].blocked(); }

  void emit(RuleInstance inst) {
    inst.depth = n;
    out.push_back(std::move(inst));
  }

  void scan_node(NodeId x) {
    const std::set<Concept>& label = f.node(x).label;
    for (const Concept& c : label) {
      switch (c.kind()) {
        case ConceptKind::And:
          if (!indirectly_blocked(x) &&
              (label.count(c.lhs()) == 0 || label.count(c.rhs()) == 0)) {
            emit({RuleTag::And, x, c});
          }
          break;
        case ConceptKind::Or:
          if (!indirectly_blocked(x) && label.count(c.lhs()) == 0 && label.count(c.rhs()) == 0) {
            RuleInstance inst{RuleTag::Or, x, c};
            inst.label_choices = {c.lhs(), c.rhs()};
            emit(std::move(inst));
          }
          break;
        case ConceptKind::Some: {
          if (blocked(x)) break;
          bool satisfied = false;
          for (NodeId y : f.s_neighbours(x, c.role())) {
            if (f.node(y).label.count(c.child()) > 0) {
              satisfied = true;
              break;
            }
          }
          if (!satisfied) emit({RuleTag::Exists, x, c});
          break;
        }
        case ConceptKind::All: {
          if (indirectly_blocked(x)) break;
          for (NodeId y : f.s_neighbours(x, c.role())) {
            if (f.node(y).label.count(c.child()) == 0) {
              RuleInstance inst{RuleTag::Forall, x, c};
              inst.y = y;
              emit(std::move(inst));
            }
          }
          // Transitive propagation: push (all R.filler) to R-neighbours
          // for every transitive R below the restriction's role.
          for (const Role& r : roles) {
            if (!kb.rbox().is_transitive(r) || !kb.rbox().subrole(r, c.role())) continue;
            const Concept univ = Concept::univ(r, c.child());
            for (NodeId y : f.s_neighbours(x, r)) {
              if (f.node(y).label.count(univ) == 0) {
                RuleInstance inst{RuleTag::ForallPlus, x, c};
                inst.y = y;
                inst.propagated = r;
                emit(std::move(inst));
              }
            }
          }
          break;
        }
        case ConceptKind::AtLeast:
        case ConceptKind::AtMost: {
          if (!indirectly_blocked(x)) {
            // choose-rule: undecided filler membership at an S-neighbour.
            const Concept neg = negate_nnf(c.child());
            for (NodeId y : f.s_neighbours(x, c.role())) {
              const auto& ylab = f.node(y).label;
              if (ylab.count(c.child()) == 0 && ylab.count(neg) == 0) {
                RuleInstance inst{RuleTag::Choose, x, c};
                inst.y = y;
                inst.label_choices = {c.child(), neg};
                emit(std::move(inst));
              }
            }
          }
          if (c.kind() == ConceptKind::AtLeast) {
            if (blocked(x) || c.count() == 0) break;
            std::vector<NodeId> qualified = qualified_neighbours(f, x, c.role(), c.child());
            if (!exists_pairwise_neq_subset(f, qualified, c.count())) {
              emit({RuleTag::AtLeast, x, c});
            }
          } else {
            std::vector<NodeId> qualified = qualified_neighbours(f, x, c.role(), c.child());
            if (qualified.size() <= c.count()) break;
            // Root merges fire regardless of blocking; tree merges skip
            // indirectly blocked focus nodes.
            RuleInstance root_inst{RuleTag::AtMostRoot, x, c};
            RuleInstance tree_inst{RuleTag::AtMost, x, c};
            for (NodeId y : qualified) {
              for (NodeId z : qualified) {
                if (y == z || f.neq(y, z)) continue;
                const bool y_root = f.node(y).kind == NodeKind::Root;
                const bool z_root = f.node(z).kind == NodeKind::Root;
                if (y_root && z_root) {
                  root_inst.merge_pairs.push_back({y, z});
                } else if (!y_root && !f.is_ancestor(y, z) && !indirectly_blocked(x)) {
                  tree_inst.merge_pairs.push_back({y, z});
                }
              }
            }
            if (!root_inst.merge_pairs.empty()) emit(std::move(root_inst));
            if (!tree_inst.merge_pairs.empty()) emit(std::move(tree_inst));
          }
          break;
        }
        case ConceptKind::Atom:
        case ConceptKind::Not:
          break;
      }
    }
  }
};

}  // namespace

std::vector<RuleInstance> applicable_rule_instances(const CompletionForest& f,
                                                    const KnowledgeBase& kb, unsigned n,
                                                    const ExpandOptions& opts) {
  std::vector<RuleInstance> out;
  const std::vector<BlockingStatus> blocking = f.blocking_all(n);
  const std::vector<Role> roles = occurring_roles(kb);
  InstanceBuilder builder{f, kb, n, blocking, roles, out};
  for (NodeId x : f.alive_nodes()) builder.scan_node(x);

  std::array<int, 9> rank{};
  for (int i = 0; i < 9; ++i) rank[static_cast<int>(opts.priority[i])] = i;
  std::stable_sort(out.begin(), out.end(), [&](const RuleInstance& a, const RuleInstance& b) {
    if (rank[static_cast<int>(a.tag)] != rank[static_cast<int>(b.tag)]) {
      return rank[static_cast<int>(a.tag)] < rank[static_cast<int>(b.tag)];
    }
    if (a.x != b.x) return a.x < b.x;
    if (a.trigger != b.trigger) return a.trigger < b.trigger;
    if (a.y != b.y) return a.y < b.y;
    return a.propagated < b.propagated;
  });
  return out;
}

std::vector<CompletionForest> apply_rule(const CompletionForest& f, const RuleInstance& inst,
                                         const KnowledgeBase& kb) {
  // Revalidate against the current forest; merges elsewhere can retire
  // nodes or satisfy guards between instance computation and application.
  const std::vector<RuleInstance> fresh = applicable_rule_instances(f, kb, inst.depth);
  const RuleInstance* match = nullptr;
  for (const RuleInstance& cand : fresh) {
    if (cand.tag == inst.tag && cand.x == inst.x && cand.trigger == inst.trigger &&
        cand.y == inst.y && cand.propagated == inst.propagated) {
      match = &cand;
      break;
    }
  }
  if (!match || match->label_choices != inst.label_choices ||
      match->merge_pairs != inst.merge_pairs) {
    throw StaleRuleError(std::string("stale ") + rule_name(inst.tag) + "-rule instance at node " +
                         std::to_string(inst.x));
  }

  std::vector<CompletionForest> out;
  const Concept& c = inst.trigger;
  switch (inst.tag) {
    case RuleTag::And: {
      CompletionForest g = f;
      g.add_to_label(inst.x, c.lhs());
      g.add_to_label(inst.x, c.rhs());
      out.push_back(std::move(g));
      break;
    }
    case RuleTag::Or:
    case RuleTag::Choose: {
      NodeId target = inst.tag == RuleTag::Or ? inst.x : inst.y;
      for (const Concept& choice : inst.label_choices) {
        CompletionForest g = f;
        g.add_to_label(target, choice);
        out.push_back(std::move(g));
      }
      break;
    }
    case RuleTag::Forall: {
      CompletionForest g = f;
      g.add_to_label(inst.y, c.child());
      out.push_back(std::move(g));
      break;
    }
    case RuleTag::ForallPlus: {
      CompletionForest g = f;
      g.add_to_label(inst.y, Concept::univ(inst.propagated, c.child()));
      out.push_back(std::move(g));
      break;
    }
    case RuleTag::Exists: {
      CompletionForest g = f;
      std::set<Concept> label = global_constraints(kb);
      label.insert(c.child());
      g.add_tree_node(inst.x, {c.role()}, std::move(label));
      out.push_back(std::move(g));
      break;
    }
    case RuleTag::AtLeast: {
      CompletionForest g = f;
      std::set<Concept> label = global_constraints(kb);
      label.insert(c.child());
      std::vector<NodeId> fresh_nodes;
      for (std::uint32_t i = 0; i < c.count(); ++i) {
        fresh_nodes.push_back(g.add_tree_node(inst.x, {c.role()}, label));
      }
      for (std::size_t i = 0; i < fresh_nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < fresh_nodes.size(); ++j) {
          g.add_neq(fresh_nodes[i], fresh_nodes[j]);
        }
      }
      out.push_back(std::move(g));
      break;
    }
    case RuleTag::AtMost: {
      for (const auto& [y, z] : inst.merge_pairs) {
        CompletionForest g = f;
        g.union_label(z, f.node(y).label);
        if (f.is_ancestor(z, inst.x)) {
          g.union_edge(z, inst.x, inverted_roles(f.edge_label(inst.x, y)));
        } else {
          g.union_edge(inst.x, z, f.edge_label(inst.x, y));
        }
        g.clear_edge(inst.x, y);
        for (NodeId u : f.alive_nodes()) {
          if (u != z && f.neq(u, y)) g.add_neq(u, z);
        }
        out.push_back(std::move(g));
      }
      break;
    }
    case RuleTag::AtMostRoot: {
      for (const auto& [y, z] : inst.merge_pairs) {
        CompletionForest g = f;
        g.merge_root_into(y, z);
        out.push_back(std::move(g));
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive expansion

namespace {

struct ExpandDriver {
  const KnowledgeBase& kb;
  unsigned n;
  const Budget& budget;
  const std::function<VisitResult(const CompletionForest&, bool)>& visit;
  const ExpandOptions& opts;
  ExpandStats stats;
  std::unordered_set<std::string> seen;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  bool over_budget(const CompletionForest& f) {
    if (budget.max_forests && stats.forests_explored >= budget.max_forests) return true;
    if (budget.max_nodes && f.node_count() > budget.max_nodes) return true;
    if (budget.timeout_ms) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
      if (ms >= static_cast<long long>(budget.timeout_ms)) return true;
    }
    return false;
  }

  // Processes one forest; fills `successors` with the children still to
  // explore. Returns false to stop the whole expansion.
  bool step(const CompletionForest& f, std::vector<CompletionForest>& successors) {
    successors.clear();
    if (over_budget(f)) {
      stats.budget_hit = true;
      return false;
    }
    ++stats.forests_explored;
    stats.max_nodes = std::max<std::uint64_t>(stats.max_nodes, f.node_count());
    // A clash never goes away: labels only grow, and both merge rules
    // transfer the clashing material onto the surviving node. Branches
    // are therefore cut at first detection.
    if (f.clash()) {
      if (visit(f, false) == VisitResult::Stop) {
        stats.stopped_early = true;
        return false;
      }
      return true;
    }
    const std::vector<RuleInstance> instances = applicable_rule_instances(f, kb, n, opts);
    if (instances.empty()) {
      ++stats.ccf_count;
      if (visit(f, true) == VisitResult::Stop) {
        stats.stopped_early = true;
        return false;
      }
      return true;
    }
    std::vector<CompletionForest> produced = apply_rule(f, instances.front(), kb);
    stats.rule_applications += produced.size();
    for (CompletionForest& g : produced) {
      if (seen.insert(g.structure_key()).second) successors.push_back(std::move(g));
    }
    return true;
  }

  // Depth-first over an explicit stack; branch length is bounded only by
  // the budget, not by the call stack.
  void run(CompletionForest f0) {
    struct Level {
      std::vector<CompletionForest> pending;
      std::size_t next = 0;
    };
    std::vector<Level> stack;
    stack.push_back({{std::move(f0)}, 0});
    while (!stack.empty()) {
      Level& level = stack.back();
      if (level.next == level.pending.size()) {
        stack.pop_back();
        continue;
      }
      const CompletionForest f = std::move(level.pending[level.next++]);
      std::vector<CompletionForest> successors;
      if (!step(f, successors)) return;
      if (!successors.empty()) stack.push_back({std::move(successors), 0});
    }
  }
};

}  // namespace

ExpandStats expand(const KnowledgeBase& kb, unsigned n, const Budget& budget,
                   const std::function<VisitResult(const CompletionForest&, bool)>& visit,
                   const ExpandOptions& opts) {
  if (n < 1) throw std::invalid_argument("expansion requires blocking depth >= 1");
  const std::vector<ValidationIssue> issues = validate_kb(kb);
  if (!issues.empty()) {
    throw std::invalid_argument("refusing unvalidated KB: " + issues.front().message);
  }
  ExpandDriver driver{kb, n, budget, visit, opts};
  CompletionForest f0 = CompletionForest::initial(std::make_shared<const KnowledgeBase>(kb));
  driver.seen.insert(f0.structure_key());
  driver.run(std::move(f0));
  return driver.stats;
}

std::vector<CompletionForest> ccf_forests(const KnowledgeBase& kb, unsigned n, const Budget& budget,
                                          const ExpandOptions& opts, ExpandStats* stats_out) {
  std::vector<CompletionForest> out;
  ExpandStats stats = expand(
      kb, n, budget,
      [&out](const CompletionForest& f, bool clash_free) {
        if (clash_free) out.push_back(f);
        return VisitResult::Continue;
      },
      opts);
  if (stats_out) *stats_out = stats;
  return out;
}

// ---------------------------------------------------------------------------
// Canonical-model materialization

Interpretation materialize_model(const CompletionForest& f, const KnowledgeBase& kb) {
  if (f.clash()) throw BlockedForestError("forest has a clash");
  for (NodeId x : f.alive_nodes()) {
    const ForestNode& node = f.node(x);
    if (node.kind == NodeKind::Tree && f.edge_label(*node.parent, x).empty()) {
      throw BlockedForestError("forest contains a node behind a pruned edge");
    }
  }
  // Saturation without blocking: at a depth exceeding any possible
  // witness gap nothing is directly blocked, so leftover obligations of
  // blocked leaves surface as applicable instances.
  const unsigned no_blocking = static_cast<unsigned>(f.node_count()) + 1;
  if (!applicable_rule_instances(f, kb, no_blocking).empty()) {
    throw BlockedForestError("forest is not saturated without blocking");
  }

  const std::vector<NodeId> domain = f.alive_nodes();
  if (domain.size() > static_cast<std::size_t>(Interpretation::kMaxDomain)) {
    throw OracleError("forest too large to materialize");
  }
  std::map<NodeId, int> index;
  for (std::size_t i = 0; i < domain.size(); ++i) index[domain[i]] = static_cast<int>(i);

  Interpretation interp(static_cast<int>(domain.size()));
  for (const std::string& name : occurring_concept_names(kb)) interp.set_concept(name, 0);
  for (NodeId x : domain) {
    for (const Concept& c : f.node(x).label) {
      if (c.kind() == ConceptKind::Atom) interp.add_to_concept(c.atom_name(), index[x]);
    }
  }

  // valclos: hierarchy-closed base pairs, transitively closed for
  // transitive roles, sub-role closures folded into their super-roles.
  const std::vector<Role> roles = occurring_roles(kb);
  std::map<Role, std::set<std::pair<int, int>>> base;
  for (const Role& r : roles) base[r];
  for (const auto& [from, to] : f.edges()) {
    if (!f.alive(from) || !f.alive(to)) continue;
    for (const Role& r : f.edge_label(from, to)) {
      base[r].insert({index[from], index[to]});
      base[r.inverse()].insert({index[to], index[from]});
    }
  }
  std::map<Role, std::set<std::pair<int, int>>> ext;
  auto compute = [&](auto&& self, const Role& r) -> const std::set<std::pair<int, int>>& {
    auto it = ext.find(r);
    if (it != ext.end()) return it->second;
    std::set<std::pair<int, int>> pairs;
    for (const Role& s : roles) {
      if (kb.rbox().subrole(s, r)) {
        const auto& b = base[s];
        pairs.insert(b.begin(), b.end());
      }
    }
    if (kb.rbox().is_transitive(r)) {
      bool changed = true;
      while (changed) {
        changed = false;
        std::vector<std::pair<int, int>> add;
        for (const auto& [a, b] : pairs) {
          for (const auto& [c, d] : pairs) {
            if (b == c && pairs.count({a, d}) == 0) add.push_back({a, d});
          }
        }
        for (const auto& p : add) {
          pairs.insert(p);
          changed = true;
        }
      }
    } else {
      for (const Role& s : roles) {
        if (s != r && kb.rbox().subrole(s, r)) {
          const auto& sub = self(self, s);
          pairs.insert(sub.begin(), sub.end());
        }
      }
    }
    return ext.emplace(r, std::move(pairs)).first->second;
  };
  for (const Role& r : roles) {
    if (r.inverted) continue;
    interp.clear_role(r.name);
    for (const auto& [a, b] : compute(compute, r)) interp.add_to_role(r.name, a, b);
  }

  for (const std::string& ind : kb.individuals()) {
    NodeId root = f.resolve(*f.root_of(ind));
    interp.map_individual(ind, index.at(root));
  }
  return interp;
}

}  // namespace shiq
