#include "shiq/entail.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace shiq {

std::uint64_t labelling_bound(std::size_t conccard, std::size_t rolecard) {
  const std::size_t exponent = 2 * conccard + rolecard;
  if (exponent >= 64) return std::numeric_limits<std::uint64_t>::max();
  return 1ull << exponent;
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

}  // namespace

BlockingParams blocking_depth(const KnowledgeBase& kb, const Query& q,
                              std::optional<std::uint64_t> override_depth) {
  BlockingParams params;
  const std::uint64_t n_q = q.literal_count();
  bool has_transitive = false;
  for (const Role& r : occurring_roles(kb)) {
    if (kb.rbox().is_transitive(r)) {
      has_transitive = true;
      break;
    }
  }
  if (!has_transitive) {
    params.derivation = BlockingParams::Derivation::LiteralCount;
    params.bound = std::max<std::uint64_t>(1, n_q);
  } else {
    const KbMetrics m = metrics(kb);
    params.derivation = BlockingParams::Derivation::LabellingBound;
    params.bound = std::max<std::uint64_t>(
        1, saturating_mul(labelling_bound(m.conccard, m.rolecard), n_q));
  }
  params.depth = params.bound;
  params.complete = true;
  if (override_depth) {
    params.depth = std::max<std::uint64_t>(1, *override_depth);
    params.complete = params.depth >= params.bound;
    if (!params.complete) params.derivation = BlockingParams::Derivation::Override;
  }
  return params;
}

// ---------------------------------------------------------------------------
// Homomorphism search

namespace {

struct MappingSearch {
  const CompletionForest& f;
  const Query& q;
  std::map<std::string, NodeId> assignment;  // variables and constants

  NodeId value(const QueryTerm& t) const { return assignment.at(t.name); }
  bool bound(const QueryTerm& t) const { return assignment.count(t.name) > 0; }

  bool atoms_consistent() const {
    for (const QueryAtom& a : q.atoms()) {
      if (!bound(a.t0)) continue;
      if (a.kind == QueryAtom::Kind::Concept) {
        if (f.node(value(a.t0)).label.count(Concept::atom(a.pred)) == 0) return false;
      } else {
        if (!bound(a.t1)) continue;
        if (!f.r_connected(value(a.t0), value(a.t1), Role{a.pred, false})) return false;
      }
    }
    return true;
  }

  bool search(const std::vector<std::pair<std::string, std::vector<NodeId>>>& vars,
              std::size_t next) {
    if (!atoms_consistent()) return false;
    if (next == vars.size()) return true;
    for (NodeId cand : vars[next].second) {
      assignment[vars[next].first] = cand;
      if (search(vars, next + 1)) return true;
    }
    assignment.erase(vars[next].first);
    return false;
  }
};

}  // namespace

std::optional<std::map<std::string, NodeId>> maps_into(const CompletionForest& f, const Query& q,
                                                       const KnowledgeBase& kb) {
  (void)kb;
  MappingSearch search{f, q, {}};
  for (const std::string& c : q.constants()) {
    std::optional<NodeId> root = f.root_of(c);
    if (!root) throw std::invalid_argument("query constant " + c + " is not a forest root");
    search.assignment[c] = f.resolve(*root);
  }
  // Candidates per variable: alive nodes whose labels contain every
  // concept atom of the variable. Most constrained variable first.
  const std::vector<NodeId> alive = f.alive_nodes();
  std::vector<std::pair<std::string, std::vector<NodeId>>> vars;
  for (const std::string& v : q.variables()) {
    std::vector<NodeId> candidates;
    for (NodeId node : alive) {
      bool ok = true;
      for (const QueryAtom& a : q.atoms()) {
        if (a.kind == QueryAtom::Kind::Concept && a.t0.is_var && a.t0.name == v &&
            f.node(node).label.count(Concept::atom(a.pred)) == 0) {
          ok = false;
          break;
        }
      }
      if (ok) candidates.push_back(node);
    }
    vars.push_back({v, std::move(candidates)});
  }
  std::stable_sort(vars.begin(), vars.end(),
                   [](const auto& a, const auto& b) { return a.second.size() < b.second.size(); });
  if (!search.search(vars, 0)) return std::nullopt;
  std::map<std::string, NodeId> out;
  for (const std::string& v : q.variables()) out[v] = search.assignment.at(v);
  return out;
}

// ---------------------------------------------------------------------------
// Entailment

std::string EntailmentVerdict::report_line() const {
  std::ostringstream os;
  const char* verdict = entailed() ? "entailed" : "not_entailed";
  os << "verdict=" << verdict << " blocking=" << blocking.depth
     << " complete=" << (blocking.complete ? "true" : "false") << " forests=" << stats.ccf_count;
  return os.str();
}

EntailmentVerdict entails(const KnowledgeBase& kb, const Query& q, const EntailOptions& opts) {
  {
    const std::vector<ValidationIssue> kb_issues = validate_kb(kb);
    if (!kb_issues.empty()) {
      throw std::invalid_argument("refusing unvalidated KB: " + kb_issues.front().message);
    }
    const std::vector<std::string> q_issues = validate_query(kb, q);
    if (!q_issues.empty()) {
      throw std::invalid_argument("invalid query: " + q_issues.front());
    }
  }
  EntailmentVerdict verdict;
  verdict.blocking = blocking_depth(kb, q, opts.depth_override);
  if (verdict.blocking.depth > std::numeric_limits<unsigned>::max()) {
    throw std::invalid_argument(
        "blocking depth " + std::to_string(verdict.blocking.depth) +
        " is impractically large; rerun with a depth override (the verdict will be marked "
        "incomplete)");
  }
  const unsigned depth = static_cast<unsigned>(verdict.blocking.depth);

  bool found_witness = false;
  verdict.stats = expand(kb, depth, opts.budget, [&](const CompletionForest& f, bool clash_free) {
    if (!clash_free) return VisitResult::Continue;
    std::optional<std::map<std::string, NodeId>> mapping = maps_into(f, q, kb);
    if (mapping) {
      verdict.last_mapping = std::move(mapping);
      return VisitResult::Continue;
    }
    found_witness = true;
    verdict.witness = f;
    return VisitResult::Stop;
  }, opts.expand);

  if (found_witness) {
    verdict.conclusion = verdict.blocking.complete ? Conclusion::NotEntailed
                                                   : Conclusion::NoMappingAtDepth;
    if (!verdict.blocking.complete) verdict.note = "no_mapping_at_depth";
    try {
      Interpretation model = materialize_model(*verdict.witness, kb);
      // A materialized countermodel must refute the query; anything else
      // means the witness is unusable and the verdict keeps only the
      // forest.
      if (is_model_kb(model, kb) && !satisfies_query(model, q)) {
        verdict.countermodel = std::move(model);
      } else {
        verdict.note = "witness_materialization_inconsistent";
      }
    } catch (const BlockedForestError&) {
      // Blocked witness: the finite canonical model does not apply.
    } catch (const OracleError&) {
      verdict.note = "witness_too_large_to_materialize";
    }
    return verdict;
  }

  if (verdict.stats.budget_hit) throw BudgetExceededError(verdict.stats);
  if (verdict.stats.ccf_count == 0) {
    verdict.conclusion = Conclusion::EntailedVacuously;
    verdict.note = "unsatisfiable_kb";
  } else {
    // Every complete clash-free forest admits a mapping; that is sound at
    // any blocking depth.
    verdict.conclusion = Conclusion::Entailed;
  }
  return verdict;
}

}  // namespace shiq
