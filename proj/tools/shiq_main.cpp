// Command-line front end: satisfiability, conjunctive-query entailment,
// brute-force countermodel search, forest dumps and KB validation.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "shiq/engine.hpp"
#include "shiq/entail.hpp"
#include "shiq/oracle.hpp"
#include "shiq/syntax.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommonArgs {
  std::string kb_path;
  std::string query_path;
  std::optional<std::uint64_t> blocking_depth;
  std::uint64_t max_forests = 1000000;
  std::uint64_t max_nodes = 100000;
  std::uint64_t timeout_ms = 120000;
  int oracle_domain = 3;
  bool verbose = false;

  shiq::Budget budget() const { return {max_forests, max_nodes, timeout_ms}; }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_query) {
  cmd->add_option("--kb", args.kb_path, "knowledge base file (.shiq)")->required();
  if (with_query) {
    cmd->add_option("--query", args.query_path, "conjunctive query file (.cq)")->required();
  }
  cmd->add_option("--blocking-depth", args.blocking_depth, "override the blocking depth");
  cmd->add_option("--max-forests", args.max_forests, "exploration ceiling on forests");
  cmd->add_option("--max-nodes", args.max_nodes, "ceiling on nodes per forest");
  cmd->add_option("--timeout-ms", args.timeout_ms, "wall-clock ceiling in milliseconds");
  cmd->add_option("--oracle-domain", args.oracle_domain, "max domain size for oracle search");
  cmd->add_flag("--verbose", args.verbose, "extra diagnostics");
}

int run_validate(const CommonArgs& args) {
  shiq::KnowledgeBase kb = shiq::parse_kb(read_file(args.kb_path), /*validate=*/false);
  const auto issues = shiq::validate_kb(kb);
  for (const auto& issue : issues) std::cout << "violation: " << issue.message << "\n";
  if (issues.empty()) std::cout << "valid=true\n";
  return issues.empty() ? 0 : 1;
}

int run_sat(const CommonArgs& args) {
  shiq::KnowledgeBase kb = shiq::parse_kb(read_file(args.kb_path));
  const unsigned depth = static_cast<unsigned>(args.blocking_depth.value_or(1));
  bool found = false;
  shiq::ExpandStats stats =
      shiq::expand(kb, depth, args.budget(), [&](const shiq::CompletionForest& f, bool clash_free) {
        if (clash_free) {
          found = true;
          if (args.verbose) std::cout << f.dump(depth);
          return shiq::VisitResult::Stop;
        }
        return shiq::VisitResult::Continue;
      });
  std::cout << stats.report() << "\n";
  if (found) {
    std::cout << "sat=true\n";
    return 0;
  }
  if (stats.budget_hit) {
    std::cerr << "no verdict: exploration incomplete\n";
    return 2;
  }
  std::cout << "sat=false\n";
  return 1;
}

int run_entail(const CommonArgs& args) {
  shiq::KnowledgeBase kb = shiq::parse_kb(read_file(args.kb_path));
  shiq::Query q = shiq::parse_query(read_file(args.query_path), &kb);
  shiq::EntailOptions opts;
  opts.depth_override = args.blocking_depth;
  opts.budget = args.budget();
  try {
    shiq::EntailmentVerdict verdict = shiq::entails(kb, q, opts);
    if (!verdict.blocking.complete) {
      std::cerr << "warning: blocking depth " << verdict.blocking.depth
                << " is below the sufficient bound " << verdict.blocking.bound
                << "; the run is incomplete\n";
    }
    std::cout << verdict.report_line() << "\n";
    if (!verdict.note.empty()) std::cout << "note=" << verdict.note << "\n";
    if (args.verbose) std::cout << verdict.stats.report() << "\n";
    if (verdict.witness) {
      std::cout << "witness\n" << verdict.witness->dump(
          static_cast<unsigned>(verdict.blocking.depth));
      if (verdict.countermodel) {
        std::cout << "countermodel\n" << verdict.countermodel->render();
      }
    }
    switch (verdict.conclusion) {
      case shiq::Conclusion::Entailed:
      case shiq::Conclusion::EntailedVacuously:
        return 0;
      case shiq::Conclusion::NotEntailed:
        return 1;
      case shiq::Conclusion::NoMappingAtDepth:
        return 2;
    }
    return 2;
  } catch (const shiq::BudgetExceededError& e) {
    std::cout << e.stats.report() << "\n";
    std::cerr << "no verdict: " << e.what() << "\n";
    return 2;
  }
}

int run_countermodel(const CommonArgs& args) {
  shiq::KnowledgeBase kb = shiq::parse_kb(read_file(args.kb_path));
  shiq::Query q = shiq::parse_query(read_file(args.query_path), &kb);
  const auto issues = shiq::validate_query(kb, q);
  if (!issues.empty()) throw std::runtime_error("invalid query: " + issues.front());
  auto found = shiq::countermodel_search(kb, q, args.oracle_domain);
  if (found) {
    std::cout << found->render();
    return 0;
  }
  std::cout << "countermodel=none max_domain=" << args.oracle_domain << "\n";
  return 1;
}

int run_dump_forest(const CommonArgs& args, std::uint64_t count) {
  shiq::KnowledgeBase kb = shiq::parse_kb(read_file(args.kb_path));
  const unsigned depth = static_cast<unsigned>(args.blocking_depth.value_or(1));
  std::uint64_t printed = 0;
  shiq::Budget budget = args.budget();
  budget.max_forests = 0;  // the print cap drives termination here
  shiq::expand(kb, depth, budget, [&](const shiq::CompletionForest& f, bool clash_free) {
    if (!clash_free && !args.verbose) return shiq::VisitResult::Continue;
    std::cout << "forest " << printed << " clash_free=" << (clash_free ? "true" : "false") << "\n"
              << f.dump(depth);
    ++printed;
    return printed >= count ? shiq::VisitResult::Stop : shiq::VisitResult::Continue;
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SHIQ completion-forest reasoner"};
  app.require_subcommand(1);

  CommonArgs args;

  CLI::App* sat = app.add_subcommand("sat", "decide knowledge-base satisfiability");
  add_common(sat, args, false);
  CLI::App* entail = app.add_subcommand("entail", "decide conjunctive-query entailment");
  add_common(entail, args, true);
  CLI::App* cm = app.add_subcommand("countermodel", "search small countermodels exhaustively");
  add_common(cm, args, true);
  CLI::App* dump = app.add_subcommand("dump-forest", "print complete completion forests");
  add_common(dump, args, false);
  CLI::App* validate = app.add_subcommand("validate", "check knowledge-base well-formedness");
  validate->add_option("--kb", args.kb_path, "knowledge base file (.shiq)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sat->parsed()) return run_sat(args);
    if (entail->parsed()) return run_entail(args);
    if (cm->parsed()) return run_countermodel(args);
    if (dump->parsed()) {
      // For this command --max-forests is the print cap, defaulting to 1.
      const bool capped = dump->count("--max-forests") > 0;
      return run_dump_forest(args, capped ? args.max_forests : 1);
    }
    if (validate->parsed()) return run_validate(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
