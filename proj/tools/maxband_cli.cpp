#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maxband/bench.hpp"
#include "maxband/bnb.hpp"
#include "maxband/mps.hpp"
#include "maxband/tabu.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitBudget = 3;

maxband::HeuristicConfig::Variant parse_variant(const std::string& s) {
  if (s == "lsf") return maxband::HeuristicConfig::Variant::LSF;
  if (s == "lsu") return maxband::HeuristicConfig::Variant::LSU;
  if (s == "lsvns") return maxband::HeuristicConfig::Variant::LSVNS;
  throw CLI::ValidationError("variant must be lsf, lsu or lsvns");
}

void write_text(const std::string& text, const std::string& path) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string solution_json(const maxband::MilpModel& model,
                          const maxband::Solution& sol) {
  std::string out = "{\n  \"status\": ";
  switch (sol.status) {
    case maxband::SolStatus::Optimal: out += "\"optimal\""; break;
    case maxband::SolStatus::Feasible: out += "\"feasible\""; break;
    case maxband::SolStatus::Infeasible: out += "\"infeasible\""; break;
    case maxband::SolStatus::LimitReached: out += "\"limit-reached\""; break;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", sol.objective);
  out += ",\n  \"objective\": " + std::string(buf);
  std::snprintf(buf, sizeof(buf), "%lld", sol.stats.nodes);
  out += ",\n  \"nodes\": " + std::string(buf);
  std::snprintf(buf, sizeof(buf), "%.3f", sol.stats.wall_seconds);
  out += ",\n  \"wall_s\": " + std::string(buf);
  out += ",\n  \"assignment\": {";
  bool first = true;
  for (int v = 0; v < model.var_count(); ++v) {
    if (sol.x.empty()) break;
    std::snprintf(buf, sizeof(buf), "%.17g", sol.x[v]);
    out += std::string(first ? "" : ",") + "\n    \"" + model.vars[v].name +
           "\": " + buf;
    first = false;
  }
  out += "\n  }\n}\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAXBAND bandwidth-maximization toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random grid instance");
  int g_rows = 3, g_cols = 3;
  std::uint64_t g_seed = 1;
  std::string g_out = "-";
  gen->add_option("--rows", g_rows, "Grid rows")->required();
  gen->add_option("--cols", g_cols, "Grid cols")->required();
  gen->add_option("--seed", g_seed, "Generator seed")->required();
  gen->add_option("--out", g_out, "Output file (- for stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "Run the tabu-search heuristic");
  std::string s_instance, s_variant = "lsvns", s_out, s_trace;
  int s_iter = 30, s_sl = 10, s_tt = 3, s_ils = 10, s_rm = 4, s_rd = 4,
      s_rc = 4;
  std::uint64_t s_seed = 1;
  bool s_no_tighten = false;
  double s_cand_budget = 10.0, s_ls_budget = 30.0, s_ff_budget = 1e30;
  long long s_cand_nodes = 0, s_ls_nodes = 0;
  solve->add_option("--instance", s_instance, "Instance JSON")->required();
  solve->add_option("--variant", s_variant, "lsf, lsu or lsvns");
  solve->add_option("--iter", s_iter, "Tabu iterations");
  solve->add_option("--sl", s_sl, "Candidate list size");
  solve->add_option("--maxtt", s_tt, "Tabu tenure");
  solve->add_option("--ils", s_ils, "Local-search rounds");
  solve->add_option("--rm", s_rm, "m picks per move");
  solve->add_option("--rd", s_rd, "Pattern-bit picks per move");
  solve->add_option("--rc", s_rc, "C picks per move");
  solve->add_option("--seed", s_seed, "Run seed");
  solve->add_flag("--no-tighten", s_no_tighten,
                  "Skip the integer bound tightening");
  solve->add_option("--candidate-budget", s_cand_budget,
                    "Seconds per candidate sub-solve");
  solve->add_option("--ls-budget", s_ls_budget, "Seconds per unfix round");
  solve->add_option("--first-feasible-budget", s_ff_budget,
                    "Seconds for the initial feasibility dive");
  solve->add_option("--candidate-nodes", s_cand_nodes,
                    "Node budget per candidate sub-solve (0 = unlimited)");
  solve->add_option("--ls-nodes", s_ls_nodes,
                    "Node budget per unfix round (0 = unlimited)");
  solve->add_option("--out", s_out, "Solution JSON output");
  solve->add_option("--trace", s_trace, "Iteration trace (JSON lines)");

  // exact
  auto* exact = app.add_subcommand("exact", "Exact branch and bound");
  std::string e_instance, e_out;
  double e_limit = 10800.0;
  bool e_no_tighten = false;
  exact->add_option("--instance", e_instance, "Instance JSON")->required();
  exact->add_option("--time-limit", e_limit, "Wall seconds");
  exact->add_flag("--no-tighten", e_no_tighten,
                  "Skip the integer bound tightening");
  exact->add_option("--out", e_out, "Solution JSON output");

  // bench
  auto* bench = app.add_subcommand("bench", "Run an experiment matrix");
  std::string b_spec, b_out = "results.csv", b_raw, b_json;
  bench->add_option("--spec", b_spec, "Experiment spec JSON")->required();
  bench->add_option("--out", b_out, "Summary CSV path");
  bench->add_option("--raw", b_raw, "Raw per-run points CSV path");
  bench->add_option("--json", b_json, "Full result JSON path");

  // dump-basis
  auto* dump = app.add_subcommand("dump-basis",
                                  "Write the fundamental cycle basis as JSON");
  int d_rows = 3, d_cols = 3;
  std::string d_out = "-";
  dump->add_option("--rows", d_rows, "Grid rows")->required();
  dump->add_option("--cols", d_cols, "Grid cols")->required();
  dump->add_option("--out", d_out, "Output file (- for stdout)");

  // export-mps
  auto* mps = app.add_subcommand("export-mps",
                                 "Write the MILP in free MPS format");
  std::string m_instance, m_out = "-";
  bool m_no_tighten = false;
  mps->add_option("--instance", m_instance, "Instance JSON")->required();
  mps->add_flag("--no-tighten", m_no_tighten,
                "Skip the integer bound tightening");
  mps->add_option("--out", m_out, "Output file (- for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto net = maxband::build_grid(g_rows, g_cols);
      const auto inst = maxband::generate_instance(net, g_seed);
      write_text(maxband::instance_to_json(inst) + "\n", g_out);
      return kExitOk;
    }

    if (*dump) {
      const auto net = maxband::build_grid(d_rows, d_cols);
      const auto basis = maxband::fundamental_cycle_basis(net);
      write_text(maxband::basis_to_json(net, basis) + "\n", d_out);
      return kExitOk;
    }

    if (*mps) {
      const auto inst = maxband::read_instance(m_instance);
      const auto basis = maxband::fundamental_cycle_basis(inst.net);
      const auto model = maxband::build_model(inst, basis, !m_no_tighten);
      write_text(maxband::model_to_mps(model, "maxband"), m_out);
      return kExitOk;
    }

    if (*exact) {
      const auto inst = maxband::read_instance(e_instance);
      const auto basis = maxband::fundamental_cycle_basis(inst.net);
      const auto model = maxband::build_model(inst, basis, !e_no_tighten);
      maxband::SolveLimits lim;
      lim.wall_seconds = e_limit;
      const auto sol = maxband::branch_and_bound(model, lim);
      const std::string text = solution_json(model, sol);
      if (!e_out.empty()) write_text(text, e_out);
      std::printf("status=%s objective=%.6f nodes=%lld time=%.1fs\n",
                  sol.status == maxband::SolStatus::Optimal ? "optimal"
                  : sol.has_solution()                      ? "feasible"
                  : sol.status == maxband::SolStatus::Infeasible
                      ? "infeasible"
                      : "limit-reached",
                  sol.objective, sol.stats.nodes, sol.stats.wall_seconds);
      if (sol.status == maxband::SolStatus::Infeasible) return kExitInfeasible;
      if (!sol.has_solution()) return kExitBudget;
      return kExitOk;
    }

    if (*solve) {
      const auto inst = maxband::read_instance(s_instance);
      const auto basis = maxband::fundamental_cycle_basis(inst.net);
      const auto model = maxband::build_model(inst, basis, !s_no_tighten);
      maxband::HeuristicConfig cfg;
      cfg.iterations = s_iter;
      cfg.size_list = s_sl;
      cfg.max_tenure = s_tt;
      cfg.ls_iterations = s_ils;
      cfg.rm = s_rm;
      cfg.rd = s_rd;
      cfg.rc = s_rc;
      cfg.variant = parse_variant(s_variant);
      cfg.seed = s_seed;
      cfg.candidate_limits.wall_seconds = s_cand_budget;
      cfg.ls_limits.wall_seconds = s_ls_budget;
      cfg.first_feasible_limits.wall_seconds = s_ff_budget;
      if (s_cand_nodes > 0) cfg.candidate_limits.node_budget = s_cand_nodes;
      if (s_ls_nodes > 0) cfg.ls_limits.node_budget = s_ls_nodes;

      const auto res = maxband::tsilp(model, cfg);
      if (!s_trace.empty())
        write_text(maxband::trace_to_jsonl(res.trace), s_trace);
      if (!s_out.empty()) write_text(solution_json(model, res.best), s_out);
      std::printf("status=%s objective=%.6f time=%.1fs\n",
                  res.best.status == maxband::SolStatus::Optimal ? "optimal"
                  : res.best.has_solution()                      ? "feasible"
                  : res.status == maxband::SolStatus::Infeasible
                      ? "infeasible"
                      : "limit-reached",
                  res.best.objective, res.best.stats.wall_seconds);
      if (res.status == maxband::SolStatus::Infeasible) return kExitInfeasible;
      if (!res.best.has_solution()) return kExitBudget;
      return kExitOk;
    }

    if (*bench) {
      const auto spec = maxband::read_spec(b_spec);
      const auto results = maxband::run_experiments(spec);
      maxband::emit_csv(results, b_out);
      if (!b_raw.empty()) maxband::emit_raw_csv(results, b_raw);
      if (!b_json.empty()) maxband::emit_json(results, b_json);
      std::printf("wrote %zu result rows to %s\n", results.rows.size(),
                  b_out.c_str());
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
