#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maxband/tabu.hpp"

namespace maxband {

// Seeded experiment matrix: (grid size x instance) cells crossed with
// heuristic configurations and variants, each repeated with distinct run
// seeds; optionally an exact branch-and-bound reference per instance.
struct ExperimentSpec {
  struct GridSize {
    int rows = 0, cols = 0;
  };
  struct ConfigRow {
    int iter = 10, sl = 5, tt = 3, ils = 5, rm = 2, rd = 2, rc = 2;
  };

  std::vector<GridSize> sizes;
  int instances_per_size = 1;
  std::uint64_t instance_seed_base = 1;
  int repetitions = 10;
  std::uint64_t run_seed_base = 1000;
  std::vector<ConfigRow> configs;
  std::vector<HeuristicConfig::Variant> variants;
  bool tighten = true;
  bool exact = false;
  double exact_time_cap_seconds = 10800.0;
  // Sub-solve budgets applied to every run (node budgets keep runs
  // deterministic; wall budgets are a safety net).
  SolveLimits first_feasible_limits;
  SolveLimits candidate_limits;
  SolveLimits ls_limits;
};

struct RunPoint {
  int repetition = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double wall_seconds = 0.0;
  bool ok = false;
};

struct ResultRow {
  int rows = 0, cols = 0;
  int instance_id = 0;
  std::uint64_t instance_seed = 0;
  std::string variant;
  ExperimentSpec::ConfigRow config;
  int runs_ok = 0;
  double avg = 0.0, worst = 0.0, best = 0.0;
  double avg_time_seconds = 0.0;
  double build_seconds = 0.0;  // model assembly, excluded from run times
  std::optional<double> exact_objective;
  std::optional<double> exact_seconds;
  std::string note;  // per-cell failure text, never aborts the matrix
  std::vector<RunPoint> points;
};

struct ResultSet {
  std::vector<ResultRow> rows;
};

ExperimentSpec read_spec(const std::filesystem::path& path);
ExperimentSpec spec_from_json(const std::string& text);

ResultSet run_experiments(const ExperimentSpec& spec);

// results.csv: one summary line per cell, fixed column order (see README);
// raw points appended per run for box plots. Timing columns are the only
// fields that vary between identically seeded runs.
std::string results_to_csv(const ResultSet& results);
std::string raw_points_to_csv(const ResultSet& results);
std::string results_to_json(const ResultSet& results);
ResultSet results_from_json(const std::string& text);

void emit_csv(const ResultSet& results, const std::filesystem::path& path);
void emit_raw_csv(const ResultSet& results, const std::filesystem::path& path);
void emit_json(const ResultSet& results, const std::filesystem::path& path);

std::string trace_to_jsonl(const std::vector<IterationRecord>& trace);

}  // namespace maxband
