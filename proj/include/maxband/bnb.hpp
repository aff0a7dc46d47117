#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxband/lp.hpp"
#include "maxband/model.hpp"

namespace maxband {

struct SolveLimits {
  double wall_seconds = std::numeric_limits<double>::infinity();
  long long node_budget = std::numeric_limits<long long>::max();
  // Prune any node whose relaxation bound cannot beat this value.
  double objective_cutoff = -std::numeric_limits<double>::infinity();
  bool stop_at_first_feasible = false;
};

enum class SolStatus { Optimal, Feasible, Infeasible, LimitReached };

struct SolveStats {
  long long nodes = 0;
  long long lp_iterations = 0;
  double wall_seconds = 0.0;
};

struct Solution {
  SolStatus status = SolStatus::Infeasible;
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
  SolveStats stats;

  bool has_solution() const {
    return status == SolStatus::Optimal || status == SolStatus::Feasible;
  }
};

// Depth-first branch and bound on the most-fractional integer (ties to the
// smallest id), diving toward the nearer integer first, with a jump to the
// best-bound open node every 1000 processed nodes. Without limits the result
// is optimal within an absolute gap of 1e-6. Deterministic: the node
// sequence depends only on the model and bounds, never on timing (wall-clock
// budgets can truncate the run, node budgets cannot change its order).
Solution branch_and_bound(const MilpModel& model, const SolveLimits& limits = {});

// Same search, run against an existing solver whose bounds encode extra
// fixings; the solver's current bounds are the search root and are restored
// before returning. Used by the heuristic's sub-solves.
Solution branch_and_bound(const MilpModel& model, LpSolver& lp,
                          const SolveLimits& limits);

struct OracleRefused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration of every integer assignment in the BoundTable boxes
// ({0,1} for the pattern bits), one LP per assignment. Integer variables that
// appear in no row and have no objective weight are pinned to a single value
// instead of enumerated. Refuses (OracleRefused) when the box product
// exceeds 1e7. Test-only oracle.
Solution brute_force_oracle(const MilpModel& model);

}  // namespace maxband
