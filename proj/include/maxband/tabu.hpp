#pragma once

#include <cstdint>
#include <vector>

#include "maxband/bnb.hpp"
#include "maxband/rng.hpp"

namespace maxband {

struct HeuristicConfig {
  enum class Variant { LSF, LSU, LSVNS };

  int iterations = 10;     // outer tabu iterations
  int size_list = 5;       // candidate list size
  int max_tenure = 3;      // iterations a modified variable stays frozen
  int ls_iterations = 5;   // local-search rounds per outer iteration
  int rm = 2, rd = 2, rc = 2;  // m / pattern-bit / C picks per move
  Variant variant = Variant::LSVNS;
  std::uint64_t seed = 0;

  SolveLimits first_feasible_limits;  // full-model search for the start point
  SolveLimits candidate_limits;       // per-candidate sub-solve
  SolveLimits ls_limits;              // per unfix round in local search

  HeuristicConfig() {
    first_feasible_limits.stop_at_first_feasible = true;
    candidate_limits.wall_seconds = 10.0;
    ls_limits.wall_seconds = 30.0;
  }
};

// Remaining freeze time per integer variable, aligned with
// model.integer_vars. A variable with positive tenure is never selected.
struct TabuState {
  std::vector<int> tenure;
};

struct Candidate {
  Solution sol;
  std::vector<int> selected;  // positions into model.integer_vars
  int index = 0;              // creation order, the deterministic tie-break
};

struct LocalSearchResult {
  Solution best;
  // Every selection drawn (for the tenure audit) and the union of selections
  // belonging to accepted rounds.
  std::vector<std::vector<int>> selections;
  std::vector<int> accepted_modified;
};

struct IterationRecord {
  int iteration = 0;
  double current_objective = 0.0;
  double best_objective = 0.0;
  double wall_seconds = 0.0;
  int candidates_kept = 0;
  std::vector<std::vector<int>> selections;  // all draws this iteration
  std::vector<int> modified;  // positions refreshed to max_tenure at the end
};

struct TsilpResult {
  Solution best;
  std::vector<IterationRecord> trace;
  SolStatus status = SolStatus::Infeasible;
};

// First incumbent of a depth-first dive on the full model.
Solution first_feasible(const MilpModel& model, LpSolver& lp,
                        const SolveLimits& limits);

// One tabu iteration's candidate list: size_list sub-solves, each unfixing a
// random non-tabu pick of rm/rd/rc integers while the rest stay fixed at the
// current solution. Infeasible sub-solves are dropped. Sorted best first,
// ties by creation index.
std::vector<Candidate> make_candidates(const MilpModel& model, LpSolver& lp,
                                       const Solution& current,
                                       const TabuState& tabu,
                                       const HeuristicConfig& cfg,
                                       SplitMix64& rng);

// ls_iterations rounds of the configured variant starting from `start`.
// LSF fixes a fresh pick to random values inside the integer boxes and
// LP-solves; LSU unfixes a pick and runs branch and bound with the current
// objective as cutoff; LSVNS chains LSF then LSU per round. A round's result
// replaces the current point only when strictly better (1e-9).
LocalSearchResult local_search(const MilpModel& model, LpSolver& lp,
                               const Solution& start, const TabuState& tabu,
                               const HeuristicConfig& cfg, SplitMix64& rng);

// The full tabu search: first feasible start, then per iteration a candidate
// list, local search on its best entry, current := candidate-list best, and
// tenure refresh on the variables modified this iteration (positive tenures
// decay by one). The global best is tracked separately from the current
// point. Deterministic for a given seed as long as no wall-clock budget
// truncates a sub-solve.
TsilpResult tsilp(const MilpModel& model, const HeuristicConfig& cfg);

}  // namespace maxband
