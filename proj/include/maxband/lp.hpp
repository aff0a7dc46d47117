#pragma once

#include <cstdint>
#include <vector>

#include "maxband/model.hpp"

namespace maxband {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
  LpStatus status = LpStatus::IterLimit;
  // Objective in the model's maximization sense.
  double objective = 0.0;
  std::vector<double> x;  // structural variables
  long long iterations = 0;
};

// Bounded-variable revised simplex over a fixed constraint matrix. Variable
// bounds may be edited between solves (fixing, branching); the basis is kept
// warm across calls. Feasibility tolerance 1e-8, reduced-cost tolerance
// 1e-9. Devex pricing with a Bland fallback after a degeneracy stall, and a
// piecewise-linear phase-1 ratio test so one pivot can repair many violated
// basics. All ties break on the smallest column index, so runs are
// deterministic.
class LpSolver {
 public:
  explicit LpSolver(const MilpModel& model);

  void set_bounds(int var, double lo, double hi);
  void restore_bounds(int var);
  double lower(int var) const { return lb_[var]; }
  double upper(int var) const { return ub_[var]; }

  LpResult solve(long long max_iterations = 2000000);

  // Basis snapshot (not bounds). Restoring one replays a settled basis so a
  // family of sub-solves sharing a reference point warm-starts cleanly.
  struct State {
    std::vector<int> basis;
    std::vector<std::uint8_t> vstat;
    std::vector<double> xval, binv, devex;
  };
  State save_state() const;
  void restore_state(const State& state);

  long long total_iterations() const { return total_iterations_; }

 private:
  enum class VStat : std::uint8_t { Basic, AtLower, AtUpper, Free };

  int nrows_ = 0, nstruct_ = 0, ntotal_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> cost_;  // minimization costs
  std::vector<double> lb_, ub_, base_lb_, base_ub_;
  std::vector<double> rhs_;

  std::vector<int> basis_;          // row -> column
  std::vector<int> pos_in_basis_;   // column -> row, or -1
  std::vector<VStat> vstat_;
  std::vector<double> xval_;        // current value of every column
  std::vector<double> binv_;        // dense basis inverse, row-major
  std::vector<double> devex_;       // reference weights for pricing
  bool factorized_ = false;
  int pivots_since_refactor_ = 0;
  long long total_iterations_ = 0;

  double col_value(int j) const;
  void ftran(int col, std::vector<double>& out) const;
  void refactorize();
  void recompute_basics();
  void snap_nonbasics();
  double infeasibility(int row, double& dir) const;
  double max_residual() const;
};

// One-shot LP over the model with integer variables relaxed to their bounds.
LpResult solve_lp(const MilpModel& model);

}  // namespace maxband
