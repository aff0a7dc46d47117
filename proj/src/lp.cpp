#include "maxband/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace maxband {

namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-8;
constexpr int kRefactorEvery = 200;
constexpr int kStallLimit = 800;  // degenerate pivots before Bland kicks in

bool finite_lo(double v) { return v > -kInf; }
bool finite_hi(double v) { return v < kInf; }

}  // namespace

LpSolver::LpSolver(const MilpModel& model) {
  nrows_ = model.row_count();
  nstruct_ = model.var_count();
  ntotal_ = nstruct_ + nrows_;

  cols_.resize(nstruct_);
  rhs_.resize(nrows_);
  for (int r = 0; r < nrows_; ++r) {
    const Row& row = model.rows[r];
    rhs_[r] = row.rhs;
    for (const auto& [v, c] : row.coeffs) {
      if (c != 0.0) cols_[v].emplace_back(r, c);
    }
  }

  cost_.assign(ntotal_, 0.0);
  for (int v = 0; v < nstruct_; ++v) cost_[v] = -model.objective[v];

  lb_.assign(ntotal_, 0.0);
  ub_.assign(ntotal_, 0.0);
  for (int v = 0; v < nstruct_; ++v) {
    lb_[v] = model.vars[v].lb;
    ub_[v] = model.vars[v].ub;
  }
  for (int r = 0; r < nrows_; ++r) {
    switch (model.rows[r].rel) {
      case Rel::Le: lb_[nstruct_ + r] = 0.0; ub_[nstruct_ + r] = kInf; break;
      case Rel::Ge: lb_[nstruct_ + r] = -kInf; ub_[nstruct_ + r] = 0.0; break;
      case Rel::Eq: lb_[nstruct_ + r] = 0.0; ub_[nstruct_ + r] = 0.0; break;
    }
  }
  base_lb_ = lb_;
  base_ub_ = ub_;

  // All-logical starting basis.
  basis_.resize(nrows_);
  pos_in_basis_.assign(ntotal_, -1);
  vstat_.assign(ntotal_, VStat::AtLower);
  for (int r = 0; r < nrows_; ++r) {
    basis_[r] = nstruct_ + r;
    pos_in_basis_[nstruct_ + r] = r;
    vstat_[nstruct_ + r] = VStat::Basic;
  }
  for (int v = 0; v < nstruct_; ++v) {
    if (finite_lo(lb_[v]))
      vstat_[v] = VStat::AtLower;
    else if (finite_hi(ub_[v]))
      vstat_[v] = VStat::AtUpper;
    else
      vstat_[v] = VStat::Free;
  }
  xval_.assign(ntotal_, 0.0);
  devex_.assign(ntotal_, 1.0);
  factorized_ = false;
}

void LpSolver::set_bounds(int var, double lo, double hi) {
  lb_[var] = lo;
  ub_[var] = hi;
}

LpSolver::State LpSolver::save_state() const {
  State s;
  s.basis = basis_;
  s.vstat.resize(vstat_.size());
  for (std::size_t i = 0; i < vstat_.size(); ++i)
    s.vstat[i] = static_cast<std::uint8_t>(vstat_[i]);
  s.xval = xval_;
  s.binv = binv_;
  s.devex = devex_;
  return s;
}

void LpSolver::restore_state(const State& s) {
  basis_ = s.basis;
  for (std::size_t i = 0; i < vstat_.size(); ++i)
    vstat_[i] = static_cast<VStat>(s.vstat[i]);
  xval_ = s.xval;
  binv_ = s.binv;
  devex_ = s.devex;
  pos_in_basis_.assign(ntotal_, -1);
  for (int r = 0; r < nrows_; ++r) pos_in_basis_[basis_[r]] = r;
  factorized_ = true;
  pivots_since_refactor_ = 0;
}

void LpSolver::restore_bounds(int var) {
  lb_[var] = base_lb_[var];
  ub_[var] = base_ub_[var];
}

double LpSolver::col_value(int j) const { return xval_[j]; }

void LpSolver::ftran(int col, std::vector<double>& out) const {
  out.assign(nrows_, 0.0);
  if (col >= nstruct_) {
    const int r = col - nstruct_;
    for (int i = 0; i < nrows_; ++i) out[i] = binv_[i * nrows_ + r];
    return;
  }
  const auto& c = cols_[col];
  for (int i = 0; i < nrows_; ++i) {
    const double* row = &binv_[static_cast<std::size_t>(i) * nrows_];
    double s = 0.0;
    for (const auto& [r, v] : c) s += row[r] * v;
    out[i] = s;
  }
}

// Gauss-Jordan rebuild of the basis inverse. Dependent basis columns are
// swapped for the logicals of the rows left without a pivot.
void LpSolver::refactorize() {
  binv_.assign(static_cast<std::size_t>(nrows_) * nrows_, 0.0);
  for (int i = 0; i < nrows_; ++i) binv_[i * nrows_ + i] = 1.0;

  std::vector<char> row_done(nrows_, 0);
  std::vector<int> pivot_row_of(nrows_, -1);
  std::vector<double> alpha(nrows_);

  for (int k = 0; k < nrows_; ++k) {
    ftran(basis_[k], alpha);
    int prow = -1;
    double pmax = 1e-10;
    for (int i = 0; i < nrows_; ++i) {
      if (!row_done[i] && std::fabs(alpha[i]) > pmax) {
        pmax = std::fabs(alpha[i]);
        prow = i;
      }
    }
    if (prow < 0) {
      // Singular slot: fall back to the logical of the first free row.
      int freerow = 0;
      while (row_done[freerow]) ++freerow;
      pos_in_basis_[basis_[k]] = -1;
      vstat_[basis_[k]] = finite_lo(lb_[basis_[k]]) ? VStat::AtLower
                          : finite_hi(ub_[basis_[k]]) ? VStat::AtUpper
                                                      : VStat::Free;
      const int logical = nstruct_ + freerow;
      basis_[k] = logical;
      pos_in_basis_[logical] = k;
      vstat_[logical] = VStat::Basic;
      ftran(logical, alpha);
      prow = freerow;
    }
    row_done[prow] = 1;
    pivot_row_of[k] = prow;
    const double piv = alpha[prow];
    double* prow_ptr = &binv_[static_cast<std::size_t>(prow) * nrows_];
    for (int j = 0; j < nrows_; ++j) prow_ptr[j] /= piv;
    for (int i = 0; i < nrows_; ++i) {
      if (i == prow) continue;
      const double f = alpha[i];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(i) * nrows_];
      for (int j = 0; j < nrows_; ++j) row[j] -= f * prow_ptr[j];
    }
  }

  // Reorder slots so slot r holds the column pivoted on row r.
  std::vector<int> nb(nrows_);
  for (int k = 0; k < nrows_; ++k) nb[pivot_row_of[k]] = basis_[k];
  basis_ = std::move(nb);
  for (int r = 0; r < nrows_; ++r) pos_in_basis_[basis_[r]] = r;

  factorized_ = true;
  pivots_since_refactor_ = 0;
}

void LpSolver::snap_nonbasics() {
  for (int j = 0; j < ntotal_; ++j) {
    if (vstat_[j] == VStat::Basic) continue;
    const bool lo = finite_lo(lb_[j]), hi = finite_hi(ub_[j]);
    if (vstat_[j] == VStat::AtLower && !lo)
      vstat_[j] = hi ? VStat::AtUpper : VStat::Free;
    if (vstat_[j] == VStat::AtUpper && !hi)
      vstat_[j] = lo ? VStat::AtLower : VStat::Free;
    if (vstat_[j] == VStat::Free && (lo || hi))
      vstat_[j] = lo ? VStat::AtLower : VStat::AtUpper;
    switch (vstat_[j]) {
      case VStat::AtLower: xval_[j] = lb_[j]; break;
      case VStat::AtUpper: xval_[j] = ub_[j]; break;
      case VStat::Free: xval_[j] = 0.0; break;
      case VStat::Basic: break;
    }
  }
}

void LpSolver::recompute_basics() {
  std::vector<double> q = rhs_;
  for (int j = 0; j < ntotal_; ++j) {
    if (vstat_[j] == VStat::Basic || xval_[j] == 0.0) continue;
    const double xj = xval_[j];
    if (j >= nstruct_) {
      q[j - nstruct_] -= xj;
    } else {
      for (const auto& [r, v] : cols_[j]) q[r] -= v * xj;
    }
  }
  for (int i = 0; i < nrows_; ++i) {
    const double* row = &binv_[static_cast<std::size_t>(i) * nrows_];
    double s = 0.0;
    for (int r = 0; r < nrows_; ++r) s += row[r] * q[r];
    xval_[basis_[i]] = s;
  }
}

// Signed infeasibility of the basic variable in this row: positive when the
// value must increase to regain feasibility.
double LpSolver::infeasibility(int row, double& dir) const {
  const int j = basis_[row];
  if (xval_[j] < lb_[j] - kFeasTol) {
    dir = 1.0;
    return lb_[j] - xval_[j];
  }
  if (xval_[j] > ub_[j] + kFeasTol) {
    dir = -1.0;
    return xval_[j] - ub_[j];
  }
  dir = 0.0;
  return 0.0;
}

// Largest |Ax + s - b| over the rows, straight from the column data.
double LpSolver::max_residual() const {
  std::vector<double> act(nrows_, 0.0);
  for (int j = 0; j < nstruct_; ++j) {
    const double xj = xval_[j];
    if (xj == 0.0) continue;
    for (const auto& [r, v] : cols_[j]) act[r] += v * xj;
  }
  double worst = 0.0;
  for (int r = 0; r < nrows_; ++r) {
    worst = std::max(worst,
                     std::fabs(act[r] + xval_[nstruct_ + r] - rhs_[r]));
  }
  return worst;
}

LpResult LpSolver::solve(long long max_iterations) {
  LpResult res;

  for (int v = 0; v < ntotal_; ++v) {
    if (lb_[v] > ub_[v] + 1e-12) {
      res.status = LpStatus::Infeasible;
      return res;
    }
  }

  if (!factorized_) refactorize();
  snap_nonbasics();
  recompute_basics();

  std::vector<double> y(nrows_), alpha(nrows_), cb(nrows_);
  long long iters = 0;
  int stall = 0;
  bool bland = false;
  bool unblocked_retry = false;

  auto finish = [&](LpStatus st) {
    res.status = st;
    res.iterations = iters;
    total_iterations_ += iters;
    res.x.assign(xval_.begin(), xval_.begin() + nstruct_);
    double obj = 0.0;
    for (int v = 0; v < nstruct_; ++v) obj -= cost_[v] * xval_[v];
    res.objective = obj;
    return res;
  };

  while (true) {
    if (iters >= max_iterations) return finish(LpStatus::IterLimit);
    ++iters;

    // Phase selection: any infeasible basic switches the cost to the
    // composite infeasibility gradient.
    bool phase1 = false;
    double dir;
    for (int r = 0; r < nrows_ && !phase1; ++r)
      phase1 = infeasibility(r, dir) > 0.0;

    for (int r = 0; r < nrows_; ++r) {
      if (phase1) {
        infeasibility(r, dir);
        cb[r] = -dir;  // minimize total violation
      } else {
        cb[r] = cost_[basis_[r]];
      }
    }

    // BTRAN: y = cb' * binv.
    std::fill(y.begin(), y.end(), 0.0);
    for (int r = 0; r < nrows_; ++r) {
      const double c = cb[r];
      if (c == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(r) * nrows_];
      for (int j = 0; j < nrows_; ++j) y[j] += c * row[j];
    }

    // Pricing.
    int enter = -1;
    double enter_score = 0.0;
    double enter_merit = 0.0;
    double enter_sign = 0.0;
    for (int j = 0; j < ntotal_; ++j) {
      if (vstat_[j] == VStat::Basic) continue;
      if (lb_[j] == ub_[j]) continue;  // fixed
      double d;
      if (j >= nstruct_) {
        d = (phase1 ? 0.0 : cost_[j]) - y[j - nstruct_];
      } else {
        d = phase1 ? 0.0 : cost_[j];
        for (const auto& [r, v] : cols_[j]) d -= y[r] * v;
      }
      double score = 0.0, sign = 0.0;
      switch (vstat_[j]) {
        case VStat::AtLower:
          if (d < -kDualTol) { score = -d; sign = 1.0; }
          break;
        case VStat::AtUpper:
          if (d > kDualTol) { score = d; sign = -1.0; }
          break;
        case VStat::Free:
          if (std::fabs(d) > kDualTol) { score = std::fabs(d); sign = d > 0 ? -1.0 : 1.0; }
          break;
        case VStat::Basic:
          break;
      }
      if (score > 0.0) {
        if (bland) { enter = j; enter_sign = sign; enter_score = score; break; }
        // Devex: largest |d|^2 / weight.
        const double merit = score * score / devex_[j];
        if (merit > enter_merit) {
          enter_merit = merit;
          enter_score = score;
          enter = j;
          enter_sign = sign;
        }
      }
    }

    if (enter < 0) {
      if (phase1) return finish(LpStatus::Infeasible);
      // Guard against inverse drift before declaring optimality.
      if (pivots_since_refactor_ > 0 && max_residual() > 1e-9) {
        refactorize();
        recompute_basics();
        continue;
      }
      return finish(LpStatus::Optimal);
    }

    ftran(enter, alpha);

    // Ratio test. The entering column moves by step >= 0 in direction
    // enter_sign; basic i moves by -enter_sign * alpha[i] per unit.
    double best_step = kInf;
    int leave_row = -1;
    double leave_to = 0.0;  // bound the leaving variable parks at
    double best_piv = 0.0;
    const bool enter_boxed = finite_lo(lb_[enter]) && finite_hi(ub_[enter]);
    if (enter_boxed) best_step = ub_[enter] - lb_[enter];

    if (phase1) {
      // Piecewise-linear ratio test: the infeasibility sum is convex in the
      // step, its slope rising by |alpha| at every bound crossing. Walking
      // breakpoints until the slope turns nonnegative lets one pivot repair
      // many violated basics instead of stopping at the first.
      struct Breakpoint {
        double step;
        double slope_gain;
        int row;
        double park;
      };
      std::vector<Breakpoint> bps;
      bps.reserve(32);
      for (int r = 0; r < nrows_; ++r) {
        const double a = alpha[r];
        if (std::fabs(a) < kPivotTol) continue;
        const int j = basis_[r];
        const double delta = -enter_sign * a;
        const double xj = xval_[j];
        if (xj < lb_[j] - kFeasTol) {
          if (delta > 0.0)
            bps.push_back({(lb_[j] - xj) / delta, delta, r, lb_[j]});
        } else if (xj > ub_[j] + kFeasTol) {
          if (delta < 0.0)
            bps.push_back({(ub_[j] - xj) / delta, -delta, r, ub_[j]});
        } else if (delta > 0.0 && finite_hi(ub_[j])) {
          bps.push_back({std::max((ub_[j] - xj) / delta, 0.0), delta, r,
                         ub_[j]});
        } else if (delta < 0.0 && finite_lo(lb_[j])) {
          bps.push_back({std::max((lb_[j] - xj) / delta, 0.0), -delta, r,
                         lb_[j]});
        }
      }
      std::sort(bps.begin(), bps.end(),
                [](const Breakpoint& a, const Breakpoint& b) {
                  if (a.step != b.step) return a.step < b.step;
                  if (a.slope_gain != b.slope_gain)
                    return a.slope_gain > b.slope_gain;
                  return a.row < b.row;
                });
      const double box_span = enter_boxed ? ub_[enter] - lb_[enter] : kInf;
      double slope = -enter_score;  // infeasibility change per unit step
      bool stopped = false;
      best_step = box_span;
      for (const auto& bp : bps) {
        if (bp.step >= box_span - 1e-12) {
          // The entering bound flip saturates first.
          leave_row = -1;
          best_step = box_span;
          stopped = true;
          break;
        }
        leave_row = bp.row;
        leave_to = bp.park;
        best_step = std::max(bp.step, 0.0);
        best_piv = alpha[bp.row];
        slope += bp.slope_gain;
        if (slope >= -kDualTol) {
          stopped = true;
          break;
        }
      }
      if (!stopped && slope < -kDualTol) {
        // Every breakpoint crossed and the objective still improves: the
        // entering bound flip is the only stop left.
        leave_row = -1;
        best_step = box_span;
      }
    } else {
      for (int r = 0; r < nrows_; ++r) {
        const double a = alpha[r];
        if (std::fabs(a) < kPivotTol) continue;
        const int j = basis_[r];
        const double delta = -enter_sign * a;  // movement of basic j per unit
        const double xj = xval_[j];
        double step = kInf, park = 0.0;
        if (delta > 0.0 && finite_hi(ub_[j])) {
          step = (ub_[j] - xj) / delta;
          park = ub_[j];
        } else if (delta < 0.0 && finite_lo(lb_[j])) {
          step = (lb_[j] - xj) / delta;
          park = lb_[j];
        }
        if (step == kInf) continue;
        step = std::max(step, 0.0);
        bool take;
        if (leave_row < 0) {
          take = step < best_step - 1e-12;  // ties keep the cheaper bound flip
        } else {
          take = step < best_step - 1e-12 ||
                 (step <= best_step + 1e-12 &&
                  (bland ? basis_[r] < basis_[leave_row]
                         : std::fabs(a) > std::fabs(best_piv)));
        }
        if (take) {
          best_step = step;
          leave_row = r;
          leave_to = park;
          best_piv = a;
        }
      }
    }

    if (best_step >= kInf) {
      if (phase1) {
        // An improving phase-1 ray must hit a violated bound; this is a
        // numerical artifact. Rebuild the inverse and retry once.
        if (unblocked_retry) return finish(LpStatus::IterLimit);
        unblocked_retry = true;
        refactorize();
        recompute_basics();
        continue;
      }
      return finish(LpStatus::Unbounded);
    }
    unblocked_retry = false;

    if (best_step <= 1e-12) {
      if (++stall > kStallLimit) bland = true;
    } else {
      stall = 0;
      bland = false;
    }

    // Apply the step.
    const double step = best_step;
    if (step != 0.0) {
      for (int r = 0; r < nrows_; ++r) {
        if (alpha[r] != 0.0) xval_[basis_[r]] -= enter_sign * step * alpha[r];
      }
      xval_[enter] += enter_sign * step;
    }

    if (leave_row < 0) {
      // Bound flip: entering moved across its box, basis unchanged.
      vstat_[enter] =
          vstat_[enter] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
      xval_[enter] = vstat_[enter] == VStat::AtLower ? lb_[enter] : ub_[enter];
      continue;
    }

    // Pivot: update the inverse with the eta transform of this column.
    const int leaving = basis_[leave_row];
    const double piv = alpha[leave_row];
    if (std::fabs(piv) < kPivotTol) {
      refactorize();
      recompute_basics();
      continue;
    }
    // Devex update from the pivot row of the old inverse.
    {
      const double* rrow = &binv_[static_cast<std::size_t>(leave_row) * nrows_];
      const double scale = devex_[enter] / (piv * piv);
      double wmax = 1.0;
      for (int j = 0; j < ntotal_; ++j) {
        if (vstat_[j] == VStat::Basic || j == enter) continue;
        if (lb_[j] == ub_[j]) continue;
        double rho;
        if (j >= nstruct_) {
          rho = rrow[j - nstruct_];
        } else {
          rho = 0.0;
          for (const auto& [row, val] : cols_[j]) rho += rrow[row] * val;
        }
        if (rho == 0.0) continue;
        const double cand = rho * rho * scale;
        if (cand > devex_[j]) devex_[j] = cand;
        if (devex_[j] > wmax) wmax = devex_[j];
      }
      devex_[leaving] = std::max(scale, 1.0);
      if (wmax > 1e10) devex_.assign(ntotal_, 1.0);  // restart the framework
    }

    vstat_[leaving] =
        (leave_to == lb_[leaving] && finite_lo(lb_[leaving])) ? VStat::AtLower
        : finite_hi(ub_[leaving]) ? VStat::AtUpper
                                  : VStat::Free;
    xval_[leaving] = leave_to;
    pos_in_basis_[leaving] = -1;

    basis_[leave_row] = enter;
    pos_in_basis_[enter] = leave_row;
    vstat_[enter] = VStat::Basic;

    double* prow = &binv_[static_cast<std::size_t>(leave_row) * nrows_];
    for (int j = 0; j < nrows_; ++j) prow[j] /= piv;
    for (int i = 0; i < nrows_; ++i) {
      if (i == leave_row) continue;
      const double f = alpha[i];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(i) * nrows_];
      for (int j = 0; j < nrows_; ++j) row[j] -= f * prow[j];
    }

    if (++pivots_since_refactor_ >= kRefactorEvery) {
      refactorize();
      recompute_basics();
    }
  }
}

LpResult solve_lp(const MilpModel& model) {
  if (model.infeasible_by_bounds) {
    LpResult res;
    res.status = LpStatus::Infeasible;
    return res;
  }
  LpSolver solver(model);
  return solver.solve();
}

}  // namespace maxband
