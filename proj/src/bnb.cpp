#include "maxband/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace maxband {

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kPruneEps = 1e-9;
constexpr int kRestartEvery = 1000;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Node {
  int parent = -1;
  int var = -1;          // branching override applied on top of the parent
  double lo = 0.0, hi = 0.0;
  double bound = 0.0;    // relaxation value of the parent
  bool open = true;
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, LpSolver& lp)
      : model_(model), lp_(lp) {
    for (int v : model_.integer_vars) {
      root_lo_.push_back(lp_.lower(v));
      root_hi_.push_back(lp_.upper(v));
    }
  }

  Solution run(const SolveLimits& limits) {
    const double start = now_seconds();
    Solution best;
    best.status = SolStatus::Infeasible;
    bool any_limit_hit = false;
    const bool has_cutoff =
        limits.objective_cutoff > -std::numeric_limits<double>::infinity();
    double cutoff = limits.objective_cutoff;

    arena_.clear();
    arena_.push_back(Node{});  // root: no override
    std::vector<int> stack{0};
    long long processed = 0;

    while (!stack.empty()) {
      if (processed >= limits.node_budget ||
          now_seconds() - start > limits.wall_seconds) {
        any_limit_hit = true;
        break;
      }
      // Periodic best-bound restart: continue from the open node with the
      // strongest parent relaxation instead of the DFS top.
      int node;
      if (processed > 0 && processed % kRestartEvery == 0) {
        int pick = -1;
        for (std::size_t s = 0; s < stack.size(); ++s) {
          const int cand = stack[s];
          if (!arena_[cand].open) continue;
          if (pick < 0 || arena_[cand].bound > arena_[stack[pick]].bound)
            pick = static_cast<int>(s);
        }
        if (pick < 0) break;
        node = stack[pick];
        stack.erase(stack.begin() + pick);
      } else {
        node = stack.back();
        stack.pop_back();
      }
      if (!arena_[node].open) continue;
      arena_[node].open = false;
      ++processed;

      switch_to(node);
      LpResult rel = lp_.solve();
      lp_iterations_ += rel.iterations;
      if (rel.status == LpStatus::Infeasible) continue;
      if (rel.status != LpStatus::Optimal) {
        // Numerical stall; treat the node as undecided and give up on it.
        any_limit_hit = true;
        continue;
      }
      if (rel.objective <= cutoff + kPruneEps) continue;

      const int frac = most_fractional(rel.x);
      if (frac < 0) {
        // Integral relaxation: polish by fixing every integer to its rounded
        // value and resolving, so incumbents carry exact integers.
        Solution cand = polish(node, rel);
        if (cand.has_solution() && cand.objective > best.objective + kPruneEps &&
            cand.objective > limits.objective_cutoff + kPruneEps) {
          best.objective = cand.objective;
          best.x = std::move(cand.x);
          best.status = SolStatus::Feasible;
          cutoff = std::max(cutoff, best.objective);
          if (limits.stop_at_first_feasible) break;
        }
        continue;
      }

      // Children: nearer integer first (dive side on top of the stack).
      const int v = model_.integer_vars[frac];
      const double val = rel.x[v];
      const double fl = std::floor(val), ce = fl + 1.0;
      const int down = add_child(node, v, lp_.lower(v), fl, rel.objective);
      const int up = add_child(node, v, ce, lp_.upper(v), rel.objective);
      if (val - fl <= 0.5) {
        if (up >= 0) stack.push_back(up);
        if (down >= 0) stack.push_back(down);
      } else {
        if (down >= 0) stack.push_back(down);
        if (up >= 0) stack.push_back(up);
      }
    }

    restore_root();
    Solution res = std::move(best);
    res.stats.nodes = processed;
    res.stats.lp_iterations = lp_iterations_;
    res.stats.wall_seconds = now_seconds() - start;
    if (res.has_solution()) {
      const bool exhausted = stack.empty() && !any_limit_hit;
      res.status = exhausted && !limits.stop_at_first_feasible
                       ? SolStatus::Optimal
                       : SolStatus::Feasible;
    } else {
      res.status = (any_limit_hit || has_cutoff) ? SolStatus::LimitReached
                                                 : SolStatus::Infeasible;
      res.objective = 0.0;
    }
    return res;
  }

 private:
  int add_child(int parent, int var, double lo, double hi, double bound) {
    // Intersect with the node's current box; an empty child is never queued.
    if (lo > hi) return -1;
    Node n;
    n.parent = parent;
    n.var = var;
    n.lo = lo;
    n.hi = hi;
    n.bound = bound;
    arena_.push_back(n);
    return static_cast<int>(arena_.size()) - 1;
  }

  // Reset integer bounds to the search root, then apply the node's chain.
  void switch_to(int node) {
    restore_root();
    chain_.clear();
    for (int n = node; n > 0; n = arena_[n].parent) chain_.push_back(n);
    for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
      const Node& nd = arena_[*it];
      const double lo = std::max(nd.lo, lp_.lower(nd.var));
      const double hi = std::min(nd.hi, lp_.upper(nd.var));
      lp_.set_bounds(nd.var, lo, hi);
    }
  }

  void restore_root() {
    for (std::size_t k = 0; k < model_.integer_vars.size(); ++k)
      lp_.set_bounds(model_.integer_vars[k], root_lo_[k], root_hi_[k]);
  }

  int most_fractional(const std::vector<double>& x) const {
    int pick = -1;
    double best = kIntTol;
    for (std::size_t k = 0; k < model_.integer_vars.size(); ++k) {
      const double v = x[model_.integer_vars[k]];
      const double frac = std::fabs(v - std::round(v));
      if (frac > best) {
        best = frac;
        pick = static_cast<int>(k);
      }
    }
    return pick;
  }

  Solution polish(int node, const LpResult& rel) {
    for (int v : model_.integer_vars) {
      const double r = std::round(rel.x[v]);
      lp_.set_bounds(v, r, r);
    }
    LpResult fixed = lp_.solve();
    lp_iterations_ += fixed.iterations;
    Solution out;
    if (fixed.status == LpStatus::Optimal) {
      out.status = SolStatus::Feasible;
      out.objective = fixed.objective;
      out.x = fixed.x;
    } else {
      // Fall back to the raw relaxation point (integral within tolerance).
      out.status = SolStatus::Feasible;
      out.objective = rel.objective;
      out.x = rel.x;
    }
    switch_to(node);
    return out;
  }

  const MilpModel& model_;
  LpSolver& lp_;
  std::vector<double> root_lo_, root_hi_;
  std::vector<Node> arena_;
  std::vector<int> chain_;
  long long lp_iterations_ = 0;
};

}  // namespace

Solution branch_and_bound(const MilpModel& model, LpSolver& lp,
                          const SolveLimits& limits) {
  if (model.infeasible_by_bounds) {
    Solution res;
    res.status = SolStatus::Infeasible;
    res.objective = 0.0;
    return res;
  }
  BranchAndBound bnb(model, lp);
  return bnb.run(limits);
}

Solution branch_and_bound(const MilpModel& model, const SolveLimits& limits) {
  if (model.infeasible_by_bounds) {
    Solution res;
    res.status = SolStatus::Infeasible;
    res.objective = 0.0;
    return res;
  }
  LpSolver lp(model);
  return branch_and_bound(model, lp, limits);
}

namespace {

// The integer box the oracle enumerates for one variable.
struct OracleBox {
  int var = -1;
  long long lo = 0, hi = 0;
};

}  // namespace

Solution brute_force_oracle(const MilpModel& model) {
  if (model.infeasible_by_bounds) {
    Solution res;
    res.status = SolStatus::Infeasible;
    res.objective = 0.0;
    return res;
  }

  const std::vector<std::array<double, 2>> box = integer_boxes(model);

  std::vector<char> touched(model.var_count(), 0);
  for (const Row& row : model.rows)
    for (const auto& [v, c] : row.coeffs)
      if (c != 0.0) touched[v] = 1;

  std::vector<OracleBox> boxes;
  double product = 1.0;
  for (int v : model.integer_vars) {
    const double lo = box[v][0], hi = box[v][1];
    if (lo > hi) {
      Solution res;
      res.status = SolStatus::Infeasible;
      res.objective = 0.0;
      return res;
    }
    if (!touched[v] && model.objective[v] == 0.0) continue;  // inert column
    OracleBox ob;
    ob.var = v;
    ob.lo = static_cast<long long>(std::llround(lo));
    ob.hi = static_cast<long long>(std::llround(hi));
    product *= static_cast<double>(ob.hi - ob.lo + 1);
    boxes.push_back(ob);
  }
  if (product > 1e7) {
    throw OracleRefused("oracle box product " + std::to_string(product) +
                        " exceeds 1e7 over " + std::to_string(boxes.size()) +
                        " enumerated variables");
  }

  LpSolver lp(model);
  // Inert integers still need a fixed integral value in the reported point.
  for (int v : model.integer_vars) {
    if (!touched[v] && model.objective[v] == 0.0)
      lp.set_bounds(v, box[v][0], box[v][0]);
  }

  Solution best;
  best.status = SolStatus::Infeasible;
  best.objective = -std::numeric_limits<double>::infinity();

  std::vector<long long> cur(boxes.size());
  for (std::size_t k = 0; k < boxes.size(); ++k) cur[k] = boxes[k].lo;

  const double start = now_seconds();
  long long lps = 0;
  for (;;) {
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      const double v = static_cast<double>(cur[k]);
      lp.set_bounds(boxes[k].var, v, v);
    }
    LpResult r = lp.solve();
    ++lps;
    best.stats.lp_iterations += r.iterations;
    if (r.status == LpStatus::Optimal &&
        r.objective > best.objective + 1e-12) {
      best.objective = r.objective;
      best.x = r.x;
      best.status = SolStatus::Optimal;
    }

    std::size_t k = 0;
    while (k < boxes.size() && ++cur[k] > boxes[k].hi) {
      cur[k] = boxes[k].lo;
      ++k;
    }
    if (k == boxes.size()) break;
  }
  best.stats.nodes = lps;
  best.stats.wall_seconds = now_seconds() - start;
  if (best.status == SolStatus::Infeasible) best.objective = 0.0;
  return best;
}

}  // namespace maxband
