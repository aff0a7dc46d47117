#include "maxband/tabu.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace maxband {

namespace {

constexpr double kImprove = 1e-9;  // strict-improvement margin

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

enum class Kind { M, Delta, C };

std::vector<Kind> classify(const MilpModel& model) {
  std::vector<Kind> kind;
  kind.reserve(model.integer_vars.size());
  for (int v : model.integer_vars) {
    switch (model.vars[v].role) {
      case VarRole::M: kind.push_back(Kind::M); break;
      case VarRole::CycleC: kind.push_back(Kind::C); break;
      default: kind.push_back(Kind::Delta); break;
    }
  }
  return kind;
}

// Uniform pick of up to `want` non-tabu positions of one kind. When the
// non-tabu pool is smaller than the request, the whole pool is taken.
void pick_kind(const std::vector<Kind>& kind, const TabuState& tabu, Kind k,
               int want, SplitMix64& rng, std::vector<int>& out) {
  std::vector<int> pool;
  for (std::size_t p = 0; p < kind.size(); ++p)
    if (kind[p] == k && tabu.tenure[p] == 0)
      pool.push_back(static_cast<int>(p));
  const int take = std::min<int>(want, static_cast<int>(pool.size()));
  for (int i = 0; i < take; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
}

std::vector<int> select_move(const MilpModel& model,
                             const std::vector<Kind>& kind,
                             const TabuState& tabu, const HeuristicConfig& cfg,
                             SplitMix64& rng) {
  (void)model;
  std::vector<int> sel;
  pick_kind(kind, tabu, Kind::M, cfg.rm, rng, sel);
  pick_kind(kind, tabu, Kind::Delta, cfg.rd, rng, sel);
  pick_kind(kind, tabu, Kind::C, cfg.rc, rng, sel);
  return sel;
}

// Fix every integer except the selected positions to the (rounded) values of
// the reference point; restore base bounds on the selected ones.
void apply_fixings(const MilpModel& model, LpSolver& lp,
                   const std::vector<double>& ref,
                   const std::vector<int>& selected) {
  std::vector<char> is_sel(model.integer_vars.size(), 0);
  for (int p : selected) is_sel[p] = 1;
  for (std::size_t p = 0; p < model.integer_vars.size(); ++p) {
    const int v = model.integer_vars[p];
    if (is_sel[p]) {
      lp.restore_bounds(v);
    } else {
      const double r = std::round(ref[v]);
      lp.set_bounds(v, r, r);
    }
  }
}

void restore_all(const MilpModel& model, LpSolver& lp) {
  for (int v : model.integer_vars) lp.restore_bounds(v);
}

bool clean(const MilpModel& model, const Solution& sol) {
  return sol.has_solution() && audit_solution(model, sol.x, 1e-6).pass;
}

}  // namespace

Solution first_feasible(const MilpModel& model, LpSolver& lp,
                        const SolveLimits& limits) {
  SolveLimits lim = limits;
  lim.stop_at_first_feasible = true;
  return branch_and_bound(model, lp, lim);
}

std::vector<Candidate> make_candidates(const MilpModel& model, LpSolver& lp,
                                       const Solution& current,
                                       const TabuState& tabu,
                                       const HeuristicConfig& cfg,
                                       SplitMix64& rng) {
  const std::vector<Kind> kind = classify(model);

  // Settle a basis with every integer pinned to the current point once; each
  // candidate then restores it instead of churning from the previous
  // sub-solve's leaf.
  apply_fixings(model, lp, current.x, {});
  lp.solve();
  const LpSolver::State settled = lp.save_state();

  std::vector<Candidate> out;
  for (int c = 0; c < cfg.size_list; ++c) {
    Candidate cand;
    cand.index = c;
    cand.selected = select_move(model, kind, tabu, cfg, rng);
    lp.restore_state(settled);
    for (int p : cand.selected) lp.restore_bounds(model.integer_vars[p]);
    cand.sol = branch_and_bound(model, lp, cfg.candidate_limits);
    for (int p : cand.selected) {
      const int v = model.integer_vars[p];
      const double r = std::round(current.x[v]);
      lp.set_bounds(v, r, r);
    }
    if (clean(model, cand.sol)) out.push_back(std::move(cand));
  }
  restore_all(model, lp);
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.sol.objective != b.sol.objective)
      return a.sol.objective > b.sol.objective;
    return a.index < b.index;
  });
  return out;
}

namespace {

// LSF move: fix the selection to random values inside the integer boxes and
// solve the remaining pure LP.
Solution fix_move(const MilpModel& model, LpSolver& lp,
                  const std::vector<std::array<double, 2>>& boxes,
                  const Solution& from, const std::vector<int>& sel,
                  SplitMix64& rng) {
  apply_fixings(model, lp, from.x, sel);
  for (int p : sel) {
    const int v = model.integer_vars[p];
    const double lo = boxes[v][0], hi = boxes[v][1];
    double val;
    if (lo > hi) {
      val = std::round(from.x[v]);
    } else {
      val = static_cast<double>(
          rng.range(static_cast<long long>(lo), static_cast<long long>(hi)));
    }
    lp.set_bounds(v, val, val);
  }
  LpResult r = lp.solve();
  restore_all(model, lp);
  Solution out;
  if (r.status == LpStatus::Optimal) {
    out.status = SolStatus::Feasible;
    out.objective = r.objective;
    out.x = std::move(r.x);
  }
  return out;
}

// LSU move: unfix the selection, everything else pinned to `from`, and prune
// below the acceptance threshold.
Solution unfix_move(const MilpModel& model, LpSolver& lp, const Solution& from,
                    const std::vector<int>& sel, double cutoff,
                    const SolveLimits& limits) {
  apply_fixings(model, lp, from.x, sel);
  SolveLimits lim = limits;
  lim.objective_cutoff = cutoff;
  Solution out = branch_and_bound(model, lp, lim);
  restore_all(model, lp);
  return out;
}

}  // namespace

LocalSearchResult local_search(const MilpModel& model, LpSolver& lp,
                               const Solution& start, const TabuState& tabu,
                               const HeuristicConfig& cfg, SplitMix64& rng) {
  const std::vector<Kind> kind = classify(model);
  const std::vector<std::array<double, 2>> boxes = integer_boxes(model);

  LocalSearchResult res;
  res.best = start;
  for (int round = 0; round < cfg.ls_iterations; ++round) {
    std::vector<int> round_modified;
    Solution result;

    if (cfg.variant == HeuristicConfig::Variant::LSF) {
      const std::vector<int> sel = select_move(model, kind, tabu, cfg, rng);
      res.selections.push_back(sel);
      result = fix_move(model, lp, boxes, res.best, sel, rng);
      round_modified = sel;
    } else if (cfg.variant == HeuristicConfig::Variant::LSU) {
      const std::vector<int> sel = select_move(model, kind, tabu, cfg, rng);
      res.selections.push_back(sel);
      result = unfix_move(model, lp, res.best, sel, res.best.objective,
                          cfg.ls_limits);
      round_modified = sel;
    } else {
      // LSVNS: a fix shake followed by an unfix improvement, accepted as one
      // round against the round's starting point.
      const std::vector<int> sel_f = select_move(model, kind, tabu, cfg, rng);
      res.selections.push_back(sel_f);
      Solution inter = fix_move(model, lp, boxes, res.best, sel_f, rng);
      const bool inter_ok = clean(model, inter);
      const Solution& base = inter_ok ? inter : res.best;

      const std::vector<int> sel_u = select_move(model, kind, tabu, cfg, rng);
      res.selections.push_back(sel_u);
      result =
          unfix_move(model, lp, base, sel_u, res.best.objective, cfg.ls_limits);
      round_modified = sel_f;
      round_modified.insert(round_modified.end(), sel_u.begin(), sel_u.end());
    }

    if (clean(model, result) &&
        result.objective > res.best.objective + kImprove) {
      res.best = std::move(result);
      for (int p : round_modified) res.accepted_modified.push_back(p);
    }
  }
  return res;
}

TsilpResult tsilp(const MilpModel& model, const HeuristicConfig& cfg) {
  TsilpResult out;
  if (model.infeasible_by_bounds) {
    out.status = SolStatus::Infeasible;
    out.best.status = SolStatus::Infeasible;
    return out;
  }

  const double start_time = now_seconds();
  LpSolver lp(model);
  SplitMix64 rng(cfg.seed);

  Solution current = first_feasible(model, lp, cfg.first_feasible_limits);
  if (!clean(model, current)) {
    out.status = current.status == SolStatus::Infeasible
                     ? SolStatus::Infeasible
                     : SolStatus::LimitReached;
    out.best = std::move(current);
    return out;
  }

  TabuState tabu;
  tabu.tenure.assign(model.integer_vars.size(), 0);
  Solution best = current;

  for (int it = 1; it <= cfg.iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it;

    std::vector<Candidate> cands =
        make_candidates(model, lp, current, tabu, cfg, rng);
    for (const Candidate& c : cands) rec.selections.push_back(c.selected);
    rec.candidates_kept = static_cast<int>(cands.size());

    std::vector<int> modified;
    if (!cands.empty()) {
      const Candidate& top = cands.front();
      LocalSearchResult ls =
          local_search(model, lp, top.sol, tabu, cfg, rng);
      for (auto& sel : ls.selections) rec.selections.push_back(sel);

      if (ls.best.objective > best.objective + kImprove) best = ls.best;

      current = top.sol;  // the candidate-list best, not the LS result
      modified = top.selected;
      modified.insert(modified.end(), ls.accepted_modified.begin(),
                      ls.accepted_modified.end());
    }

    std::sort(modified.begin(), modified.end());
    modified.erase(std::unique(modified.begin(), modified.end()),
                   modified.end());
    for (std::size_t p = 0; p < tabu.tenure.size(); ++p) {
      if (tabu.tenure[p] > 0) --tabu.tenure[p];
    }
    for (int p : modified) tabu.tenure[p] = cfg.max_tenure;

    rec.modified = std::move(modified);
    rec.current_objective = current.objective;
    rec.best_objective = best.objective;
    rec.wall_seconds = now_seconds() - start_time;
    out.trace.push_back(std::move(rec));
  }

  out.best = std::move(best);
  out.best.stats.wall_seconds = now_seconds() - start_time;
  // Sub-solve optimality certifies only the sub-problem.
  if (out.best.status == SolStatus::Optimal)
    out.best.status = SolStatus::Feasible;
  out.status = out.best.status;
  return out;
}

}  // namespace maxband
