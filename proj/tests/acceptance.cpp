// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria run in order; the feasibility-audit criterion (6)
// aggregates the audits performed on every solution produced by the others.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "maxband/bench.hpp"
#include "maxband/bnb.hpp"
#include "maxband/tabu.hpp"

using namespace maxband;
using maxband::testing::cycle_offset_sum;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct AuditTally {
  long long checked = 0;
  long long failures = 0;
  std::vector<std::string> notes;

  void check(const MilpModel& model, const std::vector<double>& x,
             const std::string& what) {
    ++checked;
    const AuditReport rep = audit_solution(model, x, 1e-6);
    if (!rep.pass) {
      ++failures;
      if (notes.size() < 5)
        notes.push_back(what + ": " + (rep.failures.empty()
                                           ? "unknown"
                                           : rep.failures.front()));
    }
  }

  void check_cycles(const Instance& inst, const CycleBasis& basis,
                    const MilpModel& model, const std::vector<double>& x,
                    const std::string& what) {
    for (std::size_t c = 0; c < basis.cycles.size(); ++c) {
      ++checked;
      const double lhs = cycle_offset_sum(inst, basis, model, static_cast<int>(c), x);
      if (std::fabs(lhs - std::round(lhs)) > 1e-6) {
        ++failures;
        if (notes.size() < 5)
          notes.push_back(what + ": cycle " + std::to_string(c) +
                          " offset sum " + std::to_string(lhs));
      }
    }
  }
};

AuditTally g_audit;
int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL",
              criterion, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// --- criterion 1: model-size goldens --------------------------------------

bool criterion1(std::string& detail) {
  struct Golden {
    int n, eq, m, c, d, ints;
  };
  const Golden golds[] = {
      {3, 16, 12, 4, 36, 52},       {5, 56, 40, 16, 100, 156},
      {6, 85, 60, 25, 144, 229},    {7, 120, 84, 36, 196, 316},
      {8, 161, 112, 49, 256, 417},  {9, 208, 144, 64, 324, 532},
      {10, 261, 180, 81, 400, 661}, {15, 616, 420, 196, 900, 1516},
      {20, 1121, 760, 361, 1600, 2721},
  };
  for (const auto& g : golds) {
    const GridNetwork net = build_grid(g.n, g.n);
    const Instance inst = generate_instance(net, 1234);
    const MilpModel model =
        build_model(inst, fundamental_cycle_basis(net), true);
    int m_count = 0, d_count = 0, c_count = 0;
    for (int v : model.integer_vars) {
      switch (model.vars[v].role) {
        case VarRole::M: ++m_count; break;
        case VarRole::CycleC: ++c_count; break;
        default: ++d_count; break;
      }
    }
    if (model.equality_count() != g.eq || m_count != g.m || c_count != g.c ||
        d_count != g.d || static_cast<int>(model.integer_vars.size()) != g.ints) {
      detail = "size mismatch at " + std::to_string(g.n) + "x" +
               std::to_string(g.n);
      return false;
    }
  }
  detail = "all nine grid sizes match (equalities, m, C, pattern bits, integers)";
  return true;
}

// --- criterion 2: pattern-table equivalence --------------------------------

bool criterion2(std::string& detail) {
  constexpr std::array<std::array<int, 2>, 4> bits = {
      {{0, 1}, {1, 0}, {0, 0}, {1, 1}}};
  SplitMix64 rng(20250809);
  for (int trial = 0; trial < 100; ++trial) {
    const double l = rng.uniform(0.0, 0.5);
    const double lb = rng.uniform(0.0, 0.5);
    const double expected_delta[4] = {-(l + lb) / 2, (l + lb) / 2,
                                      -(l - lb) / 2, (l - lb) / 2};
    for (int p = 0; p < 4; ++p) {
      if (std::fabs(delta_value(bits[p][0], bits[p][1], l, lb) -
                    expected_delta[p]) > 1e-12) {
        detail = "delta mismatch on pattern " + std::to_string(p + 1);
        return false;
      }
    }
    for (int pm = 0; pm < 4; ++pm) {
      for (int pc = 0; pc < 4; ++pc) {
        const int dbm = bits[pm][1], dbc = bits[pc][1];
        double expected;
        if (dbm == 1 && dbc == 1) expected = (1 - lb + l) / 2;
        else if (dbm == 0 && dbc == 1) expected = (1 - lb - l) / 2;
        else if (dbm == 1 && dbc == 0) expected = (1 + lb + l) / 2;
        else expected = (1 + lb - l) / 2;
        // main turn l, cross turn lb
        if (std::fabs(psi_value(dbm, l, dbc, lb) - expected) > 1e-12) {
          detail = "psi mismatch on pattern pair (" + std::to_string(pm + 1) +
                   "," + std::to_string(pc + 1) + ")";
          return false;
        }
      }
    }
  }
  detail = "4 delta rows and 16 psi cells hold on 100 random pairs at 1e-12";
  return true;
}

// --- criterion 3: oracle equivalence ---------------------------------------

Instance grid22_with_turns(std::uint64_t seed, int turn_signals) {
  Instance inst = generate_instance(build_grid(2, 2), seed);
  int kept = 0;
  for (auto& per_artery : inst.signals)
    for (auto& t : per_artery)
      if (kept++ >= turn_signals) t.left_out = t.left_in = 0.0;
  return inst;
}

bool criterion3(std::string& detail) {
  double max_diff = 0.0;
  for (int k = 0; k < 20; ++k) {
    Instance inst;
    CycleBasis basis;
    std::string what;
    if (k < 8) {
      inst = generate_instance(single_artery(2 + k % 2), 9000 + k);
      what = "artery#" + std::to_string(k);
    } else if (k < 14) {
      inst = grid22_with_turns(9100 + k, 0);
      basis = fundamental_cycle_basis(inst.net);
      what = "grid-noturn#" + std::to_string(k);
    } else {
      inst = grid22_with_turns(9200 + k, 2);
      basis = fundamental_cycle_basis(inst.net);
      what = "grid-turns#" + std::to_string(k);
    }
    const MilpModel model = build_model(inst, basis, true);
    const Solution exact = branch_and_bound(model);
    const Solution oracle = brute_force_oracle(model);
    if (exact.status != SolStatus::Optimal ||
        oracle.status != SolStatus::Optimal) {
      detail = what + ": solver status not optimal";
      return false;
    }
    g_audit.check(model, exact.x, what + " bnb");
    g_audit.check(model, oracle.x, what + " oracle");
    if (!basis.cycles.empty())
      g_audit.check_cycles(inst, basis, model, exact.x, what);
    const double diff = std::fabs(exact.objective - oracle.objective);
    max_diff = std::max(max_diff, diff);
    if (diff > 1e-6) {
      detail = what + ": |bnb - oracle| = " + std::to_string(diff);
      return false;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "20 instances agree with the oracle, max gap %.1e", max_diff);
  detail = buf;
  return true;
}

// --- criterion 4: bound validity -------------------------------------------

bool criterion4(std::string& detail) {
  double max_diff = 0.0;
  for (int k = 0; k < 20; ++k) {
    const GridNetwork net = build_grid(3, 3);
    const Instance inst = generate_instance(net, 4000 + k);
    const CycleBasis basis = fundamental_cycle_basis(net);
    const MilpModel tight = build_model(inst, basis, true);
    const MilpModel loose = build_model(inst, basis, false);

    const Solution st = branch_and_bound(tight);
    const Solution sl = branch_and_bound(loose);
    if (st.status != SolStatus::Optimal || sl.status != SolStatus::Optimal) {
      detail = "seed " + std::to_string(4000 + k) + ": not solved to optimality";
      return false;
    }
    g_audit.check(tight, st.x, "c4 tight");
    g_audit.check(loose, sl.x, "c4 loose");
    g_audit.check_cycles(inst, basis, tight, st.x, "c4 tight");
    g_audit.check_cycles(inst, basis, loose, sl.x, "c4 loose");

    const double diff = std::fabs(st.objective - sl.objective);
    max_diff = std::max(max_diff, diff);
    if (diff > 1e-6) {
      detail = "seed " + std::to_string(4000 + k) +
               ": tighten changed the optimum by " + std::to_string(diff);
      return false;
    }
    const auto boxes = integer_boxes(tight);
    for (int v : loose.integer_vars) {
      const double val = std::round(sl.x[v]);
      if (val < boxes[v][0] - 1e-9 || val > boxes[v][1] + 1e-9) {
        detail = "seed " + std::to_string(4000 + k) + ": optimal " +
                 loose.vars[v].name + "=" + std::to_string(val) +
                 " escapes its box";
        return false;
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "20 seeded 3x3: tighten-neutral (max %.1e), optima inside boxes",
                max_diff);
  detail = buf;
  return true;
}

// --- criterion 5: heuristic quality ----------------------------------------

bool criterion5(std::string& detail) {
  // 3x3 clause: median-of-10 LSVNS within 90% of the exact optimum.
  double worst_ratio = 2.0;
  for (int k = 0; k < 5; ++k) {
    const GridNetwork net = build_grid(3, 3);
    const Instance inst = generate_instance(net, 6100 + k);
    const CycleBasis basis = fundamental_cycle_basis(net);
    const MilpModel model = build_model(inst, basis, true);
    const Solution exact = branch_and_bound(model);
    if (exact.status != SolStatus::Optimal) {
      detail = "3x3 seed " + std::to_string(6100 + k) + ": exact solve failed";
      return false;
    }
    g_audit.check(model, exact.x, "c5 exact");

    std::vector<double> ofs;
    for (int rep = 0; rep < 10; ++rep) {
      HeuristicConfig cfg;
      cfg.iterations = 30;
      cfg.size_list = 10;
      cfg.max_tenure = 3;
      cfg.ls_iterations = 10;
      cfg.rm = cfg.rd = cfg.rc = 4;
      cfg.variant = HeuristicConfig::Variant::LSVNS;
      cfg.seed = 7000 + rep;
      const TsilpResult res = tsilp(model, cfg);
      if (!res.best.has_solution()) {
        detail = "3x3 heuristic run found no solution";
        return false;
      }
      g_audit.check(model, res.best.x, "c5 lsvns 3x3");
      g_audit.check_cycles(inst, basis, model, res.best.x, "c5 lsvns 3x3");
      ofs.push_back(res.best.objective);
    }
    std::sort(ofs.begin(), ofs.end());
    const double median = 0.5 * (ofs[4] + ofs[5]);
    worst_ratio = std::min(worst_ratio, median / exact.objective);
    if (median < 0.90 * exact.objective) {
      detail = "3x3 seed " + std::to_string(6100 + k) + ": median " +
               std::to_string(median) + " < 0.90 * " +
               std::to_string(exact.objective);
      return false;
    }
  }

  // 6x6 clause: best-of-10 LSVNS at least matches best-of-10 LSF.
  for (int k = 0; k < 3; ++k) {
    const GridNetwork net = build_grid(6, 6);
    const Instance inst = generate_instance(net, 6200 + k);
    const CycleBasis basis = fundamental_cycle_basis(net);
    const MilpModel model = build_model(inst, basis, true);
    double best_lsf = -1.0, best_lsvns = -1.0;
    for (const auto variant :
         {HeuristicConfig::Variant::LSF, HeuristicConfig::Variant::LSVNS}) {
      double best = -1.0;
      for (int rep = 0; rep < 10; ++rep) {
        HeuristicConfig cfg;
        cfg.iterations = 6;
        cfg.size_list = 4;
        cfg.max_tenure = 3;
        cfg.ls_iterations = 4;
        cfg.rm = cfg.rd = cfg.rc = 3;
        cfg.variant = variant;
        cfg.seed = 7100 + rep;
        cfg.candidate_limits.node_budget = 15;
        cfg.ls_limits.node_budget = 25;
        const TsilpResult res = tsilp(model, cfg);
        if (!res.best.has_solution()) {
          detail = "6x6 heuristic run found no solution";
          return false;
        }
        g_audit.check(model, res.best.x, "c5 6x6");
        best = std::max(best, res.best.objective);
      }
      (variant == HeuristicConfig::Variant::LSF ? best_lsf : best_lsvns) = best;
    }
    if (best_lsvns < best_lsf - 1e-9) {
      detail = "6x6 seed " + std::to_string(6200 + k) + ": best LSVNS " +
               std::to_string(best_lsvns) + " below best LSF " +
               std::to_string(best_lsf);
      return false;
    }
  }

  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "3x3 median ratio >= %.3f on 5 instances; LSVNS >= LSF on 3 6x6",
                worst_ratio);
  detail = buf;
  return true;
}

// --- criterion 7: determinism ----------------------------------------------

bool criterion7(std::string& detail) {
  const GridNetwork net = build_grid(3, 3);
  const Instance inst = generate_instance(net, 6500);
  const MilpModel model =
      build_model(inst, fundamental_cycle_basis(net), true);

  HeuristicConfig cfg;
  cfg.iterations = 10;
  cfg.size_list = 5;
  cfg.max_tenure = 3;
  cfg.ls_iterations = 5;
  cfg.rm = cfg.rd = cfg.rc = 3;
  cfg.seed = 424242;
  cfg.candidate_limits.node_budget = 2000;
  cfg.ls_limits.node_budget = 3000;
  const TsilpResult a = tsilp(model, cfg);
  const TsilpResult b = tsilp(model, cfg);
  if (a.trace.size() != b.trace.size()) {
    detail = "trace lengths differ";
    return false;
  }
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    if (a.trace[i].best_objective != b.trace[i].best_objective ||
        a.trace[i].current_objective != b.trace[i].current_objective ||
        a.trace[i].selections != b.trace[i].selections ||
        a.trace[i].modified != b.trace[i].modified) {
      detail = "trace diverges at iteration " + std::to_string(i + 1);
      return false;
    }
  }
  if (a.best.objective != b.best.objective) {
    detail = "final objectives differ";
    return false;
  }
  g_audit.check(model, a.best.x, "c7 run");

  // CSV determinism with the timing columns blanked.
  ExperimentSpec spec;
  spec.sizes = {{2, 2}};
  spec.instances_per_size = 1;
  spec.instance_seed_base = 650;
  spec.repetitions = 2;
  spec.run_seed_base = 6600;
  spec.configs = {{3, 2, 2, 2, 1, 1, 1}};
  spec.variants = {HeuristicConfig::Variant::LSVNS};
  spec.candidate_limits.node_budget = 2000;
  spec.ls_limits.node_budget = 3000;
  auto strip = [](std::string csv) {
    // Blank columns 16 (avgt_s), 17 (build_s), 19 (exact_t_s).
    std::string out;
    std::string line;
    for (std::size_t pos = 0; pos <= csv.size(); ++pos) {
      if (pos == csv.size() || csv[pos] == '\n') {
        int col = 0;
        std::string cleaned;
        std::string field;
        for (std::size_t i = 0; i <= line.size(); ++i) {
          if (i == line.size() || line[i] == ',') {
            if (col == 16 || col == 17 || col == 19) field = "-";
            cleaned += (col == 0 ? "" : ",") + field;
            field.clear();
            ++col;
          } else {
            field += line[i];
          }
        }
        out += cleaned + "\n";
        line.clear();
      } else {
        line += csv[pos];
      }
    }
    return out;
  };
  const std::string csv_a = strip(results_to_csv(run_experiments(spec)));
  const std::string csv_b = strip(results_to_csv(run_experiments(spec)));
  if (csv_a != csv_b) {
    detail = "bench CSV differs between identically seeded runs";
    return false;
  }
  detail = "identical traces and CSV (timing columns excluded) across reruns";
  return true;
}

// --- criterion 8: tenure property ------------------------------------------

bool criterion8(std::string& detail) {
  const GridNetwork net = build_grid(5, 5);
  const Instance inst = generate_instance(net, 6700);
  const MilpModel model =
      build_model(inst, fundamental_cycle_basis(net), true);

  for (const std::uint64_t seed : {31337ULL, 424243ULL}) {
    HeuristicConfig cfg;
    cfg.iterations = 200;
    cfg.size_list = 3;
    cfg.max_tenure = 4;
    cfg.ls_iterations = 2;
    cfg.rm = cfg.rd = cfg.rc = 3;
    cfg.seed = seed;
    cfg.candidate_limits.node_budget = 15;
    cfg.ls_limits.node_budget = 25;
    const TsilpResult res = tsilp(model, cfg);
    if (!res.best.has_solution() || res.trace.size() != 200) {
      detail = "200-iteration run did not complete";
      return false;
    }
    g_audit.check(model, res.best.x, "c8 run");

    // Replay tenures from the trace and verify no positive-tenure draw, and
    // that refreshed variables stay unselected for max_tenure iterations.
    std::vector<int> tenure(model.integer_vars.size(), 0);
    std::vector<int> last_modified(model.integer_vars.size(), -1000);
    int it = 0;
    for (const auto& rec : res.trace) {
      ++it;
      for (const auto& sel : rec.selections) {
        for (const int p : sel) {
          if (tenure[p] != 0) {
            detail = "variable drawn with tenure " + std::to_string(tenure[p]) +
                     " at iteration " + std::to_string(it);
            return false;
          }
          if (it - last_modified[p] <= cfg.max_tenure) {
            detail = "variable re-modified " +
                     std::to_string(it - last_modified[p]) +
                     " iterations after refresh";
            return false;
          }
        }
      }
      for (auto& t : tenure)
        if (t > 0) --t;
      for (const int p : rec.modified) {
        tenure[p] = cfg.max_tenure;
        last_modified[p] = it;
      }
    }
  }
  detail = "2 fuzzed 200-iteration runs on 5x5: no positive-tenure selection";
  return true;
}

// --- criterion 6: aggregated audits ----------------------------------------

bool criterion6(std::string& detail) {
  if (g_audit.checked == 0) {
    detail = "no solutions were audited";
    return false;
  }
  if (g_audit.failures > 0) {
    detail = std::to_string(g_audit.failures) + "/" +
             std::to_string(g_audit.checked) + " audits failed; first: " +
             g_audit.notes.front();
    return false;
  }
  detail = "all " + std::to_string(g_audit.checked) +
           " audited solutions pass at 1e-6 (rows, bounds, integrality, "
           "cycle offsets)";
  return true;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    bool (*fn)(std::string&);
  };
  // Criterion 6 aggregates the audits of everything before it.
  const Entry entries[] = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                           {4, criterion4}, {5, criterion5}, {7, criterion7},
                           {8, criterion8}, {6, criterion6}};
  struct Line {
    int id;
    bool pass;
    std::string detail;
    double seconds;
  };
  std::vector<Line> lines;
  for (const auto& e : entries) {
    const double t0 = now_seconds();
    std::string detail;
    bool pass = false;
    try {
      pass = e.fn(detail);
    } catch (const std::exception& ex) {
      detail = std::string("exception: ") + ex.what();
    }
    lines.push_back({e.id, pass, detail, now_seconds() - t0});
  }
  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.id < b.id; });
  for (const auto& l : lines) report(l.id, l.pass, l.detail, l.seconds);
  if (g_failures == 0) {
    std::printf("acceptance: all 8 criteria pass\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
