#include "maxband/model.hpp"

#include <cmath>
#include <stdexcept>

namespace maxband {

namespace {

// Guard against representation error before rounding an analytically
// integral-ish bound expression.
constexpr double kRoundGuard = 1e-9;

double floor_guarded(double x) { return std::floor(x + kRoundGuard); }
double ceil_guarded(double x) { return std::ceil(x - kRoundGuard); }

}  // namespace

double delta_value(int delta_out, int delta_in, double left_out,
                   double left_in) {
  return 0.5 * ((2 * delta_out - 1) * left_out - (2 * delta_in - 1) * left_in);
}

double psi_value(int delta_in_main, double left_in_main, int delta_in_cross,
                 double left_in_cross) {
  return 0.5 - 0.5 * ((2 * delta_in_cross - 1) * left_in_cross -
                      (2 * delta_in_main - 1) * left_in_main);
}

bool BoundTable::crossed() const {
  for (const auto& b : m_box)
    if (b[0] > b[1]) return true;
  for (const auto& b : c_box)
    if (b[0] > b[1]) return true;
  return false;
}

BoundTable compute_bounds(const Instance& inst, const CycleBasis& basis) {
  BoundTable table;
  const double t1 = inst.period_min, t2 = inst.period_max;

  // m boxes, one per edge in artery-major order.
  for (const auto& a : inst.net.arteries) {
    for (int i = 0; i + 1 < a.signal_count(); ++i) {
      const SignalTiming& si = inst.sig(a.id, i);
      const SignalTiming& sj = inst.sig(a.id, i + 1);
      const SegmentData& sg = inst.seg(a.id, i);
      const double reds =
          0.5 * (si.red_out + si.red_in) + 0.5 * (sj.red_out + sj.red_in);
      const double lefts =
          0.5 * (si.left_out + si.left_in) + 0.5 * (sj.left_out + sj.left_in);
      const double adv = sj.adv_out + si.adv_in;
      const double hi = 2.0 - reds + lefts - adv +
                        sg.dist_out / (sg.speed_min_out * t1) +
                        sg.dist_in / (sg.speed_min_in * t1);
      const double lo = -2.0 + reds - lefts - adv +
                        sg.dist_out / (sg.speed_max_out * t2) +
                        sg.dist_in / (sg.speed_max_in * t2);
      table.m_box.push_back({ceil_guarded(lo), floor_guarded(hi)});
    }
  }

  // C boxes from the span, offset, and intranode bounds of each cycle.
  for (const auto& cyc : basis.cycles) {
    std::vector<BoundTable::SpanBounds> spans;
    double c_hi = 0.0, c_lo = 0.0;
    for (const auto& seg : cyc.segments) {
      BoundTable::SpanBounds sb;
      double tau_tail = 0.0;
      for (int i = seg.first + 1; i <= seg.last; ++i)
        tau_tail += inst.sig(seg.artery, i).adv_out;
      double hi = 0.0, lo = 0.0;
      for (int i = seg.first; i < seg.last; ++i) {
        const SegmentData& sg = inst.seg(seg.artery, i);
        hi += sg.dist_out / (sg.speed_min_out * t1);
        lo += sg.dist_out / (sg.speed_max_out * t2);
      }
      sb.t_hi = hi - tau_tail;
      sb.t_lo = lo - tau_tail;
      const double red_ends = 0.5 * (inst.sig(seg.artery, seg.first).red_out +
                                     inst.sig(seg.artery, seg.last).red_out);
      sb.phi_hi = -red_ends + sb.t_hi + 1.0;
      sb.phi_lo = red_ends + sb.t_lo - 1.0;
      if (seg.dir == Dir::Forward) {
        c_hi += sb.phi_hi;
        c_lo += sb.phi_lo;
      } else {
        c_hi -= sb.phi_lo;
        c_lo -= sb.phi_hi;
      }
      spans.push_back(sb);
    }

    std::vector<std::array<double, 2>> psis;
    for (const auto& j : cyc.junctions) {
      const double lb = inst.sig(j.from_artery, j.from_signal).left_in;
      const double lc = inst.sig(j.to_artery, j.to_signal).left_in;
      const double hi = 0.5 * (1.0 + lc + lb);
      const double lo = 0.5 * (1.0 - lc - lb);
      c_hi += hi;
      c_lo += lo;
      psis.push_back({lo, hi});
    }

    table.c_box.push_back({ceil_guarded(c_lo), floor_guarded(c_hi)});
    table.span.push_back(std::move(spans));
    table.psi.push_back(std::move(psis));
  }
  return table;
}

int MilpModel::equality_count() const {
  int n = 0;
  for (const auto& r : rows)
    if (r.rel == Rel::Eq) ++n;
  return n;
}

namespace {

struct Builder {
  MilpModel model;

  int add_var(std::string name, VarRole role, Domain domain, double lb,
              double ub, int artery, int index) {
    const int id = model.var_count();
    model.vars.push_back(
        Variable{std::move(name), role, domain, lb, ub, artery, index});
    model.objective.push_back(0.0);
    if (domain != Domain::Continuous) model.integer_vars.push_back(id);
    return id;
  }

  Row& add_row(std::string name, Rel rel, double rhs) {
    model.rows.push_back(Row{std::move(name), {}, rel, rhs});
    return model.rows.back();
  }
};

std::string tag(const char* base, int a, int i) {
  return std::string(base) + "_" + std::to_string(a) + "_" + std::to_string(i);
}

}  // namespace

MilpModel build_model(const Instance& inst, const CycleBasis& basis,
                      bool tighten) {
  validate(inst);
  const GridNetwork& net = inst.net;
  for (const auto& cyc : basis.cycles) {
    for (const auto& seg : cyc.segments) {
      if (seg.artery < 0 || seg.artery >= net.artery_count() ||
          seg.last >= net.arteries[seg.artery].signal_count())
        throw std::invalid_argument("build_model: basis does not match network");
    }
  }

  Builder b;
  MilpModel& mdl = b.model;
  mdl.bounds = compute_bounds(inst, basis);
  mdl.tightened = tighten;

  // Variables. z first, then per-artery blocks, then cycle integers.
  mdl.var_z = b.add_var("z", VarRole::Z, Domain::Continuous,
                        1.0 / inst.period_max, 1.0 / inst.period_min, -1, -1);

  mdl.band.resize(net.artery_count());
  mdl.w.resize(net.artery_count());
  mdl.t.resize(net.artery_count());
  mdl.m.resize(net.artery_count());
  mdl.delta.resize(net.artery_count());

  for (const auto& a : net.arteries) {
    double min_green_out = 1.0, min_green_in = 1.0;
    for (int i = 0; i < a.signal_count(); ++i) {
      min_green_out = std::min(min_green_out, 1.0 - inst.sig(a.id, i).red_out);
      min_green_in = std::min(min_green_in, 1.0 - inst.sig(a.id, i).red_in);
    }
    mdl.band[a.id] = {
        b.add_var(tag("b", a.id, 0), VarRole::BandOut, Domain::Continuous, 0.0,
                  min_green_out, a.id, -1),
        b.add_var(tag("bb", a.id, 0), VarRole::BandIn, Domain::Continuous, 0.0,
                  min_green_in, a.id, -1)};
  }
  for (const auto& a : net.arteries) {
    mdl.w[a.id].resize(a.signal_count());
    for (int i = 0; i < a.signal_count(); ++i) {
      const SignalTiming& s = inst.sig(a.id, i);
      mdl.w[a.id][i] = {b.add_var(tag("w", a.id, i), VarRole::WOut,
                                  Domain::Continuous, 0.0, 1.0 - s.red_out,
                                  a.id, i),
                        b.add_var(tag("wb", a.id, i), VarRole::WIn,
                                  Domain::Continuous, 0.0, 1.0 - s.red_in,
                                  a.id, i)};
    }
  }
  for (const auto& a : net.arteries) {
    mdl.t[a.id].resize(a.segment_count());
    for (int i = 0; i < a.segment_count(); ++i) {
      const SegmentData& s = inst.seg(a.id, i);
      // Constant envelopes implied by the speed window and the period range.
      mdl.t[a.id][i] = {
          b.add_var(tag("t", a.id, i), VarRole::TOut, Domain::Continuous,
                    s.dist_out / (s.speed_max_out * inst.period_max),
                    s.dist_out / (s.speed_min_out * inst.period_min), a.id, i),
          b.add_var(tag("tb", a.id, i), VarRole::TIn, Domain::Continuous,
                    s.dist_in / (s.speed_max_in * inst.period_max),
                    s.dist_in / (s.speed_min_in * inst.period_min), a.id, i)};
    }
  }
  int edge_pos = 0;
  for (const auto& a : net.arteries) {
    mdl.m[a.id].resize(a.segment_count());
    for (int i = 0; i < a.segment_count(); ++i) {
      double lo = -kInf, hi = kInf;
      if (tighten) {
        lo = mdl.bounds.m_box[edge_pos][0];
        hi = mdl.bounds.m_box[edge_pos][1];
      }
      mdl.m[a.id][i] = b.add_var(tag("m", a.id, i), VarRole::M,
                                 Domain::Integer, lo, hi, a.id, i);
      ++edge_pos;
    }
  }
  for (const auto& a : net.arteries) {
    mdl.delta[a.id].resize(a.signal_count());
    for (int i = 0; i < a.signal_count(); ++i) {
      mdl.delta[a.id][i] = {b.add_var(tag("d", a.id, i), VarRole::DeltaOut,
                                      Domain::Binary, 0.0, 1.0, a.id, i),
                            b.add_var(tag("db", a.id, i), VarRole::DeltaIn,
                                      Domain::Binary, 0.0, 1.0, a.id, i)};
    }
  }
  for (int c = 0; c < static_cast<int>(basis.cycles.size()); ++c) {
    double lo = -kInf, hi = kInf;
    if (tighten) {
      lo = mdl.bounds.c_box[c][0];
      hi = mdl.bounds.c_box[c][1];
    }
    mdl.cycle_c.push_back(
        b.add_var(tag("C", c, 0), VarRole::CycleC, Domain::Integer, lo, hi, c,
                  -1));
  }

  mdl.infeasible_by_bounds = tighten && mdl.bounds.crossed();

  // Objective: weighted bandwidth over both directions.
  for (const auto& a : net.arteries) {
    mdl.objective[mdl.band[a.id][0]] = inst.weight_out[a.id];
    mdl.objective[mdl.band[a.id][1]] = inst.weight_in[a.id];
  }

  // Arterial loop equality per street segment. The internode geometry gives
  //   (w_i + wb_i) - (w_j + wb_j) + t_i + tb_i + D_i - D_j
  //     + (r_i + rb_i)/2 - (r_j + rb_j)/2 - (tau_j + taub_i) = m_i
  // with D expanded through the pattern bits; the bit-free part of D moves
  // to the right-hand side.
  for (const auto& a : net.arteries) {
    for (int i = 0; i + 1 < a.signal_count(); ++i) {
      const int j = i + 1;
      const SignalTiming& si = inst.sig(a.id, i);
      const SignalTiming& sj = inst.sig(a.id, j);
      Row& row = b.add_row(tag("loop", a.id, i), Rel::Eq, 0.0);
      row.coeffs = {{mdl.w[a.id][i][0], 1.0},  {mdl.w[a.id][i][1], 1.0},
                    {mdl.w[a.id][j][0], -1.0}, {mdl.w[a.id][j][1], -1.0},
                    {mdl.t[a.id][i][0], 1.0},  {mdl.t[a.id][i][1], 1.0},
                    {mdl.delta[a.id][i][0], si.left_out},
                    {mdl.delta[a.id][i][1], -si.left_in},
                    {mdl.delta[a.id][j][0], -sj.left_out},
                    {mdl.delta[a.id][j][1], sj.left_in},
                    {mdl.m[a.id][i], -1.0}};
      const double constant =
          0.5 * (si.red_out + si.red_in) - 0.5 * (sj.red_out + sj.red_in) -
          (sj.adv_out + si.adv_in) - 0.5 * (si.left_out - si.left_in) +
          0.5 * (sj.left_out - sj.left_in);
      row.rhs = -constant;
    }
  }

  // Network loop equality per basis cycle: forward spans add their internode
  // offsets, backward spans subtract them, and each junction contributes the
  // intranode offset expanded through the inbound pattern bits.
  for (int c = 0; c < static_cast<int>(basis.cycles.size()); ++c) {
    const Cycle& cyc = basis.cycles[c];
    Row& row = b.add_row(tag("cycle", c, 0), Rel::Eq, 0.0);
    double constant = 0.0;
    for (const auto& seg : cyc.segments) {
      const double sign = seg.dir == Dir::Forward ? 1.0 : -1.0;
      row.coeffs.emplace_back(mdl.w[seg.artery][seg.first][0], sign);
      row.coeffs.emplace_back(mdl.w[seg.artery][seg.last][0], -sign);
      for (int i = seg.first; i < seg.last; ++i)
        row.coeffs.emplace_back(mdl.t[seg.artery][i][0], sign);
      double tau_tail = 0.0;
      for (int i = seg.first + 1; i <= seg.last; ++i)
        tau_tail += inst.sig(seg.artery, i).adv_out;
      constant += sign * (0.5 * inst.sig(seg.artery, seg.first).red_out -
                          0.5 * inst.sig(seg.artery, seg.last).red_out -
                          tau_tail);
    }
    for (const auto& j : cyc.junctions) {
      const double lb = inst.sig(j.from_artery, j.from_signal).left_in;
      const double lc = inst.sig(j.to_artery, j.to_signal).left_in;
      row.coeffs.emplace_back(mdl.delta[j.from_artery][j.from_signal][1], lb);
      row.coeffs.emplace_back(mdl.delta[j.to_artery][j.to_signal][1], -lc);
      constant += 0.5 + 0.5 * lc - 0.5 * lb;
    }
    row.coeffs.emplace_back(mdl.cycle_c[c], -1.0);
    row.rhs = -constant;
  }

  // Green containment per signal and direction.
  for (const auto& a : net.arteries) {
    for (int i = 0; i < a.signal_count(); ++i) {
      const SignalTiming& s = inst.sig(a.id, i);
      Row& out = b.add_row(tag("green", a.id, i), Rel::Le, 1.0 - s.red_out);
      out.coeffs = {{mdl.w[a.id][i][0], 1.0}, {mdl.band[a.id][0], 1.0}};
      Row& in = b.add_row(tag("greenb", a.id, i), Rel::Le, 1.0 - s.red_in);
      in.coeffs = {{mdl.w[a.id][i][1], 1.0}, {mdl.band[a.id][1], 1.0}};
    }
  }

  // Speed windows: (d/f) z <= t <= (d/e) z per segment and direction.
  for (const auto& a : net.arteries) {
    for (int i = 0; i < a.segment_count(); ++i) {
      const SegmentData& s = inst.seg(a.id, i);
      for (int dir = 0; dir < 2; ++dir) {
        const double d = dir == 0 ? s.dist_out : s.dist_in;
        const double e = dir == 0 ? s.speed_min_out : s.speed_min_in;
        const double f = dir == 0 ? s.speed_max_out : s.speed_max_in;
        const int tv = mdl.t[a.id][i][dir];
        Row& lo = b.add_row(tag(dir == 0 ? "vlo" : "vlob", a.id, i), Rel::Ge,
                            0.0);
        lo.coeffs = {{tv, 1.0}, {mdl.var_z, -d / f}};
        Row& hi = b.add_row(tag(dir == 0 ? "vhi" : "vhib", a.id, i), Rel::Le,
                            0.0);
        hi.coeffs = {{tv, 1.0}, {mdl.var_z, -d / e}};
      }
    }
  }

  // Speed-change windows between consecutive segments (emitted only when the
  // artery has at least three signals):
  //   d_i/h_i z <= (d_i/d_{i+1}) t_{i+1} - t_i <= d_i/g_i z.
  for (const auto& a : net.arteries) {
    for (int i = 0; i + 1 < a.segment_count(); ++i) {
      for (int dir = 0; dir < 2; ++dir) {
        const SegmentData& s = inst.seg(a.id, i);
        const SegmentData& sn = inst.seg(a.id, i + 1);
        const double d = dir == 0 ? s.dist_out : s.dist_in;
        const double dn = dir == 0 ? sn.dist_out : sn.dist_in;
        const double lo_slope =
            dir == 0 ? s.dv_recip_lo_out : s.dv_recip_lo_in;  // 1/h
        const double hi_slope =
            dir == 0 ? s.dv_recip_hi_out : s.dv_recip_hi_in;  // 1/g
        const int ti = mdl.t[a.id][i][dir];
        const int tn = mdl.t[a.id][i + 1][dir];
        Row& lo = b.add_row(tag(dir == 0 ? "dvlo" : "dvlob", a.id, i), Rel::Ge,
                            0.0);
        lo.coeffs = {{tn, d / dn}, {ti, -1.0}, {mdl.var_z, -d * lo_slope}};
        Row& hi = b.add_row(tag(dir == 0 ? "dvhi" : "dvhib", a.id, i), Rel::Le,
                            0.0);
        hi.coeffs = {{tn, d / dn}, {ti, -1.0}, {mdl.var_z, -d * hi_slope}};
      }
    }
  }

  return b.model;
}

std::vector<std::array<double, 2>> integer_boxes(const MilpModel& model) {
  std::vector<std::array<double, 2>> box(model.var_count());
  for (int v = 0; v < model.var_count(); ++v)
    box[v] = {model.vars[v].lb, model.vars[v].ub};
  int pos = 0;
  for (const auto& per_artery : model.m) {
    for (int v : per_artery) {
      box[v][0] = std::max(box[v][0], model.bounds.m_box[pos][0]);
      box[v][1] = std::min(box[v][1], model.bounds.m_box[pos][1]);
      ++pos;
    }
  }
  for (std::size_t c = 0; c < model.cycle_c.size(); ++c) {
    const int v = model.cycle_c[c];
    box[v][0] = std::max(box[v][0], model.bounds.c_box[c][0]);
    box[v][1] = std::min(box[v][1], model.bounds.c_box[c][1]);
  }
  return box;
}

AuditReport audit_solution(const MilpModel& model, const std::vector<double>& x,
                           double tol) {
  AuditReport rep;
  if (static_cast<int>(x.size()) != model.var_count()) {
    rep.failures.push_back("assignment size " + std::to_string(x.size()) +
                           " != variable count " +
                           std::to_string(model.var_count()));
    return rep;
  }
  for (int v = 0; v < model.var_count(); ++v) {
    if (!std::isfinite(x[v])) {
      rep.failures.push_back("variable " + model.vars[v].name +
                             " is not finite");
      return rep;
    }
  }

  for (int v = 0; v < model.var_count(); ++v) {
    const Variable& var = model.vars[v];
    double viol = 0.0;
    if (var.lb > -kInf) viol = std::max(viol, var.lb - x[v]);
    if (var.ub < kInf) viol = std::max(viol, x[v] - var.ub);
    if (viol > rep.max_bound_violation) rep.max_bound_violation = viol;
    if (viol > tol)
      rep.failures.push_back("bound violated on " + var.name + " by " +
                             std::to_string(viol));
    if (var.domain != Domain::Continuous) {
      const double resid = std::fabs(x[v] - std::round(x[v]));
      if (resid > rep.max_integrality_residual)
        rep.max_integrality_residual = resid;
      if (resid > tol)
        rep.failures.push_back("integrality violated on " + var.name +
                               " residual " + std::to_string(resid));
    }
  }

  for (const Row& row : model.rows) {
    double lhs = 0.0;
    for (const auto& [v, c] : row.coeffs) lhs += c * x[v];
    double viol = 0.0;
    switch (row.rel) {
      case Rel::Le: viol = lhs - row.rhs; break;
      case Rel::Ge: viol = row.rhs - lhs; break;
      case Rel::Eq: viol = std::fabs(lhs - row.rhs); break;
    }
    viol = std::max(viol, 0.0);
    if (viol > rep.max_row_violation) rep.max_row_violation = viol;
    if (viol > tol)
      rep.failures.push_back("row " + row.name + " violated by " +
                             std::to_string(viol));
  }

  for (int v = 0; v < model.var_count(); ++v)
    rep.objective += model.objective[v] * x[v];
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace maxband
