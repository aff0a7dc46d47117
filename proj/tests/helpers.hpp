#pragma once

#include <cmath>
#include <vector>

#include "maxband/model.hpp"

namespace maxband::testing {

// Uniform symmetric instance over any network; handy reductions for hand
// checks (red 0.5 everywhere by default, no left turns, no advancement).
inline Instance uniform_instance(const GridNetwork& net, double red,
                                 double left, double dist, double speed_min,
                                 double speed_max, double t1, double t2) {
  Instance inst;
  inst.net = net;
  inst.period_min = t1;
  inst.period_max = t2;
  inst.weight_out.assign(net.artery_count(), 1.0);
  inst.weight_in.assign(net.artery_count(), 1.0);
  inst.signals.resize(net.artery_count());
  inst.segments.resize(net.artery_count());
  for (const auto& a : net.arteries) {
    inst.signals[a.id].resize(a.signal_count());
    for (auto& t : inst.signals[a.id]) {
      t.red_out = t.red_in = red;
      t.left_out = t.left_in = left;
      t.adv_out = t.adv_in = 0.0;
    }
    inst.segments[a.id].resize(a.segment_count());
    for (auto& s : inst.segments[a.id]) {
      s.dist_out = s.dist_in = dist;
      s.speed_min_out = s.speed_min_in = speed_min;
      s.speed_max_out = s.speed_max_in = speed_max;
      s.dv_recip_lo_out = s.dv_recip_lo_in = -0.012;
      s.dv_recip_hi_out = s.dv_recip_hi_in = 0.012;
    }
  }
  return inst;
}

// Independent expansion of one cycle equality's left side from the instance
// data and an assignment: internode offsets from w/t/red/tau along each run,
// intranode offsets from the inbound pattern bits. Feasibility forces this
// to be an integer.
inline double cycle_offset_sum(const Instance& inst, const CycleBasis& basis,
                               const MilpModel& model, int cycle_index,
                               const std::vector<double>& x) {
  const Cycle& cyc = basis.cycles[cycle_index];
  double sum = 0.0;
  for (const auto& seg : cyc.segments) {
    double phi = 0.5 * inst.sig(seg.artery, seg.first).red_out +
                 x[model.w[seg.artery][seg.first][0]] -
                 0.5 * inst.sig(seg.artery, seg.last).red_out -
                 x[model.w[seg.artery][seg.last][0]];
    for (int i = seg.first; i < seg.last; ++i)
      phi += x[model.t[seg.artery][i][0]];
    for (int i = seg.first + 1; i <= seg.last; ++i)
      phi -= inst.sig(seg.artery, i).adv_out;
    sum += seg.dir == Dir::Forward ? phi : -phi;
  }
  for (const auto& j : cyc.junctions) {
    const int bit_main =
        static_cast<int>(std::lround(x[model.delta[j.from_artery][j.from_signal][1]]));
    const int bit_cross =
        static_cast<int>(std::lround(x[model.delta[j.to_artery][j.to_signal][1]]));
    sum += psi_value(bit_main, inst.sig(j.from_artery, j.from_signal).left_in,
                     bit_cross, inst.sig(j.to_artery, j.to_signal).left_in);
  }
  return sum;
}

}  // namespace maxband::testing
