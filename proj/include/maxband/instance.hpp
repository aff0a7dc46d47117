#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxband/grid.hpp"

namespace maxband {

// Per-signal timing, all in fractions of the period.
struct SignalTiming {
  double red_out = 0.5, red_in = 0.5;    // r, r-bar
  double left_out = 0.0, left_in = 0.0;  // l, l-bar (left-turn phase)
  double adv_out = 0.0, adv_in = 0.0;    // tau, tau-bar (band advancement)
};

// Per-segment geometry and speed windows. Distances in meters, speeds in
// meters/second, reciprocal-speed-change window in (meters/second)^-1.
struct SegmentData {
  double dist_out = 0.0, dist_in = 0.0;        // d, d-bar
  double speed_min_out = 0.0, speed_max_out = 0.0;  // e, f
  double speed_min_in = 0.0, speed_max_in = 0.0;    // e-bar, f-bar
  // Window on d*(1/v_{i+1} - 1/v_i): lower slope 1/h, upper slope 1/g.
  double dv_recip_lo_out = 0.0, dv_recip_hi_out = 0.0;
  double dv_recip_lo_in = 0.0, dv_recip_hi_in = 0.0;
};

struct Instance {
  GridNetwork net;
  double period_min = 0.0;  // T1, seconds
  double period_max = 0.0;  // T2, seconds
  std::vector<std::vector<SignalTiming>> signals;   // [artery][signal]
  std::vector<std::vector<SegmentData>> segments;   // [artery][segment]
  std::vector<double> weight_out, weight_in;        // k_a, k-bar_a

  const SignalTiming& sig(int artery, int i) const {
    return signals[artery][i];
  }
  const SegmentData& seg(int artery, int i) const {
    return segments[artery][i];
  }
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Random instance for a network. Draws, in fixed order:
//   per edge (artery-major):      d ~ U(140, 600) m, shared by direction
//   per signal (artery-major):    r ~ U(0.4, 0.6), then l ~ U(0.25r, 0.38r)
//   scalars:                      T1 ~ U(40, 60) s, T2 ~ U(90, 110) s
//   per segment (artery-major):   e ~ U(12, 14), then f ~ U(15, 16) m/s
// Inbound values equal outbound ones. All tau = 0, all weights = 1, and the
// reciprocal-speed-change window is fixed at +/-0.012 (m/s)^-1. The stream is
// SplitMix64(seed), so equal seeds give bit-identical instances.
Instance generate_instance(const GridNetwork& net, std::uint64_t seed);

// Throws ValidationError naming the offending field.
void validate(const Instance& inst);

// JSON round trip. write_instance produces the canonical schema documented
// in the README; read_instance throws ParseError naming missing/bad fields
// and validates the result.
void write_instance(const Instance& inst, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

}  // namespace maxband
