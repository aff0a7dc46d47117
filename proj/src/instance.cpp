#include "maxband/instance.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maxband/rng.hpp"

namespace maxband {

namespace {

// The reciprocal-speed-change window used by the generator, in (m/s)^-1.
// Lower slope 1/h = -0.012, upper slope 1/g = +0.012; anything else makes
// every instance infeasible because the window sits left of zero.
constexpr double kDvRecipWindow = 0.012;

}  // namespace

Instance generate_instance(const GridNetwork& net, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Instance inst;
  inst.net = net;
  inst.signals.resize(net.artery_count());
  inst.segments.resize(net.artery_count());
  inst.weight_out.assign(net.artery_count(), 1.0);
  inst.weight_in.assign(net.artery_count(), 1.0);
  for (const auto& a : net.arteries) {
    inst.signals[a.id].resize(a.signal_count());
    inst.segments[a.id].resize(a.segment_count());
  }

  // Edge distances, artery-major (the canonical edge order).
  for (const Edge& e : net.edges) {
    const double d = rng.uniform(140.0, 600.0);
    SegmentData& s = inst.segments[e.artery][e.seg];
    s.dist_out = s.dist_in = d;
    s.dv_recip_lo_out = s.dv_recip_lo_in = -kDvRecipWindow;
    s.dv_recip_hi_out = s.dv_recip_hi_in = kDvRecipWindow;
  }

  // Signal timings: red, then the left-turn phase as a fraction of that red.
  for (const auto& a : net.arteries) {
    for (int i = 0; i < a.signal_count(); ++i) {
      SignalTiming& t = inst.signals[a.id][i];
      const double r = rng.uniform(0.4, 0.6);
      const double l = rng.uniform(0.25 * r, 0.38 * r);
      t.red_out = t.red_in = r;
      t.left_out = t.left_in = l;
      t.adv_out = t.adv_in = 0.0;
    }
  }

  inst.period_min = rng.uniform(40.0, 60.0);
  inst.period_max = rng.uniform(90.0, 110.0);

  for (const auto& a : net.arteries) {
    for (int i = 0; i < a.segment_count(); ++i) {
      SegmentData& s = inst.segments[a.id][i];
      const double e = rng.uniform(12.0, 14.0);
      const double f = rng.uniform(15.0, 16.0);
      s.speed_min_out = s.speed_min_in = e;
      s.speed_max_out = s.speed_max_in = f;
    }
  }
  return inst;
}

void validate(const Instance& inst) {
  auto fail = [](const std::string& what) { throw ValidationError(what); };

  if (!(inst.period_min > 0.0)) fail("period.t_min must be > 0");
  if (!(inst.period_min <= inst.period_max))
    fail("period.t_min must be <= period.t_max");

  const int na = inst.net.artery_count();
  if (static_cast<int>(inst.signals.size()) != na ||
      static_cast<int>(inst.segments.size()) != na ||
      static_cast<int>(inst.weight_out.size()) != na ||
      static_cast<int>(inst.weight_in.size()) != na)
    fail("arteries: parameter arrays do not match the network");

  for (const auto& a : inst.net.arteries) {
    const std::string where = "arteries[" + std::to_string(a.id) + "]";
    if (static_cast<int>(inst.signals[a.id].size()) != a.signal_count())
      fail(where + ".signals: expected " + std::to_string(a.signal_count()));
    if (static_cast<int>(inst.segments[a.id].size()) != a.segment_count())
      fail(where + ".segments: expected " + std::to_string(a.segment_count()));
    if (inst.weight_out[a.id] < 0.0 || inst.weight_in[a.id] < 0.0)
      fail(where + ": weights must be >= 0");

    for (int i = 0; i < a.signal_count(); ++i) {
      const std::string sw = where + ".signals[" + std::to_string(i) + "]";
      const SignalTiming& t = inst.signals[a.id][i];
      if (!(t.red_out > 0.0 && t.red_out < 1.0))
        fail(sw + ".red_out must be in (0,1)");
      if (!(t.red_in > 0.0 && t.red_in < 1.0))
        fail(sw + ".red_in must be in (0,1)");
      if (t.left_out < 0.0 || t.left_in < 0.0)
        fail(sw + ": left-turn phases must be >= 0");
    }
    for (int i = 0; i < a.segment_count(); ++i) {
      const std::string sw = where + ".segments[" + std::to_string(i) + "]";
      const SegmentData& s = inst.segments[a.id][i];
      if (!(s.dist_out > 0.0 && s.dist_in > 0.0))
        fail(sw + ": distances must be > 0");
      if (!(s.speed_min_out > 0.0 && s.speed_min_out <= s.speed_max_out))
        fail(sw + ": need 0 < speed_min_out <= speed_max_out");
      if (!(s.speed_min_in > 0.0 && s.speed_min_in <= s.speed_max_in))
        fail(sw + ": need 0 < speed_min_in <= speed_max_in");
      if (!(s.dv_recip_lo_out <= s.dv_recip_hi_out) ||
          !(s.dv_recip_lo_in <= s.dv_recip_hi_in))
        fail(sw + ": reciprocal speed-change window is empty");
    }
  }
}

namespace {

using nlohmann::ordered_json;

ordered_json timing_to_json(const SignalTiming& t) {
  return ordered_json{{"red_out", t.red_out},   {"red_in", t.red_in},
                      {"left_out", t.left_out}, {"left_in", t.left_in},
                      {"adv_out", t.adv_out},   {"adv_in", t.adv_in}};
}

ordered_json segment_to_json(const SegmentData& s) {
  return ordered_json{{"dist_out", s.dist_out},
                      {"dist_in", s.dist_in},
                      {"speed_min_out", s.speed_min_out},
                      {"speed_max_out", s.speed_max_out},
                      {"speed_min_in", s.speed_min_in},
                      {"speed_max_in", s.speed_max_in},
                      {"dv_recip_lo_out", s.dv_recip_lo_out},
                      {"dv_recip_hi_out", s.dv_recip_hi_out},
                      {"dv_recip_lo_in", s.dv_recip_lo_in},
                      {"dv_recip_hi_in", s.dv_recip_hi_in}};
}

// .at() wrapper that reports the full dotted path of a missing field.
const nlohmann::json& get(const nlohmann::json& j, const std::string& key,
                          const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + key + " absent");
  return *it;
}

double get_num(const nlohmann::json& j, const std::string& key,
               const std::string& path) {
  const auto& v = get(j, key, path);
  if (!v.is_number()) throw ParseError(path + key + " is not a number");
  return v.get<double>();
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  ordered_json out;
  out["format"] = "maxband-instance";
  out["version"] = 1;
  out["units"] = ordered_json{
      {"distance", "meters"},
      {"speed", "meters/second"},
      {"period_bounds", "seconds"},
      {"red_left_adv", "fraction of period"},
      {"recip_speed_change", "(meters/second)^-1"},
  };
  if (inst.net.is_grid()) {
    out["network"] =
        ordered_json{{"kind", "grid"}, {"rows", inst.net.rows},
                     {"cols", inst.net.cols}};
  } else {
    out["network"] = ordered_json{
        {"kind", "path"},
        {"signals", inst.net.arteries.at(0).signal_count()}};
  }
  out["period"] = ordered_json{{"t_min", inst.period_min},
                               {"t_max", inst.period_max}};
  auto& arts = out["arteries"] = ordered_json::array();
  for (const auto& a : inst.net.arteries) {
    ordered_json ja;
    ja["weight_out"] = inst.weight_out[a.id];
    ja["weight_in"] = inst.weight_in[a.id];
    auto& sigs = ja["signals"] = ordered_json::array();
    for (const auto& t : inst.signals[a.id]) sigs.push_back(timing_to_json(t));
    auto& segs = ja["segments"] = ordered_json::array();
    for (const auto& s : inst.segments[a.id])
      segs.push_back(segment_to_json(s));
    arts.push_back(std::move(ja));
  }
  return out.dump(2);
}

Instance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }

  if (get(j, "format", "") != "maxband-instance")
    throw ParseError("format is not \"maxband-instance\"");

  const auto& jnet = get(j, "network", "");
  const std::string kind = get(jnet, "kind", "network.").get<std::string>();
  Instance inst;
  if (kind == "grid") {
    const int rows = get(jnet, "rows", "network.").get<int>();
    const int cols = get(jnet, "cols", "network.").get<int>();
    try {
      inst.net = build_grid(rows, cols);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("network: ") + e.what());
    }
  } else if (kind == "path") {
    inst.net = single_artery(get(jnet, "signals", "network.").get<int>());
  } else {
    throw ParseError("network.kind must be \"grid\" or \"path\"");
  }

  const auto& jperiod = get(j, "period", "");
  inst.period_min = get_num(jperiod, "t_min", "period.");
  inst.period_max = get_num(jperiod, "t_max", "period.");

  const auto& jarts = get(j, "arteries", "");
  if (!jarts.is_array() ||
      static_cast<int>(jarts.size()) != inst.net.artery_count())
    throw ParseError("arteries: expected " +
                     std::to_string(inst.net.artery_count()) + " entries");

  inst.signals.resize(inst.net.artery_count());
  inst.segments.resize(inst.net.artery_count());
  inst.weight_out.resize(inst.net.artery_count());
  inst.weight_in.resize(inst.net.artery_count());
  for (const auto& a : inst.net.arteries) {
    const std::string where = "arteries[" + std::to_string(a.id) + "].";
    const auto& ja = jarts[a.id];
    inst.weight_out[a.id] = get_num(ja, "weight_out", where);
    inst.weight_in[a.id] = get_num(ja, "weight_in", where);

    const auto& sigs = get(ja, "signals", where);
    if (static_cast<int>(sigs.size()) != a.signal_count())
      throw ParseError(where + "signals: expected " +
                       std::to_string(a.signal_count()) + " entries");
    for (int i = 0; i < a.signal_count(); ++i) {
      const std::string sw = where + "signals[" + std::to_string(i) + "].";
      const auto& js = sigs[i];
      SignalTiming t;
      t.red_out = get_num(js, "red_out", sw);
      t.red_in = get_num(js, "red_in", sw);
      t.left_out = get_num(js, "left_out", sw);
      t.left_in = get_num(js, "left_in", sw);
      t.adv_out = get_num(js, "adv_out", sw);
      t.adv_in = get_num(js, "adv_in", sw);
      inst.signals[a.id].push_back(t);
    }

    const auto& segs = get(ja, "segments", where);
    if (static_cast<int>(segs.size()) != a.segment_count())
      throw ParseError(where + "segments: expected " +
                       std::to_string(a.segment_count()) + " entries");
    for (int i = 0; i < a.segment_count(); ++i) {
      const std::string sw = where + "segments[" + std::to_string(i) + "].";
      const auto& js = segs[i];
      SegmentData s;
      s.dist_out = get_num(js, "dist_out", sw);
      s.dist_in = get_num(js, "dist_in", sw);
      s.speed_min_out = get_num(js, "speed_min_out", sw);
      s.speed_max_out = get_num(js, "speed_max_out", sw);
      s.speed_min_in = get_num(js, "speed_min_in", sw);
      s.speed_max_in = get_num(js, "speed_max_in", sw);
      s.dv_recip_lo_out = get_num(js, "dv_recip_lo_out", sw);
      s.dv_recip_hi_out = get_num(js, "dv_recip_hi_out", sw);
      s.dv_recip_lo_in = get_num(js, "dv_recip_lo_in", sw);
      s.dv_recip_hi_in = get_num(js, "dv_recip_hi_in", sw);
      inst.segments[a.id].push_back(s);
    }
  }

  validate(inst);
  return inst;
}

void write_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << instance_to_json(inst) << '\n';
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace maxband
