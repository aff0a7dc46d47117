#include "maxband/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace maxband {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string variant_name(HeuristicConfig::Variant v) {
  switch (v) {
    case HeuristicConfig::Variant::LSF: return "lsf";
    case HeuristicConfig::Variant::LSU: return "lsu";
    case HeuristicConfig::Variant::LSVNS: return "lsvns";
  }
  return "?";
}

HeuristicConfig::Variant variant_from_name(const std::string& s) {
  if (s == "lsf") return HeuristicConfig::Variant::LSF;
  if (s == "lsu") return HeuristicConfig::Variant::LSU;
  if (s == "lsvns") return HeuristicConfig::Variant::LSVNS;
  throw ParseError("unknown variant \"" + s + "\"");
}

// Numbers in CSV/JSON are printed with enough digits to round-trip.
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentSpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  ExperimentSpec spec;
  if (!j.contains("sizes")) throw ParseError("sizes absent");
  for (const auto& s : j["sizes"]) {
    if (!s.is_array() || s.size() != 2)
      throw ParseError("sizes entries must be [rows, cols]");
    spec.sizes.push_back({s[0].get<int>(), s[1].get<int>()});
  }
  spec.instances_per_size = j.value("instances_per_size", 1);
  spec.instance_seed_base = j.value("instance_seed_base", 1ULL);
  spec.repetitions = j.value("repetitions", 10);
  if (spec.repetitions < 1) throw ParseError("repetitions must be >= 1");
  spec.run_seed_base = j.value("run_seed_base", 1000ULL);
  spec.tighten = j.value("tighten", true);
  spec.exact = j.value("exact", false);
  spec.exact_time_cap_seconds = j.value("exact_time_cap_s", 10800.0);

  if (!j.contains("configs")) throw ParseError("configs absent");
  for (const auto& c : j["configs"]) {
    ExperimentSpec::ConfigRow row;
    row.iter = c.value("iter", 10);
    row.sl = c.value("sl", 5);
    row.tt = c.value("tt", 3);
    row.ils = c.value("ils", 5);
    row.rm = c.value("rm", 2);
    row.rd = c.value("rd", 2);
    row.rc = c.value("rc", 2);
    spec.configs.push_back(row);
  }
  if (j.contains("variants")) {
    for (const auto& v : j["variants"])
      spec.variants.push_back(variant_from_name(v.get<std::string>()));
  } else {
    spec.variants = {HeuristicConfig::Variant::LSF,
                     HeuristicConfig::Variant::LSU,
                     HeuristicConfig::Variant::LSVNS};
  }
  if (j.contains("candidate_budget_s"))
    spec.candidate_limits.wall_seconds = j["candidate_budget_s"].get<double>();
  if (j.contains("candidate_node_budget"))
    spec.candidate_limits.node_budget = j["candidate_node_budget"].get<long long>();
  if (j.contains("ls_budget_s"))
    spec.ls_limits.wall_seconds = j["ls_budget_s"].get<double>();
  if (j.contains("ls_node_budget"))
    spec.ls_limits.node_budget = j["ls_node_budget"].get<long long>();
  if (j.contains("first_feasible_budget_s"))
    spec.first_feasible_limits.wall_seconds =
        j["first_feasible_budget_s"].get<double>();
  return spec;
}

ExperimentSpec read_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return spec_from_json(ss.str());
}

ResultSet run_experiments(const ExperimentSpec& spec) {
  ResultSet out;
  for (std::size_t si = 0; si < spec.sizes.size(); ++si) {
    const auto [rows, cols] = spec.sizes[si];
    for (int inst_id = 0; inst_id < spec.instances_per_size; ++inst_id) {
      const std::uint64_t inst_seed =
          spec.instance_seed_base + 97 * si + static_cast<std::uint64_t>(inst_id);

      GridNetwork net;
      Instance inst;
      CycleBasis basis;
      MilpModel model;
      double build_seconds = 0.0;
      std::string build_error;
      try {
        const double t0 = now_seconds();
        net = build_grid(rows, cols);
        inst = generate_instance(net, inst_seed);
        basis = fundamental_cycle_basis(net);
        model = build_model(inst, basis, spec.tighten);
        build_seconds = now_seconds() - t0;
      } catch (const std::exception& e) {
        build_error = e.what();
      }

      std::optional<double> exact_of, exact_t;
      if (build_error.empty() && spec.exact) {
        SolveLimits lim;
        lim.wall_seconds = spec.exact_time_cap_seconds;
        const double t0 = now_seconds();
        Solution ex = branch_and_bound(model, lim);
        if (ex.status == SolStatus::Optimal) {
          exact_of = ex.objective;
          exact_t = now_seconds() - t0;
        }
      }

      for (const auto& cfg_row : spec.configs) {
        for (const auto variant : spec.variants) {
          ResultRow row;
          row.rows = rows;
          row.cols = cols;
          row.instance_id = inst_id;
          row.instance_seed = inst_seed;
          row.variant = variant_name(variant);
          row.config = cfg_row;
          row.build_seconds = build_seconds;
          row.exact_objective = exact_of;
          row.exact_seconds = exact_t;
          if (!build_error.empty()) {
            row.note = build_error;
            out.rows.push_back(std::move(row));
            continue;
          }

          double sum = 0.0, sum_t = 0.0;
          double worst = 0.0, best = 0.0;
          for (int rep = 0; rep < spec.repetitions; ++rep) {
            HeuristicConfig cfg;
            cfg.iterations = cfg_row.iter;
            cfg.size_list = cfg_row.sl;
            cfg.max_tenure = cfg_row.tt;
            cfg.ls_iterations = cfg_row.ils;
            cfg.rm = cfg_row.rm;
            cfg.rd = cfg_row.rd;
            cfg.rc = cfg_row.rc;
            cfg.variant = variant;
            cfg.seed = spec.run_seed_base + static_cast<std::uint64_t>(rep);
            cfg.first_feasible_limits = spec.first_feasible_limits;
            cfg.first_feasible_limits.stop_at_first_feasible = true;
            cfg.candidate_limits = spec.candidate_limits;
            cfg.ls_limits = spec.ls_limits;

            const double t0 = now_seconds();
            TsilpResult res = tsilp(model, cfg);
            const double dt = now_seconds() - t0;

            RunPoint pt;
            pt.repetition = rep;
            pt.seed = cfg.seed;
            pt.wall_seconds = dt;
            pt.ok = res.best.has_solution();
            pt.objective = pt.ok ? res.best.objective : 0.0;
            row.points.push_back(pt);
            if (pt.ok) {
              if (row.runs_ok == 0) {
                worst = best = pt.objective;
              } else {
                worst = std::min(worst, pt.objective);
                best = std::max(best, pt.objective);
              }
              ++row.runs_ok;
              sum += pt.objective;
            } else if (row.note.empty()) {
              row.note = "run " + std::to_string(rep) + " found no solution";
            }
            sum_t += dt;
          }
          if (row.runs_ok > 0) {
            row.avg = sum / row.runs_ok;
            row.worst = worst;
            row.best = best;
          }
          row.avg_time_seconds = sum_t / spec.repetitions;
          out.rows.push_back(std::move(row));
        }
      }
    }
  }
  return out;
}

namespace {

const char* kSummaryHeader =
    "rows,cols,instance_id,instance_seed,variant,iter,sl,tt,ils,rm,rd,rc,"
    "runs_ok,avg,worst,best,avgt_s,build_s,exact_of,exact_t_s,note";

void append_summary_line(std::ostringstream& os, const ResultRow& r) {
  os << r.rows << ',' << r.cols << ',' << r.instance_id << ','
     << r.instance_seed << ',' << r.variant << ',' << r.config.iter << ','
     << r.config.sl << ',' << r.config.tt << ',' << r.config.ils << ','
     << r.config.rm << ',' << r.config.rd << ',' << r.config.rc << ','
     << r.runs_ok << ',' << num(r.avg) << ',' << num(r.worst) << ','
     << num(r.best) << ',' << num(r.avg_time_seconds) << ','
     << num(r.build_seconds) << ','
     << (r.exact_objective ? num(*r.exact_objective) : "") << ','
     << (r.exact_seconds ? num(*r.exact_seconds) : "") << ',' << r.note
     << '\n';
}

}  // namespace

std::string results_to_csv(const ResultSet& results) {
  std::ostringstream os;
  os << kSummaryHeader << '\n';
  for (const auto& r : results.rows) append_summary_line(os, r);
  return os.str();
}

std::string raw_points_to_csv(const ResultSet& results) {
  std::ostringstream os;
  os << "rows,cols,instance_id,variant,iter,sl,tt,ils,rm,rd,rc,repetition,"
        "seed,ok,objective,wall_s\n";
  for (const auto& r : results.rows) {
    for (const auto& p : r.points) {
      os << r.rows << ',' << r.cols << ',' << r.instance_id << ','
         << r.variant << ',' << r.config.iter << ',' << r.config.sl << ','
         << r.config.tt << ',' << r.config.ils << ',' << r.config.rm << ','
         << r.config.rd << ',' << r.config.rc << ',' << p.repetition << ','
         << p.seed << ',' << (p.ok ? 1 : 0) << ',' << num(p.objective) << ','
         << num(p.wall_seconds) << '\n';
    }
  }
  return os.str();
}

std::string results_to_json(const ResultSet& results) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : results.rows) {
    nlohmann::ordered_json jr;
    jr["rows"] = r.rows;
    jr["cols"] = r.cols;
    jr["instance_id"] = r.instance_id;
    jr["instance_seed"] = r.instance_seed;
    jr["variant"] = r.variant;
    jr["config"] = {{"iter", r.config.iter}, {"sl", r.config.sl},
                    {"tt", r.config.tt},     {"ils", r.config.ils},
                    {"rm", r.config.rm},     {"rd", r.config.rd},
                    {"rc", r.config.rc}};
    jr["runs_ok"] = r.runs_ok;
    jr["avg"] = r.avg;
    jr["worst"] = r.worst;
    jr["best"] = r.best;
    jr["avgt_s"] = r.avg_time_seconds;
    jr["build_s"] = r.build_seconds;
    if (r.exact_objective) jr["exact_of"] = *r.exact_objective;
    if (r.exact_seconds) jr["exact_t_s"] = *r.exact_seconds;
    jr["note"] = r.note;
    auto& pts = jr["points"] = nlohmann::ordered_json::array();
    for (const auto& p : r.points) {
      pts.push_back({{"repetition", p.repetition},
                     {"seed", p.seed},
                     {"ok", p.ok},
                     {"objective", p.objective},
                     {"wall_s", p.wall_seconds}});
    }
    out.push_back(std::move(jr));
  }
  return out.dump(2);
}

ResultSet results_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  ResultSet out;
  for (const auto& jr : j) {
    ResultRow r;
    r.rows = jr.at("rows").get<int>();
    r.cols = jr.at("cols").get<int>();
    r.instance_id = jr.at("instance_id").get<int>();
    r.instance_seed = jr.at("instance_seed").get<std::uint64_t>();
    r.variant = jr.at("variant").get<std::string>();
    const auto& jc = jr.at("config");
    r.config.iter = jc.at("iter").get<int>();
    r.config.sl = jc.at("sl").get<int>();
    r.config.tt = jc.at("tt").get<int>();
    r.config.ils = jc.at("ils").get<int>();
    r.config.rm = jc.at("rm").get<int>();
    r.config.rd = jc.at("rd").get<int>();
    r.config.rc = jc.at("rc").get<int>();
    r.runs_ok = jr.at("runs_ok").get<int>();
    r.avg = jr.at("avg").get<double>();
    r.worst = jr.at("worst").get<double>();
    r.best = jr.at("best").get<double>();
    r.avg_time_seconds = jr.at("avgt_s").get<double>();
    r.build_seconds = jr.at("build_s").get<double>();
    if (jr.contains("exact_of")) r.exact_objective = jr["exact_of"].get<double>();
    if (jr.contains("exact_t_s")) r.exact_seconds = jr["exact_t_s"].get<double>();
    r.note = jr.at("note").get<std::string>();
    for (const auto& jp : jr.at("points")) {
      RunPoint p;
      p.repetition = jp.at("repetition").get<int>();
      p.seed = jp.at("seed").get<std::uint64_t>();
      p.ok = jp.at("ok").get<bool>();
      p.objective = jp.at("objective").get<double>();
      p.wall_seconds = jp.at("wall_s").get<double>();
      r.points.push_back(p);
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

namespace {

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

}  // namespace

void emit_csv(const ResultSet& results, const std::filesystem::path& path) {
  write_text(results_to_csv(results), path);
}
void emit_raw_csv(const ResultSet& results, const std::filesystem::path& path) {
  write_text(raw_points_to_csv(results), path);
}
void emit_json(const ResultSet& results, const std::filesystem::path& path) {
  write_text(results_to_json(results), path);
}

std::string trace_to_jsonl(const std::vector<IterationRecord>& trace) {
  std::ostringstream os;
  for (const auto& rec : trace) {
    nlohmann::ordered_json j;
    j["iteration"] = rec.iteration;
    j["current_of"] = rec.current_objective;
    j["best_of"] = rec.best_objective;
    j["wall_s"] = rec.wall_seconds;
    j["candidates_kept"] = rec.candidates_kept;
    os << j.dump() << '\n';
  }
  return os.str();
}

}  // namespace maxband
