#include "maxband/mps.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace maxband {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string model_to_mps(const MilpModel& model, const std::string& name) {
  std::ostringstream out;
  out << "NAME " << name << "\n";
  out << "OBJSENSE\n MAX\n";
  out << "ROWS\n";
  out << " N obj\n";
  for (const Row& r : model.rows) {
    const char rel = r.rel == Rel::Le ? 'L' : r.rel == Rel::Ge ? 'G' : 'E';
    out << " " << rel << " " << r.name << "\n";
  }

  // Column-major coefficient lists.
  std::vector<std::vector<std::pair<int, double>>> cols(model.var_count());
  for (int r = 0; r < model.row_count(); ++r) {
    for (const auto& [v, c] : model.rows[r].coeffs)
      if (c != 0.0) cols[v].emplace_back(r, c);
  }

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int v = 0; v < model.var_count(); ++v) {
    const bool is_int = model.vars[v].domain != Domain::Continuous;
    if (is_int && !in_int) {
      out << " MARKER" << marker++ << " 'MARKER' 'INTORG'\n";
      in_int = true;
    } else if (!is_int && in_int) {
      out << " MARKER" << marker++ << " 'MARKER' 'INTEND'\n";
      in_int = false;
    }
    const std::string& n = model.vars[v].name;
    if (model.objective[v] != 0.0)
      out << " " << n << " obj " << num(model.objective[v]) << "\n";
    for (const auto& [r, c] : cols[v])
      out << " " << n << " " << model.rows[r].name << " " << num(c) << "\n";
  }
  if (in_int) out << " MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (const Row& r : model.rows) {
    if (r.rhs != 0.0) out << " rhs " << r.name << " " << num(r.rhs) << "\n";
  }

  out << "BOUNDS\n";
  for (int v = 0; v < model.var_count(); ++v) {
    const Variable& var = model.vars[v];
    const std::string& n = var.name;
    const bool lo = var.lb > -kInf, hi = var.ub < kInf;
    if (lo && hi && var.lb == var.ub) {
      out << " FX bnd " << n << " " << num(var.lb) << "\n";
      continue;
    }
    if (!lo && !hi) {
      out << " FR bnd " << n << "\n";
      continue;
    }
    if (lo) {
      if (var.lb != 0.0) out << " LO bnd " << n << " " << num(var.lb) << "\n";
    } else {
      out << " MI bnd " << n << "\n";
    }
    if (hi) out << " UP bnd " << n << " " << num(var.ub) << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

void write_mps(const MilpModel& model, const std::string& name,
               const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << model_to_mps(model, name);
}

}  // namespace maxband
