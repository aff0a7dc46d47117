#pragma once

#include <array>
#include <string>
#include <vector>

#include "maxband/instance.hpp"

namespace maxband {

enum class VarRole {
  Z,         // signal frequency 1/T
  BandOut,   // b_a
  BandIn,    // b-bar_a
  WOut,      // w_{ai}
  WIn,       // w-bar_{ai}
  TOut,      // t_i^a
  TIn,       // t-bar_i^a
  M,         // integer m_i^a
  DeltaOut,  // binary delta_{ai}
  DeltaIn,   // binary delta-bar_{ai}
  CycleC,    // integer C_zeta
};

enum class Domain { Continuous, Integer, Binary };

constexpr double kInf = 1e30;

struct Variable {
  std::string name;
  VarRole role = VarRole::Z;
  Domain domain = Domain::Continuous;
  double lb = 0.0, ub = kInf;
  int artery = -1;  // or cycle index for CycleC
  int index = -1;   // signal/segment index
};

enum class Rel { Le, Eq, Ge };

struct Row {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;  // (variable id, coefficient)
  Rel rel = Rel::Eq;
  double rhs = 0.0;
};

// Integer-variable limits derived from the instance data: boxes for every
// m and C plus the per-cycle intermediates they are assembled from.
struct BoundTable {
  struct SpanBounds {
    double t_lo = 0.0, t_hi = 0.0;    // travel-time span of a cycle segment
    double phi_lo = 0.0, phi_hi = 0.0;  // internode offset across the span
  };
  std::vector<std::array<double, 2>> m_box;  // per edge, artery-major: lo, hi
  std::vector<std::array<double, 2>> c_box;  // per basis cycle
  std::vector<std::vector<SpanBounds>> span;              // [cycle][segment]
  std::vector<std::vector<std::array<double, 2>>> psi;    // [cycle][junction]

  bool crossed() const;
};

struct MilpModel {
  std::vector<Variable> vars;
  std::vector<Row> rows;
  std::vector<double> objective;  // maximize objective . x
  std::vector<int> integer_vars;  // ids with non-continuous domain
  BoundTable bounds;
  bool tightened = false;
  // Crossed bound box detected while tightening; the model is unusable but
  // the harness records it instead of throwing.
  bool infeasible_by_bounds = false;

  // Variable id lookup.
  int var_z = -1;
  std::vector<std::array<int, 2>> band;               // [artery][out,in]
  std::vector<std::vector<std::array<int, 2>>> w;     // [artery][signal]
  std::vector<std::vector<std::array<int, 2>>> t;     // [artery][segment]
  std::vector<std::vector<int>> m;                    // [artery][segment]
  std::vector<std::vector<std::array<int, 2>>> delta; // [artery][signal]
  std::vector<int> cycle_c;                           // [cycle]

  int var_count() const { return static_cast<int>(vars.size()); }
  int row_count() const { return static_cast<int>(rows.size()); }
  int equality_count() const;
};

// Left-turn geometry, Table 2 in one formula: the signed half-difference of
// the left-turn phases selected by the pattern bits.
double delta_value(int delta_out, int delta_in, double left_out,
                   double left_in);

// Intranode offset between the red centers of the crossing signals at one
// junction, as a function of the inbound pattern bits only.
double psi_value(int delta_in_main, double left_in_main, int delta_in_cross,
                 double left_in_cross);

BoundTable compute_bounds(const Instance& inst, const CycleBasis& basis);

// Assemble the bandwidth-maximization MILP: period window, green
// containment, arterial loop equalities (one per street segment), speed and
// speed-change windows, and one loop equality per basis cycle. When tighten
// is set the BoundTable boxes become variable bounds on m and C.
MilpModel build_model(const Instance& inst, const CycleBasis& basis,
                      bool tighten);

// Fixing/enumeration boxes per variable id: BoundTable boxes for m and C,
// {0,1} for the pattern bits, intersected with the variable bounds. Entries
// for continuous variables are their plain bounds.
std::vector<std::array<double, 2>> integer_boxes(const MilpModel& model);

struct AuditReport {
  bool pass = false;
  double max_row_violation = 0.0;
  double max_bound_violation = 0.0;
  double max_integrality_residual = 0.0;
  double objective = 0.0;
  std::vector<std::string> failures;
};

// Independent re-evaluation of every row, bound, and integrality requirement
// against an assignment of all variables.
AuditReport audit_solution(const MilpModel& model,
                           const std::vector<double>& x, double tol);

}  // namespace maxband
