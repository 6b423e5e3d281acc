#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sucil/eta_table.hpp"
#include "sucil/geometry.hpp"
#include "sucil/lattice.hpp"

namespace sucil {

// ---------------------------------------------------------------------------
// Generic LP-format model (one objective, linear rows, bounded variables).
// ---------------------------------------------------------------------------

enum class VarKind { Continuous, Binary, Integer };
enum class RowSense { LE, GE, EQ };

struct LpVar {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = 0.0;
};

struct LpTerm {
  std::int32_t var = 0;
  double coef = 0.0;
};

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
};

struct LpModel {
  std::vector<LpVar> vars;
  std::vector<LpRow> rows;
  std::vector<LpTerm> objective;  // minimized
  std::unordered_map<std::string, std::int32_t> index;

  std::int32_t add_var(const std::string& name, VarKind kind, double lo,
                       double hi);
  std::int32_t var(const std::string& name) const;  // -1 when absent
};

// Deterministic LP-format text (Minimize / Subject To / Bounds / Generals /
// Binaries / End; one row per line; 15-significant-digit numbers).
std::string write_lp(const LpModel& model);

// Parse the dialect written by write_lp.  Throws IoFailureError with a line
// number on malformed input.  write_lp(parse_lp(text)) == text.
LpModel parse_lp(const std::string& text);

// Constraint-by-constraint check of a candidate assignment (variable name ->
// value).  Throws IncompleteAssignmentError if any model variable is
// missing.  Bound and integrality breaches are reported as pseudo-rows.
struct Violation {
  std::string row;
  double lhs = 0.0;
  double rhs = 0.0;
  char sense = '<';
  double amount = 0.0;  // positive violation magnitude
};

struct ValidationReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

ValidationReport validate_assignment(
    const LpModel& model,
    const std::unordered_map<std::string, double>& assignment,
    double tol = 1e-6);

// ---------------------------------------------------------------------------
// Cut-union MILP assembly.
// ---------------------------------------------------------------------------

// Facet with integer coefficients, obtained from a normalized facet by
// clearing denominators; anchor_value = integer value at its own anchor
// point (the denominator scale of the normalized form).
struct IntegerFacet {
  std::vector<std::int64_t> c;
  std::int64_t b = 0;
  std::int64_t anchor_value = 1;
};

// Recover integer coefficients of a normalized facet by continued-fraction
// rationalization; verifies exactly (64-bit arithmetic) that the result
// vanishes at the non-anchor points and is positive at the anchor.
IntegerFacet rationalize_facet(const Affine& facet,
                               const std::vector<Point>& points, int anchor,
                               double tol = 1e-9);

struct ConstantBundle {
  double l_f = 0.0;        // lower bound on f over the domain
  double M_eta = 0.0;      // max of the per-cut activation constants
  std::vector<double> M_per_cut;
  // Distance-space constants (unit: Euclidean distance to facet planes),
  // recorded in the sidecar for reference.
  double eps_lambda = 0.0;  // min over facets of 1 / ||c||_2
  double M_lambda = 0.0;    // max over facets, box of |c^T x + b| / ||c||_2
  // Multiplier-space constants actually used in the rows: the model's
  // lambda variables are barycentric cone multipliers, so the separation
  // threshold is the least nonzero multiplier a lattice point can produce
  // (1 / anchor_value per facet) and the big-M covers the largest |lambda|
  // over the box, padded by the threshold.
  double model_eps_lambda = 0.0;
  double model_M_lambda = 0.0;
  std::string provenance;
};

// Activation constant for one cut: max of the secant over the box minus
// l_f (nonnegative by construction when the secant touches the box).
double derive_M_cut(const Secant& cut, const Box& box, double l_f);

// Per-cut constants and their maximum.
void derive_M_eta(ConstantBundle& bundle, const std::vector<Secant>& cuts,
                  const Box& box, double l_f);

// Minimum over facets of 1 / ||c||_2; throws ZeroNormalError on a zero
// normal.
double derive_eps_lambda(const std::vector<IntegerFacet>& facets);

// Maximum over facets and box points of |c^T x + b| / ||c||_2 (attained at
// a box vertex; evaluated by coordinate sign-splitting).
double derive_M_lambda(const std::vector<IntegerFacet>& facets,
                       const Box& box);

struct CpfCut {
  std::vector<std::int32_t> ids;  // indices into the evaluated list
  std::vector<Point> points;
  Secant model;
  std::vector<Affine> facets;  // normalized
  std::vector<IntegerFacet> int_facets;
  double M = 0.0;  // per-cut activation constant
};

struct CpfOptions {
  // Append the evaluated-point exclusion block (one-hot coordinate
  // encoding shared by all excluded points).
  bool with_no_good = false;
  // Use the single global activation constant in every cut row instead of
  // the per-cut (tighter) values.
  bool shared_M_eta = false;
  // Lower bound on f; default: min observed f minus box span times the
  // largest cut-coefficient 1-norm.
  std::optional<double> l_f;
  // Experimental override of the separation threshold (for demonstrating
  // how an overlarge value cuts off valid points).
  std::optional<double> force_eps_lambda;
};

struct CpfModel {
  int n = 0;
  Box box;
  std::vector<std::pair<Point, double>> evaluated;
  std::vector<CpfCut> cuts;
  ConstantBundle constants;
  bool with_no_good = false;
  LpModel lp;

  // Closed-form size accounting (must match the materialized lp exactly).
  std::int64_t expected_binaries() const;
  std::int64_t expected_continuous() const;
  std::int64_t expected_integers() const;
  std::int64_t expected_rows() const;
};

// Assemble the full model over every poised (n+1)-subset of the evaluated
// points.  Throws NoPoisedSubsetError when fewer than n+1 points are given
// or no subset is poised.
CpfModel build_cpf(const std::vector<std::pair<Point, double>>& evaluated,
                   const Domain& dom, const CpfOptions& opts = {});

// Write the LP file and a companion "<path>.constants.txt" sidecar
// describing the constants and their derivation.  Throws IoFailureError.
void export_lp(const CpfModel& model, const std::string& path);

// Cone-consistent assignment for a lattice point: z/w/lambda per cut from
// facet values, one-hot coordinate bits when the exclusion block is on,
// and the smallest feasible objective value (overridable).
std::unordered_map<std::string, double> cpf_assignment(
    const CpfModel& model, const Point& x,
    std::optional<double> eta_value = {});

}  // namespace sucil
