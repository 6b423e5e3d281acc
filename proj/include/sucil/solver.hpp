#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sucil/eta_table.hpp"
#include "sucil/geometry.hpp"
#include "sucil/problems.hpp"

namespace sucil {

// Strategy knobs, named after how they pick cut sources and next iterates:
//   Sucil       cuts from the generator set, next iterate by trust region
//   SucilNoTR   cuts from the generator set, next iterate = global bound argmin
//   SucilIdeal1 cuts from all evaluated points, next iterate = true-f argmin
//   SucilIdeal2 cuts from the generator set, next iterate = true-f argmin
enum class Variant { Sucil, SucilNoTR, SucilIdeal1, SucilIdeal2 };

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
std::vector<std::string> variant_names();

struct SolverConfig {
  Variant variant = Variant::Sucil;
  int delta_min = 1;
  // Maximum number of black-box evaluations; 0 means |domain| (the
  // enumeration worst case, which the method is guaranteed to beat or meet).
  std::int64_t budget = 0;
  // Starting point; defaults to the problem's canonical start.
  std::optional<Point> start;
  // Full replacement for the plus/minus stencil (used e.g. on 0/1 boxes
  // where the stencil would leave the domain).
  std::optional<std::vector<Point>> initial_points;
  // |upper - lower| at or below which the run is declared certified.
  double certify_tol = 1e-9;
  // Geometry tolerances, defaulting to the library-wide constants.
  double poised_tol = kPoisedTol;
  double membership_tol = kMembershipTol;
};

struct CutStatsRow {
  int iteration = 0;
  std::int64_t combos_total = 0;   // candidate point sets examined
  std::int64_t combos_poised = 0;  // of those, usable for a secant fit
  std::int64_t cuts_updating = 0;  // cuts that strictly raised some bound
  std::int64_t cuts_pruning = 0;   // updating cuts that pushed a bound to >= u
  double lower = 0.0;
  double upper = 0.0;
  double seconds = 0.0;
};

enum class SolveStatus { Certified, BudgetExhausted };

struct Certificate {
  std::string problem;
  std::string variant;
  int n = 0;
  Box box;
  Point start;
  SolveStatus status = SolveStatus::BudgetExhausted;
  bool certified = false;
  double lower = 0.0;
  double upper = 0.0;
  Point best;
  std::int64_t evaluations = 0;
  // 1-based position in the evaluation log where the final best value was
  // first attained.
  std::int64_t first_best = 0;
  std::vector<CutStatsRow> stats;
  std::vector<std::pair<Point, double>> evals;  // ordered evaluation log
  double seconds = 0.0;
};

// Snapshot handed to the iteration hook after each iteration's bound
// update, before the next evaluation.
struct IterationView {
  int iteration;
  double lower;
  double upper;
  const EtaTable& table;
  const Domain& dom;
  const std::vector<std::pair<Point, double>>& evals;
};
using IterationHook = std::function<void(const IterationView&)>;

// The 2n+1 starting points {x, x +- e_h} in the frozen order
// x, x-e_1, ..., x-e_n, x+e_1, ..., x+e_n (lower neighbors before upper
// ones, as in lattice enumeration order).  Throws StencilOutsideBoxError
// listing every infeasible point when the stencil leaves the domain.
std::vector<Point> initial_stencil(const Point& xbar, const Domain& dom);

// Trust-region radius schedule: grow by one on strict incumbent
// improvement, otherwise halve (integer floor) but never below delta_min.
int step_radius(int delta, bool improved, int delta_min);

// Run one solver variant against a counting black box.  The oracle's box
// must match the domain's box.
Certificate solve(CountingOracle& oracle, const Domain& dom,
                  const SolverConfig& cfg, const IterationHook& hook = {});

// Convenience overload that wraps the problem in a fresh oracle.
Certificate solve(const ProblemSpec& spec, const Domain& dom,
                  const SolverConfig& cfg, const IterationHook& hook = {});

// Visit every poised (n+1)-subset of `source` (ids into `evals`) in
// lexicographic order over the ascending id sequence, with fitted secant
// and facets.  Reference enumeration used by tests and model export; the
// solver's internal pass is batched but visits the same sets in the same
// order.
using CutVisitor =
    std::function<void(std::span<const std::int32_t> ids, const PoisedSet& ps,
                       const Secant& secant, const ConeComplex& cc)>;
void enumerate_cuts(const std::vector<std::pair<Point, double>>& evals,
                    std::vector<std::int32_t> source, const CutVisitor& visit);

struct BruteForceResult {
  double min_value = 0.0;
  std::vector<Point> argmins;  // enumeration order
};

// Exhaustive scan of the domain with the raw evaluator (does not count
// against any budget).  Ground truth for tests.
BruteForceResult brute_force_oracle(const ProblemSpec& spec, const Domain& dom);

// Structured-text (JSON) rendering of a run record.
std::string certificate_json(const Certificate& cert);

}  // namespace sucil
