#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sucil/eta_table.hpp"
#include "sucil/lattice.hpp"

namespace sucil {

// Where a problem's canonical starting point sits: the origin, or the box
// midpoint rounded toward zero.
enum class StartPolicy { Origin, BoxMidpoint };

using Evaluator = std::function<double(std::span<const int>)>;

struct ProblemSpec {
  std::string name;
  int n = 0;
  Evaluator eval;
  // Optimal value on any box containing the listed minimizers.
  double known_min = 0.0;
  // Known minimizers (possibly a representative subset; see argmin_note).
  std::vector<Point> known_argmin;
  std::string argmin_note;
  StartPolicy start_policy = StartPolicy::BoxMidpoint;
};

struct ProblemOptions {
  // The chained quadratic couples x_i with x_{i+1}; by default the chain
  // wraps around (x_{n+1} = x_1).  Disable to sum only i = 1..n-1.
  bool abhi_cyclic = true;
};

// Registry of the eight convex test objectives.  Throws
// UnknownProblemError / DimensionTooSmallError.
ProblemSpec make_problem(std::string_view name, int n,
                         const ProblemOptions& opts = {});

// Canonical problem names, registry order.
std::vector<std::string> problem_names();

// Black-box wrapper handed to solvers: counts evaluations, keeps the
// ordered evaluation log, and rejects repeat requests (the solver must
// cache values itself).
class CountingOracle {
public:
  CountingOracle(ProblemSpec spec, Box box);

  double operator()(std::span<const int> x);

  std::int64_t count() const { return static_cast<std::int64_t>(log_.size()); }
  const std::vector<std::pair<Point, double>>& log() const { return log_; }
  const std::vector<std::uint8_t>& evaluated_mask() const { return seen_; }
  const ProblemSpec& spec() const { return spec_; }
  const Box& box() const { return box_; }

private:
  ProblemSpec spec_;
  Box box_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::pair<Point, double>> log_;
};

// Randomized convexity check: sample collinear lattice triples y, x, z with
// x = (1-λ) y + λ z and verify f(x) <= (1-λ) f(y) + λ f(z).
struct ProbeReport {
  bool pass = true;
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  // First witness when failing.
  Point lo_end, hi_end, interior;
  double observed = 0.0;  // f at the interior point
  double bound = 0.0;     // convex-combination value it must not exceed
};

ProbeReport convexity_probe(const Evaluator& f, const Domain& dom,
                            std::int64_t trials, std::uint64_t seed);
ProbeReport convexity_probe(const ProblemSpec& spec, const Domain& dom,
                            std::int64_t trials, std::uint64_t seed);

// Canonical starting point for a problem on a box.
Point default_start(const ProblemSpec& spec, const Box& box);

}  // namespace sucil
