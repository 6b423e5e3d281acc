#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sucil/problems.hpp"
#include "sucil/solver.hpp"

namespace sucil {

// One solver-on-instance outcome, either measured here or ingested from a
// reference CSV.  `n_terminate` is the evaluation count at termination;
// `n_first_opt` the 1-based index of the first evaluation hitting the true
// minimum (-1 when the run never reached it).  `certified` is false for
// budget-capped runs.
struct RunRecord {
  std::string solver;
  std::string problem;
  int n = 0;
  std::int64_t n_terminate = 0;
  std::int64_t n_first_opt = -1;
  bool certified = false;
  bool external = false;  // ingested rather than measured
  double seconds = 0.0;
  std::string error;  // non-empty when the run failed; other fields unset
};

struct SuiteConfig {
  std::vector<std::string> problems;  // empty = full registry
  std::vector<int> dims = {3, 4, 5};
  int box_lo = -4;
  int box_hi = 4;
  std::vector<Variant> variants = {Variant::Sucil};
  std::int64_t budget = 0;  // 0 = lattice size
  int jobs = 1;
  ProblemOptions popts;
};

// Run every (variant, problem, dimension) combination.  Failures are
// captured in the record's `error` field; the suite keeps going.  Records
// come back sorted by (solver, problem, n).
std::vector<RunRecord> run_suite(const SuiteConfig& cfg);

enum class ProfileMetric { Terminate, FirstOpt };

struct ProfileOptions {
  // When set, budget-capped termination counts enter the profile at face
  // value instead of +infinity.
  bool capped_literal = false;
};

// Performance profile over solvers s and instance groups g = (problem, n):
// value[s][g] is the metric, ratio[s][g] = value / best-in-group, and
// rho[s][a] the share of groups solved within factor alpha[a] of the best.
struct Profile {
  std::vector<std::string> solvers;                // sorted by name
  std::vector<std::pair<std::string, int>> groups; // sorted (problem, n)
  std::vector<std::vector<double>> value;          // [solver][group]
  std::vector<std::vector<double>> ratio;          // [solver][group]
  std::vector<double> alpha;                       // shared sorted grid
  std::vector<std::vector<double>> rho;            // [solver][alpha index]
};

// Build a profile from records.  Every solver must appear exactly once per
// group, else MissingPairError.  Records with a non-empty error enter at
// +infinity.
Profile make_profile(const std::vector<RunRecord>& records,
                     ProfileMetric metric, const ProfileOptions& opts = {});

// Share of groups where `solver` attains the group's best metric value
// (ties count).
double best_share(const Profile& profile, const std::string& solver);

// Reference-data CSV with header
//   solver,problem,n,n_terminate,n_first_opt,certified
// '#'-prefixed comment lines are skipped.  Malformed content raises
// SchemaMismatchError naming the line.  Returned records have
// external = true.
std::vector<RunRecord> parse_reference_csv(const std::string& text,
                                           const std::string& origin);
std::vector<RunRecord> ingest_reference(const std::string& path);

// Deterministic CSV renderings (no timing columns, so output is
// byte-stable across runs).
std::string records_csv(const std::vector<RunRecord>& records);
std::string ratios_csv(const Profile& profile);
std::string samples_csv(const Profile& profile);

}  // namespace sucil
