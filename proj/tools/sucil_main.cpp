// Command-line front end: solve one instance, run the benchmark suite,
// export a MILP model, probe convexity, or list the problem registry.
//
// Exit codes: 0 success (certified solve / completed suite), 2 uncertified
// budget exhaustion or failed probe, 1 usage or configuration errors.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sucil/bench.hpp"
#include "sucil/milp.hpp"
#include "sucil/problems.hpp"
#include "sucil/solver.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitUncertified = 2;

std::string default_out_dir() {
  if (const char* env = std::getenv("SUCIL_OUT_DIR")) {
    if (*env) return env;
  }
  return ".";
}

void ensure_writable(const std::string& path, bool force) {
  if (fs::exists(path) && !force) {
    throw sucil::IoFailureError("refusing to overwrite '" + path +
                                "'; pass --force to replace it");
  }
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw sucil::IoFailureError("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) throw sucil::IoFailureError("write failed for '" + path + "'");
}

std::string point_str(const sucil::Point& p) {
  std::string s = "(";
  for (std::size_t h = 0; h < p.size(); ++h) {
    s += (h ? "," : "") + std::to_string(p[h]);
  }
  return s + ")";
}

sucil::Variant require_variant(const std::string& name) {
  const auto v = sucil::parse_variant(name);
  if (!v) {
    std::string all;
    for (const std::string& s : sucil::variant_names()) {
      all += (all.empty() ? "" : ", ") + s;
    }
    throw sucil::Error("unknown variant '" + name + "' (expected one of " +
                       all + ")");
  }
  return *v;
}

struct CommonOpts {
  std::string problem;
  int n = 3;
  std::vector<int> box = {-4, 4};
  bool abhi_noncyclic = false;

  sucil::ProblemOptions popts() const {
    sucil::ProblemOptions p;
    p.abhi_cyclic = !abhi_noncyclic;
    return p;
  }
  sucil::Domain domain() const {
    return sucil::Domain{sucil::Box::uniform(n, box[0], box[1])};
  }
};

void add_common(CLI::App* cmd, CommonOpts& c, bool need_problem) {
  auto* p = cmd->add_option("--problem", c.problem, "Problem name");
  if (need_problem) p->required();
  cmd->add_option("--n", c.n, "Dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--box", c.box, "Box bounds LO HI (applied per coordinate)")
      ->expected(2);
  cmd->add_flag("--abhi-noncyclic", c.abhi_noncyclic,
                "Use the open-chain reading of the abhi sum (default wraps "
                "around)");
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveOpts {
  CommonOpts common;
  std::string variant = "sucil";
  std::int64_t budget = 0;
  std::vector<int> start;
  std::string out;
  bool force = false;
  int delta_min = 1;
  double certify_tol = 1e-9;
  double poised_tol = sucil::kPoisedTol;
  double membership_tol = sucil::kMembershipTol;
};

int run_solve(const SolveOpts& o) {
  const sucil::ProblemSpec spec =
      sucil::make_problem(o.common.problem, o.common.n, o.common.popts());
  const sucil::Domain dom = o.common.domain();
  sucil::SolverConfig cfg;
  cfg.variant = require_variant(o.variant);
  cfg.budget = o.budget;
  cfg.delta_min = o.delta_min;
  cfg.certify_tol = o.certify_tol;
  cfg.poised_tol = o.poised_tol;
  cfg.membership_tol = o.membership_tol;
  if (!o.start.empty()) cfg.start = o.start;

  const sucil::Certificate cert = sucil::solve(spec, dom, cfg);

  std::string out = o.out;
  if (out.empty()) {
    out = default_out_dir() + "/" + spec.name + "_n" +
          std::to_string(o.common.n) + "_" + cert.variant + ".json";
  }
  ensure_writable(out, o.force);
  write_text(out, sucil::certificate_json(cert));

  std::cout << "problem   " << spec.name << " (n=" << cert.n << "), box ["
            << o.common.box[0] << "," << o.common.box[1] << "]^" << cert.n
            << "\n";
  std::cout << "variant   " << cert.variant << "\n";
  std::cout << "status    "
            << (cert.certified ? "certified" : "budget-exhausted") << "\n";
  std::cout << "bounds    l=" << cert.lower << "  u=" << cert.upper << "\n";
  std::cout << "best      f=" << cert.upper << " at " << point_str(cert.best)
            << "\n";
  std::cout << "evals     " << cert.evaluations << " of " << dom.size()
            << " lattice points, first best at #" << cert.first_best << "\n";
  std::cout << "seconds   " << cert.seconds << "\n";
  std::cout << "wrote     " << out << "\n";
  return cert.certified ? kExitOk : kExitUncertified;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOpts {
  std::vector<std::string> problems;
  std::vector<int> dims = {3, 4, 5};
  std::vector<int> box = {-4, 4};
  std::vector<std::string> variants = {"sucil"};
  std::int64_t budget = 0;
  int jobs = 1;
  bool abhi_noncyclic = false;
  bool capped_literal = false;
  std::vector<std::string> references;
  std::string out_dir;
  bool force = false;
};

int run_bench(const BenchOpts& o) {
  sucil::SuiteConfig cfg;
  cfg.problems = o.problems;
  cfg.dims = o.dims;
  cfg.box_lo = o.box[0];
  cfg.box_hi = o.box[1];
  cfg.variants.clear();
  for (const std::string& v : o.variants) {
    cfg.variants.push_back(require_variant(v));
  }
  cfg.budget = o.budget;
  cfg.jobs = o.jobs;
  cfg.popts.abhi_cyclic = !o.abhi_noncyclic;

  std::vector<sucil::RunRecord> records = sucil::run_suite(cfg);
  int errors = 0;
  for (const sucil::RunRecord& r : records) {
    if (!r.error.empty()) {
      ++errors;
      std::cerr << "warning: " << r.solver << " on " << r.problem
                << " n=" << r.n << " failed: " << r.error << "\n";
    }
  }
  for (const std::string& ref : o.references) {
    const std::vector<sucil::RunRecord> ext = sucil::ingest_reference(ref);
    records.insert(records.end(), ext.begin(), ext.end());
  }

  const std::string dir = o.out_dir.empty() ? default_out_dir() : o.out_dir;
  auto emit = [&](const std::string& name, const std::string& text) {
    const std::string path = dir + "/" + name;
    ensure_writable(path, o.force);
    write_text(path, text);
    std::cout << "wrote " << path << "\n";
  };
  emit("records.csv", sucil::records_csv(records));

  sucil::ProfileOptions popts;
  popts.capped_literal = o.capped_literal;
  struct MetricOut {
    sucil::ProfileMetric metric;
    std::string tag;
  };
  for (const MetricOut& mo :
       {MetricOut{sucil::ProfileMetric::Terminate, "terminate"},
        MetricOut{sucil::ProfileMetric::FirstOpt, "first_opt"}}) {
    const sucil::Profile prof = sucil::make_profile(records, mo.metric, popts);
    emit("profile_" + mo.tag + "_ratios.csv", sucil::ratios_csv(prof));
    emit("profile_" + mo.tag + "_samples.csv", sucil::samples_csv(prof));
    if (mo.metric == sucil::ProfileMetric::Terminate) {
      for (const std::string& s : prof.solvers) {
        std::cout << "best-or-tied [" << mo.tag << "] " << s << ": "
                  << 100.0 * sucil::best_share(prof, s) << "%\n";
      }
    }
  }
  std::cout << records.size() << " records (" << errors << " failed)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// export-milp
// ---------------------------------------------------------------------------

struct ExportOpts {
  CommonOpts common;
  std::string variant = "sucil";
  int iters = 1;
  bool with_exclusion = false;
  bool shared_bigm = false;
  std::optional<double> l_f;
  std::optional<double> eps_lambda;
  std::string out;
  bool force = false;
};

int run_export(const ExportOpts& o) {
  const sucil::ProblemSpec spec =
      sucil::make_problem(o.common.problem, o.common.n, o.common.popts());
  const sucil::Domain dom = o.common.domain();
  sucil::SolverConfig cfg;
  cfg.variant = require_variant(o.variant);
  // Truncate after the requested number of iterations: the stencil pass
  // costs 2n+1 evaluations, each later iteration one more.
  cfg.budget = 2 * o.common.n + 1 + (o.iters - 1);
  const sucil::Certificate cert = sucil::solve(spec, dom, cfg);

  sucil::CpfOptions copts;
  copts.with_no_good = o.with_exclusion;
  copts.shared_M_eta = o.shared_bigm;
  if (o.l_f) {
    copts.l_f = o.l_f;
  } else if (std::isfinite(cert.lower)) {
    copts.l_f = cert.lower;
  }
  copts.force_eps_lambda = o.eps_lambda;
  const sucil::CpfModel model = sucil::build_cpf(cert.evals, dom, copts);

  std::string out = o.out;
  if (out.empty()) {
    out = default_out_dir() + "/" + spec.name + "_n" +
          std::to_string(o.common.n) + "_k" + std::to_string(o.iters) + ".lp";
  }
  ensure_writable(out, o.force);
  ensure_writable(out + ".constants.txt", o.force);
  sucil::export_lp(model, out);

  std::int64_t bins = 0, conts = 0, ints = 0;
  for (const sucil::LpVar& v : model.lp.vars) {
    switch (v.kind) {
      case sucil::VarKind::Binary: ++bins; break;
      case sucil::VarKind::Continuous: ++conts; break;
      case sucil::VarKind::Integer: ++ints; break;
    }
  }
  std::cout << "evaluated points  " << model.evaluated.size() << "\n";
  std::cout << "cuts              " << model.cuts.size() << "\n";
  std::cout << "variables         " << model.lp.vars.size() << " (" << bins
            << " binary, " << ints << " integer, " << conts
            << " continuous)\n";
  std::cout << "rows              " << model.lp.rows.size() << "\n";
  std::cout << "wrote             " << out << "\n";
  std::cout << "wrote             " << out << ".constants.txt\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// probe-convexity
// ---------------------------------------------------------------------------

struct ProbeOpts {
  CommonOpts common;
  int trials = 2000;
  std::uint64_t seed = 20260823;
};

int run_probe(const ProbeOpts& o) {
  const sucil::ProblemSpec spec =
      sucil::make_problem(o.common.problem, o.common.n, o.common.popts());
  const sucil::Domain dom = o.common.domain();
  const sucil::ProbeReport rep =
      sucil::convexity_probe(spec, dom, o.trials, o.seed);
  std::cout << "problem   " << spec.name << " (n=" << o.common.n << ")\n";
  std::cout << "trials    " << rep.trials << "\n";
  std::cout << "result    " << (rep.pass ? "no violations" : "VIOLATED")
            << " (" << rep.violations << " violations)\n";
  return rep.pass ? kExitOk : kExitUncertified;
}

// ---------------------------------------------------------------------------
// list-problems
// ---------------------------------------------------------------------------

int run_list(bool abhi_noncyclic) {
  sucil::ProblemOptions popts;
  popts.abhi_cyclic = !abhi_noncyclic;
  std::cout << "name     min-n  start      known minimum\n";
  for (const std::string& name : sucil::problem_names()) {
    int min_n = 1;
    sucil::ProblemSpec spec;
    try {
      spec = sucil::make_problem(name, 1, popts);
    } catch (const sucil::DimensionTooSmallError&) {
      min_n = 2;
      spec = sucil::make_problem(name, 2, popts);
    }
    std::string start =
        spec.start_policy == sucil::StartPolicy::Origin ? "origin" : "midpoint";
    std::printf("%-8s %-6d %-10s f*=%g, %s\n", name.c_str(), min_n,
                start.c_str(), spec.known_min, spec.argmin_note.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Certified global minimization of convex functions on integer "
      "lattices via secant cuts"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.footer(
      "Output files default to the directory in SUCIL_OUT_DIR (else the "
      "current directory). Existing files are only replaced with --force.");

  SolveOpts so;
  CLI::App* solve = app.add_subcommand(
      "solve", "Minimize one problem instance and write a certificate");
  add_common(solve, so.common, true);
  solve->add_option("--variant", so.variant,
                    "Solver variant (sucil, noTR, ideal1, ideal2)");
  solve->add_option("--budget", so.budget,
                    "Max evaluations (0 = lattice size)");
  solve->add_option("--start", so.start,
                    "Starting point coordinates (default per problem)")
      ->expected(-1);
  solve->add_option("--out", so.out, "Certificate path (JSON)");
  solve->add_flag("--force", so.force, "Overwrite existing output");
  solve->add_option("--delta-min", so.delta_min,
                    "Smallest trust-region radius")
      ->check(CLI::PositiveNumber);
  solve->add_option("--certify-tol", so.certify_tol,
                    "Bound gap at which a run certifies");
  solve->add_option("--poised-tol", so.poised_tol,
                    "Relative diagonal threshold for poisedness");
  solve->add_option("--membership-tol", so.membership_tol,
                    "Facet-positivity threshold for cone membership");

  BenchOpts bo;
  CLI::App* bench = app.add_subcommand(
      "bench", "Run the benchmark suite and emit profile CSVs");
  bench->add_option("--problems", bo.problems,
                    "Problem names (default: all)")
      ->delimiter(',');
  bench->add_option("--n", bo.dims, "Dimensions to run")->expected(-1);
  bench->add_option("--box", bo.box, "Box bounds LO HI")->expected(2);
  bench->add_option("--variants", bo.variants,
                    "Solver variants, comma separated")
      ->delimiter(',');
  bench->add_option("--budget", bo.budget, "Max evaluations per run (0 = "
                    "lattice size)");
  bench->add_option("--jobs", bo.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--abhi-noncyclic", bo.abhi_noncyclic,
                  "Open-chain abhi sum");
  bench->add_flag("--capped-literal", bo.capped_literal,
                  "Profile budget-capped runs at face value instead of +inf");
  bench->add_option("--reference", bo.references,
                    "Reference CSV file(s) merged before profiling")
      ->expected(-1);
  bench->add_option("--out-dir", bo.out_dir, "Directory for CSV output");
  bench->add_flag("--force", bo.force, "Overwrite existing output");

  ExportOpts eo;
  CLI::App* exp = app.add_subcommand(
      "export-milp",
      "Export the mixed-integer model of the current underestimator");
  add_common(exp, eo.common, true);
  exp->add_option("--variant", eo.variant, "Variant used for the prefix run");
  exp->add_option("--iters", eo.iters,
                  "Solver iterations before the model snapshot")
      ->check(CLI::PositiveNumber);
  exp->add_flag("--with-exclusion", eo.with_exclusion,
                "Add binary rows excluding already-evaluated points");
  exp->add_flag("--shared-bigm", eo.shared_bigm,
                "One activation constant for all cuts (default: per cut)");
  exp->add_option("--l-f", eo.l_f,
                  "Global lower bound on f (default: the prefix run's bound)");
  exp->add_option("--eps-lambda", eo.eps_lambda,
                  "Force the separation threshold (default: derived)");
  exp->add_option("--out", eo.out, "LP file path");
  exp->add_flag("--force", eo.force, "Overwrite existing output");

  ProbeOpts po;
  CLI::App* probe = app.add_subcommand(
      "probe-convexity", "Sample midpoint-convexity of a problem");
  add_common(probe, po.common, true);
  probe->add_option("--trials", po.trials, "Number of sampled segments")
      ->check(CLI::PositiveNumber);
  probe->add_option("--seed", po.seed, "Sampling seed");

  bool list_noncyclic = false;
  CLI::App* list = app.add_subcommand("list-problems",
                                      "Show the problem registry");
  list->add_flag("--abhi-noncyclic", list_noncyclic, "Open-chain abhi sum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand(solve)) return run_solve(so);
    if (app.got_subcommand(bench)) return run_bench(bo);
    if (app.got_subcommand(exp)) return run_export(eo);
    if (app.got_subcommand(probe)) return run_probe(po);
    if (app.got_subcommand(list)) return run_list(list_noncyclic);
  } catch (const sucil::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
