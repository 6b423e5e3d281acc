#include "sucil/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "sucil/errors.hpp"

namespace sucil {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHitTol = 1e-9;

RunRecord run_one(Variant variant, const std::string& problem, int n,
                  const SuiteConfig& cfg) {
  RunRecord rec;
  rec.solver = std::string(variant_name(variant));
  rec.problem = problem;
  rec.n = n;
  try {
    const ProblemSpec spec = make_problem(problem, n, cfg.popts);
    const Domain dom{Box::uniform(n, cfg.box_lo, cfg.box_hi)};
    SolverConfig scfg;
    scfg.variant = variant;
    scfg.budget = cfg.budget;
    CountingOracle oracle(spec, dom.box);
    const Certificate cert = solve(oracle, dom, scfg);
    rec.n_terminate = cert.evaluations;
    rec.certified = cert.certified;
    rec.seconds = cert.seconds;
    const BruteForceResult truth = brute_force_oracle(spec, dom);
    rec.n_first_opt = -1;
    for (std::size_t i = 0; i < cert.evals.size(); ++i) {
      if (cert.evals[i].second <= truth.min_value + kHitTol) {
        rec.n_first_opt = static_cast<std::int64_t>(i) + 1;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

bool record_less(const RunRecord& a, const RunRecord& b) {
  if (a.solver != b.solver) return a.solver < b.solver;
  if (a.problem != b.problem) return a.problem < b.problem;
  return a.n < b.n;
}

}  // namespace

std::vector<RunRecord> run_suite(const SuiteConfig& cfg) {
  const std::vector<std::string> problems =
      cfg.problems.empty() ? problem_names() : cfg.problems;
  struct Task {
    Variant variant;
    std::string problem;
    int n;
  };
  std::vector<Task> tasks;
  for (const Variant v : cfg.variants) {
    for (const std::string& p : problems) {
      for (const int n : cfg.dims) tasks.push_back({v, p, n});
    }
  }
  std::vector<RunRecord> records(tasks.size());
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      records[i] = run_one(tasks[i].variant, tasks[i].problem, tasks[i].n, cfg);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        records[i] =
            run_one(tasks[i].variant, tasks[i].problem, tasks[i].n, cfg);
      }
    };
    std::vector<std::thread> pool;
    const int workers =
        std::min<int>(jobs, static_cast<int>(tasks.size()));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  std::stable_sort(records.begin(), records.end(), record_less);
  return records;
}

Profile make_profile(const std::vector<RunRecord>& records,
                     ProfileMetric metric, const ProfileOptions& opts) {
  Profile prof;
  std::set<std::string> solver_set;
  std::set<std::pair<std::string, int>> group_set;
  for (const RunRecord& r : records) {
    solver_set.insert(r.solver);
    group_set.insert({r.problem, r.n});
  }
  prof.solvers.assign(solver_set.begin(), solver_set.end());
  prof.groups.assign(group_set.begin(), group_set.end());
  const std::size_t S = prof.solvers.size();
  const std::size_t G = prof.groups.size();
  if (S == 0 || G == 0) {
    throw MissingPairError("no records to profile");
  }

  std::map<std::string, std::size_t> sidx;
  for (std::size_t s = 0; s < S; ++s) sidx[prof.solvers[s]] = s;
  std::map<std::pair<std::string, int>, std::size_t> gidx;
  for (std::size_t g = 0; g < G; ++g) gidx[prof.groups[g]] = g;

  prof.value.assign(S, std::vector<double>(G, kInf));
  std::vector<std::vector<int>> seen(S, std::vector<int>(G, 0));
  for (const RunRecord& r : records) {
    const std::size_t s = sidx[r.solver];
    const std::size_t g = gidx[{r.problem, r.n}];
    if (++seen[s][g] > 1) {
      throw MissingPairError("solver '" + r.solver + "' appears twice on " +
                             r.problem + " n=" + std::to_string(r.n));
    }
    double v = kInf;
    if (r.error.empty()) {
      switch (metric) {
        case ProfileMetric::Terminate:
          if (r.certified || opts.capped_literal) {
            v = static_cast<double>(r.n_terminate);
          }
          break;
        case ProfileMetric::FirstOpt:
          if (r.n_first_opt > 0) v = static_cast<double>(r.n_first_opt);
          break;
      }
    }
    prof.value[s][g] = v;
  }
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t g = 0; g < G; ++g) {
      if (!seen[s][g]) {
        throw MissingPairError("solver '" + prof.solvers[s] + "' missing on " +
                               prof.groups[g].first +
                               " n=" + std::to_string(prof.groups[g].second));
      }
    }
  }

  prof.ratio.assign(S, std::vector<double>(G, kInf));
  for (std::size_t g = 0; g < G; ++g) {
    double best = kInf;
    for (std::size_t s = 0; s < S; ++s) {
      best = std::min(best, prof.value[s][g]);
    }
    for (std::size_t s = 0; s < S; ++s) {
      const double v = prof.value[s][g];
      if (std::isinf(best) || std::isinf(v)) continue;
      prof.ratio[s][g] = v == best ? 1.0 : v / best;
    }
  }

  std::set<double> grid{1.0};
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t g = 0; g < G; ++g) {
      if (std::isfinite(prof.ratio[s][g])) grid.insert(prof.ratio[s][g]);
    }
  }
  prof.alpha.assign(grid.begin(), grid.end());
  prof.rho.assign(S, std::vector<double>(prof.alpha.size(), 0.0));
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < prof.alpha.size(); ++a) {
      std::size_t count = 0;
      for (std::size_t g = 0; g < G; ++g) {
        if (prof.ratio[s][g] <= prof.alpha[a] + 1e-12) ++count;
      }
      prof.rho[s][a] =
          static_cast<double>(count) / static_cast<double>(G);
    }
  }
  return prof;
}

double best_share(const Profile& profile, const std::string& solver) {
  const auto it =
      std::find(profile.solvers.begin(), profile.solvers.end(), solver);
  if (it == profile.solvers.end()) {
    throw MissingPairError("solver '" + solver + "' not present in profile");
  }
  const std::size_t s =
      static_cast<std::size_t>(it - profile.solvers.begin());
  std::size_t wins = 0;
  for (const double r : profile.ratio[s]) {
    if (r == 1.0) ++wins;
  }
  return static_cast<double>(wins) /
         static_cast<double>(profile.groups.size());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream iss(line);
  while (std::getline(iss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::int64_t parse_int_field(const std::string& field, const std::string& what,
                             const std::string& origin, int line_no) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw SchemaMismatchError(origin + " line " + std::to_string(line_no) +
                              ": bad " + what + " value '" + field + "'");
  }
}

}  // namespace

std::vector<RunRecord> parse_reference_csv(const std::string& text,
                                           const std::string& origin) {
  static const std::vector<std::string> kHeader = {
      "solver", "problem", "n", "n_terminate", "n_first_opt", "certified"};
  std::vector<RunRecord> out;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(stream, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (raw[0] == '#') continue;
    const std::vector<std::string> fields = split_csv(raw);
    if (!header_seen) {
      if (fields != kHeader) {
        throw SchemaMismatchError(
            origin + " line " + std::to_string(line_no) +
            ": header must be solver,problem,n,n_terminate,n_first_opt,"
            "certified");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kHeader.size()) {
      throw SchemaMismatchError(origin + " line " + std::to_string(line_no) +
                                ": expected " +
                                std::to_string(kHeader.size()) +
                                " fields, got " +
                                std::to_string(fields.size()));
    }
    RunRecord rec;
    rec.solver = fields[0];
    rec.problem = fields[1];
    rec.n = static_cast<int>(parse_int_field(fields[2], "n", origin, line_no));
    rec.n_terminate =
        parse_int_field(fields[3], "n_terminate", origin, line_no);
    rec.n_first_opt =
        parse_int_field(fields[4], "n_first_opt", origin, line_no);
    if (fields[5] != "0" && fields[5] != "1") {
      throw SchemaMismatchError(origin + " line " + std::to_string(line_no) +
                                ": certified must be 0 or 1, got '" +
                                fields[5] + "'");
    }
    rec.certified = fields[5] == "1";
    rec.external = true;
    out.push_back(std::move(rec));
  }
  if (!header_seen) {
    throw SchemaMismatchError(origin + ": no header line found");
  }
  return out;
}

std::vector<RunRecord> ingest_reference(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailureError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_reference_csv(buf.str(), path);
}

std::string records_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "solver,problem,n,n_terminate,n_first_opt,certified,error\n";
  for (const RunRecord& r : records) {
    out << r.solver << ',' << r.problem << ',' << r.n << ',' << r.n_terminate
        << ',' << r.n_first_opt << ',' << (r.certified ? 1 : 0) << ','
        << r.error << '\n';
  }
  return out.str();
}

namespace {

std::string fmt_ratio(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

std::string ratios_csv(const Profile& profile) {
  std::ostringstream out;
  out << "solver,problem,n,N,ratio\n";
  for (std::size_t s = 0; s < profile.solvers.size(); ++s) {
    for (std::size_t g = 0; g < profile.groups.size(); ++g) {
      out << profile.solvers[s] << ',' << profile.groups[g].first << ','
          << profile.groups[g].second << ',' << fmt_ratio(profile.value[s][g])
          << ',' << fmt_ratio(profile.ratio[s][g]) << '\n';
    }
  }
  return out.str();
}

std::string samples_csv(const Profile& profile) {
  std::ostringstream out;
  out << "solver,alpha,rho\n";
  for (std::size_t s = 0; s < profile.solvers.size(); ++s) {
    for (std::size_t a = 0; a < profile.alpha.size(); ++a) {
      out << profile.solvers[s] << ',' << fmt_ratio(profile.alpha[a]) << ','
          << fmt_ratio(profile.rho[s][a]) << '\n';
    }
  }
  return out.str();
}

}  // namespace sucil
