#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sucil/bench.hpp"

using namespace sucil;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RunRecord rec(std::string solver, std::string problem, int n,
              std::int64_t n_terminate, std::int64_t n_first_opt,
              bool certified) {
  RunRecord r;
  r.solver = std::move(solver);
  r.problem = std::move(problem);
  r.n = n;
  r.n_terminate = n_terminate;
  r.n_first_opt = n_first_opt;
  r.certified = certified;
  return r;
}

std::string data_path(const std::string& name) {
  return std::string(SUCIL_TEST_DATA_DIR) + "/" + name;
}

const RunRecord& find_rec(const std::vector<RunRecord>& rs,
                          const std::string& solver,
                          const std::string& problem, int n) {
  for (const RunRecord& r : rs)
    if (r.solver == solver && r.problem == problem && r.n == n) return r;
  REQUIRE_MESSAGE(false, "record not found: " << solver << "/" << problem
                                              << "/n=" << n);
  static RunRecord dummy;
  return dummy;
}

// Minimal reader for the per-replicate fixture schema
// problem,n,replicate,n_terminate,n_first_opt.
struct ReplicateSums {
  std::int64_t terminate = 0;
  std::int64_t first = 0;
  int count = 0;
};

std::map<std::string, ReplicateSums> replicate_sums(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  std::map<std::string, ReplicateSums> sums;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      CHECK(line == "problem,n,replicate,n_terminate,n_first_opt");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string problem, field;
    REQUIRE(std::getline(row, problem, ','));
    REQUIRE(std::getline(row, field, ','));  // n (unused here)
    REQUIRE(std::getline(row, field, ','));  // replicate index
    REQUIRE(std::getline(row, field, ','));
    std::int64_t terminate = std::stoll(field);
    REQUIRE(std::getline(row, field, ','));
    std::int64_t first = std::stoll(field);
    auto& s = sums[problem];
    s.terminate += terminate;
    s.first += first;
    ++s.count;
  }
  return sums;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("two-solver profile: values, ratios, grid, and shares") {
  std::vector<RunRecord> rs{
      rec("B", "p1", 2, 20, 5, true), rec("A", "p2", 2, 30, 9, true),
      rec("A", "p1", 2, 10, 3, true), rec("B", "p2", 2, 30, 2, true)};
  Profile prof = make_profile(rs, ProfileMetric::Terminate);
  CHECK(prof.solvers == std::vector<std::string>{"A", "B"});
  CHECK(prof.groups ==
        std::vector<std::pair<std::string, int>>{{"p1", 2}, {"p2", 2}});
  CHECK(prof.value[0][0] == doctest::Approx(10.0));
  CHECK(prof.value[1][0] == doctest::Approx(20.0));
  CHECK(prof.ratio[0][0] == doctest::Approx(1.0));
  CHECK(prof.ratio[1][0] == doctest::Approx(2.0));
  CHECK(prof.ratio[0][1] == doctest::Approx(1.0));  // tie counts as best
  CHECK(prof.ratio[1][1] == doctest::Approx(1.0));
  CHECK(prof.alpha == std::vector<double>{1.0, 2.0});
  CHECK(prof.rho[0] == std::vector<double>{1.0, 1.0});
  CHECK(prof.rho[1] == std::vector<double>{0.5, 1.0});
  CHECK(best_share(prof, "A") == doctest::Approx(1.0));
  CHECK(best_share(prof, "B") == doctest::Approx(0.5));
  CHECK_THROWS_AS((void)best_share(prof, "C"), MissingPairError);
}

TEST_CASE("budget-capped runs count as unsolved unless taken literally") {
  std::vector<RunRecord> rs{rec("A", "p", 3, 10, 1, true),
                            rec("B", "p", 3, 100, 1, false)};
  Profile prof = make_profile(rs, ProfileMetric::Terminate);
  CHECK(prof.value[1][0] == kInf);
  CHECK(prof.ratio[1][0] == kInf);
  CHECK(prof.alpha == std::vector<double>{1.0});
  CHECK(prof.rho[1] == std::vector<double>{0.0});

  ProfileOptions literal;
  literal.capped_literal = true;
  Profile lit = make_profile(rs, ProfileMetric::Terminate, literal);
  CHECK(lit.value[1][0] == doctest::Approx(100.0));
  CHECK(lit.ratio[1][0] == doctest::Approx(10.0));
  CHECK(lit.alpha == std::vector<double>{1.0, 10.0});
  CHECK(lit.rho[1] == std::vector<double>{0.0, 1.0});
}

TEST_CASE("first-hit metric treats a miss as unsolved") {
  std::vector<RunRecord> rs{rec("A", "p", 3, 10, -1, true),
                            rec("B", "p", 3, 100, 7, true)};
  Profile prof = make_profile(rs, ProfileMetric::FirstOpt);
  CHECK(prof.value[0][0] == kInf);
  CHECK(prof.value[1][0] == doctest::Approx(7.0));
  CHECK(prof.ratio[0][0] == kInf);
  CHECK(prof.ratio[1][0] == doctest::Approx(1.0));
}

TEST_CASE("failed runs enter every profile at infinity") {
  RunRecord broken = rec("A", "p", 3, 10, 1, true);
  broken.error = "exploded";
  std::vector<RunRecord> rs{broken, rec("B", "p", 3, 4, 1, true)};
  for (ProfileMetric m : {ProfileMetric::Terminate, ProfileMetric::FirstOpt}) {
    Profile prof = make_profile(rs, m);
    CHECK(prof.value[0][0] == kInf);
  }
}

TEST_CASE("profiles demand exactly one record per solver and group") {
  std::vector<RunRecord> rs{rec("A", "p1", 2, 10, 1, true),
                            rec("A", "p2", 2, 10, 1, true),
                            rec("B", "p1", 2, 10, 1, true)};
  try {
    (void)make_profile(rs, ProfileMetric::Terminate);
    FAIL("expected MissingPairError");
  } catch (const MissingPairError& e) {
    CHECK(std::string(e.what()).find("missing on p2") != std::string::npos);
  }

  rs.push_back(rec("B", "p2", 2, 12, 1, true));
  rs.push_back(rec("B", "p2", 2, 12, 1, true));
  try {
    (void)make_profile(rs, ProfileMetric::Terminate);
    FAIL("expected MissingPairError");
  } catch (const MissingPairError& e) {
    CHECK(std::string(e.what()).find("appears twice") != std::string::npos);
  }

  CHECK_THROWS_AS((void)make_profile({}, ProfileMetric::Terminate),
                  MissingPairError);
}

TEST_CASE("reference parser accepts comments, blanks, and CR endings") {
  const std::string text =
      "# external measurements\n"
      "\n"
      "solver,problem,n,n_terminate,n_first_opt,certified\n"
      "NOMAD,quad,3,53,18,1\r\n"
      "DFLINT,maxq,4,1001,1,0\n";
  auto rs = parse_reference_csv(text, "inline");
  REQUIRE(rs.size() == 2);
  CHECK(rs[0].solver == "NOMAD");
  CHECK(rs[0].problem == "quad");
  CHECK(rs[0].n == 3);
  CHECK(rs[0].n_terminate == 53);
  CHECK(rs[0].n_first_opt == 18);
  CHECK(rs[0].certified);
  CHECK(rs[0].external);
  CHECK_FALSE(rs[1].certified);
}

TEST_CASE("reference parser pins schema faults to their line") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    try {
      (void)parse_reference_csv(text, "inline");
      FAIL_CHECK("expected SchemaMismatchError for: " << needle);
    } catch (const SchemaMismatchError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  fails_with("solver,problem,n\nx,y,3\n", "inline line 1");
  fails_with(
      "# c\nsolver,problem,n,n_terminate,n_first_opt,certified\nA,p,3,10,1\n",
      "inline line 3");
  fails_with(
      "solver,problem,n,n_terminate,n_first_opt,certified\nA,p,3,ten,1,1\n",
      "bad n_terminate");
  fails_with(
      "solver,problem,n,n_terminate,n_first_opt,certified\nA,p,3,10,1,2\n",
      "certified must be 0 or 1");
}

TEST_CASE("missing reference files fail loudly") {
  CHECK_THROWS_AS((void)ingest_reference("/no/such/file.csv"), IoFailureError);
}

TEST_CASE("shipped reference fixtures load and spot-check") {
  auto n3 = ingest_reference(data_path("reference_counts_n3.csv"));
  CHECK(n3.size() == 56);  // 7 solvers x 8 problems
  const RunRecord& dflint = find_rec(n3, "DFLINT", "abhi", 3);
  CHECK(dflint.n_terminate == 161);
  CHECK(dflint.n_first_opt == 57);
  CHECK(dflint.certified);
  CHECK(dflint.external);
  CHECK(find_rec(n3, "SUCIL", "maxq", 3).n_terminate == 14);
  CHECK(find_rec(n3, "SUCIL", "maxq", 3).n_first_opt == 1);

  auto n5 = ingest_reference(data_path("reference_counts_n5.csv"));
  CHECK(n5.size() == 56);
  CHECK(find_rec(n5, "SUCIL", "maxq", 5).n_terminate == 80);
  const RunRecord& capped = find_rec(n5, "DFLINT", "abhi", 5);
  CHECK(capped.n_terminate == 1001);
  CHECK_FALSE(capped.certified);
}

TEST_CASE("surrogate-solver summary rows equal the floored replicate means") {
  // The third-party surrogate solver is randomized; its reference row is the
  // floor of the mean over 20 replicates, which we re-derive from the
  // shipped per-replicate data.  Two cells of the upstream data are known
  // to disagree with the published summaries; they are pinned here exactly
  // so any transcription drift still fails the test.
  for (int n : {3, 4, 5}) {
    CAPTURE(n);
    auto sums =
        replicate_sums(data_path("matsumoto_runs_n" + std::to_string(n) + ".csv"));
    auto refs = ingest_reference(
        data_path("reference_counts_n" + std::to_string(n) + ".csv"));
    CHECK(sums.size() == 8);
    for (const auto& [problem, s] : sums) {
      CAPTURE(problem);
      REQUIRE(s.count == 20);
      const std::int64_t mean_terminate = s.terminate / 20;
      const std::int64_t mean_first = s.first / 20;
      const RunRecord& ref = find_rec(refs, "MATSuMoTo", problem, n);
      if (n == 5 && problem == "CB3II") {
        CHECK(mean_terminate == 354);  // raw outlier 1626; summary says 281
        CHECK(ref.n_terminate == 281);
        CHECK(mean_first == ref.n_first_opt);
      } else if (n == 4 && problem == "CB3I") {
        CHECK(mean_first == 72);  // summary says 81
        CHECK(ref.n_first_opt == 81);
        CHECK(mean_terminate == ref.n_terminate);
      } else {
        CHECK(mean_terminate == ref.n_terminate);
        CHECK(mean_first == ref.n_first_opt);
      }
    }
  }
}

TEST_CASE("fixture profile: the solver leads on most instance groups") {
  std::vector<RunRecord> all;
  for (int n : {3, 4, 5}) {
    auto rs = ingest_reference(
        data_path("reference_counts_n" + std::to_string(n) + ".csv"));
    for (RunRecord& r : rs) {
      // The clairvoyant baseline variant would sweep the board; the claim
      // under test compares the implementable solver with external ones.
      if (r.solver != "SUCIL-ideal1") all.push_back(std::move(r));
    }
  }
  Profile prof = make_profile(all, ProfileMetric::Terminate);
  CHECK(prof.solvers.size() == 6);
  CHECK(prof.groups.size() == 24);
  CHECK(best_share(prof, "SUCIL") > 0.65);
  // Cumulative shares never decrease along the ratio grid.
  for (std::size_t s = 0; s < prof.solvers.size(); ++s)
    for (std::size_t a = 1; a < prof.alpha.size(); ++a)
      CHECK(prof.rho[s][a] >= prof.rho[s][a - 1]);
}

TEST_CASE("suite runs are deterministic and keep going on bad input") {
  SuiteConfig cfg;
  cfg.problems = {"quad"};
  cfg.dims = {2};
  cfg.variants = {Variant::Sucil, Variant::SucilIdeal2};
  auto rs1 = run_suite(cfg);
  auto rs2 = run_suite(cfg);
  REQUIRE(rs1.size() == 2);
  CHECK(rs1[0].solver == "SUCIL");
  CHECK(rs1[1].solver == "SUCIL-ideal2");
  for (const RunRecord& r : rs1) {
    CHECK(r.certified);
    CHECK(r.error.empty());
    CHECK(r.n_first_opt > 0);
    CHECK_FALSE(r.external);
  }
  CHECK(records_csv(rs1) == records_csv(rs2));

  SuiteConfig par = cfg;
  par.jobs = 2;
  CHECK(records_csv(run_suite(par)) == records_csv(rs1));

  SuiteConfig bad = cfg;
  bad.problems = {"quad", "nope"};
  bad.variants = {Variant::Sucil};
  auto rs3 = run_suite(bad);
  REQUIRE(rs3.size() == 2);
  CHECK(rs3[0].problem == "nope");
  CHECK_FALSE(rs3[0].error.empty());
  CHECK(rs3[1].problem == "quad");
  CHECK(rs3[1].error.empty());
}

TEST_CASE("emitted tables carry the documented headers") {
  std::vector<RunRecord> rs{rec("A", "p", 3, 10, 2, true),
                            rec("B", "p", 3, 20, -1, false)};
  Profile prof = make_profile(rs, ProfileMetric::Terminate);

  std::istringstream recs(records_csv(rs));
  std::string line;
  REQUIRE(std::getline(recs, line));
  CHECK(line == "solver,problem,n,n_terminate,n_first_opt,certified,error");
  REQUIRE(std::getline(recs, line));
  CHECK(line == "A,p,3,10,2,1,");

  std::istringstream ratios(ratios_csv(prof));
  REQUIRE(std::getline(ratios, line));
  CHECK(line == "solver,problem,n,N,ratio");
  REQUIRE(std::getline(ratios, line));
  CHECK(line == "A,p,3,10,1");
  REQUIRE(std::getline(ratios, line));
  CHECK(line == "B,p,3,inf,inf");  // capped run renders as inf, not a number

  std::istringstream samples(samples_csv(prof));
  REQUIRE(std::getline(samples, line));
  CHECK(line == "solver,alpha,rho");
  REQUIRE(std::getline(samples, line));
  CHECK(line == "A,1,1");
}

}  // TEST_SUITE("bench")
