#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sucil/solver.hpp"

using namespace sucil;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Certificate run(const char* problem, int n, Variant v,
                std::int64_t budget = 0) {
  SolverConfig cfg;
  cfg.variant = v;
  cfg.budget = budget;
  Domain dom{Box::uniform(n, -4, 4)};
  return solve(make_problem(problem, n), dom, cfg);
}

bool contains_point(const std::vector<Point>& pts, const Point& x) {
  return std::find(pts.begin(), pts.end(), x) != pts.end();
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("trust-region radius grows on success and halves on failure") {
  CHECK(step_radius(3, true, 1) == 4);
  CHECK(step_radius(1, true, 1) == 2);
  CHECK(step_radius(3, false, 1) == 1);
  CHECK(step_radius(8, false, 1) == 4);
  CHECK(step_radius(1, false, 1) == 1);
  CHECK(step_radius(5, false, 3) == 3);
}

TEST_CASE("starting stencil order is frozen") {
  Domain dom{Box::uniform(2, -4, 4)};
  auto pts = initial_stencil(Point{0, 0}, dom);
  CHECK(pts == std::vector<Point>{{0, 0}, {-1, 0}, {0, -1}, {1, 0}, {0, 1}});
  auto off = initial_stencil(Point{3, -2}, dom);
  CHECK(off[0] == Point{3, -2});
  CHECK(off.size() == 5);
}

TEST_CASE("a start on the boundary is rejected with the violating points") {
  Domain dom{Box::uniform(2, -4, 4)};
  try {
    (void)initial_stencil(Point{-4, 0}, dom);
    FAIL("expected StencilOutsideBoxError");
  } catch (const StencilOutsideBoxError& e) {
    const std::string what = e.what();
    CHECK(what.find("(-5,0)") != std::string::npos);
    CHECK(what.find("recenter") != std::string::npos);
  }
}

TEST_CASE("every variant certifies the separable quadratic in 2-d") {
  for (Variant v : {Variant::Sucil, Variant::SucilNoTR, Variant::SucilIdeal1,
                    Variant::SucilIdeal2}) {
    CAPTURE(variant_name(v));
    Certificate cert = run("quad", 2, v);
    CHECK(cert.certified);
    CHECK(cert.status == SolveStatus::Certified);
    CHECK(cert.upper == doctest::Approx(0.0));
    CHECK(cert.lower == doctest::Approx(0.0));
    CHECK(cert.upper - cert.lower <= 1e-9);
    CHECK(cert.best == Point{2, 2});
    CHECK(cert.evaluations < 81);  // strictly better than enumeration
    CHECK(cert.evaluations == std::int64_t(cert.evals.size()));
    CHECK(cert.first_best >= 1);
    CHECK(cert.first_best <= cert.evaluations);
    REQUIRE_FALSE(cert.stats.empty());
    // 2-d starting stencil: 10 candidate triples, 2 of them collinear.
    CHECK(cert.stats[0].combos_total == 10);
    CHECK(cert.stats[0].combos_poised == 8);
  }
}

TEST_CASE("first iteration enumerates the documented 3-d combination count") {
  Certificate cert = run("quad", 3, Variant::Sucil);
  REQUIRE_FALSE(cert.stats.empty());
  CHECK(cert.stats[0].combos_total == 35);
  CHECK(cert.stats[0].combos_poised == 20);
  CHECK(cert.certified);
  CHECK(cert.best == Point{2, 2, 2});
}

TEST_CASE("certified optimum matches exhaustive search on a flat valley") {
  Domain dom{Box::uniform(3, -4, 4)};
  ProblemSpec lq = make_problem("LQ", 3);
  BruteForceResult bf = brute_force_oracle(lq, dom);
  Certificate cert = run("LQ", 3, Variant::Sucil);
  CHECK(cert.certified);
  CHECK(cert.upper == doctest::Approx(bf.min_value));
  CHECK(contains_point(bf.argmins, cert.best));
}

TEST_CASE("an undersized budget reports honest bounds") {
  Certificate cert = run("quad", 3, Variant::Sucil, /*budget=*/10);
  CHECK_FALSE(cert.certified);
  CHECK(cert.status == SolveStatus::BudgetExhausted);
  CHECK(cert.evaluations == 10);
  CHECK(cert.upper - cert.lower > 1e-9);
  CHECK(cert.upper >= 0.0);  // upper is a real observed value
}

TEST_CASE("on the 0/1 cube the run costs exactly 2^n evaluations") {
  for (int n = 2; n <= 3; ++n) {
    CAPTURE(n);
    SolverConfig cfg;
    std::vector<Point> init{Point(n, 0)};
    for (int h = 0; h < n; ++h) {
      Point e(n, 0);
      e[h] = 1;
      init.push_back(e);
    }
    cfg.initial_points = init;
    Domain dom{Box::uniform(n, 0, 1)};
    Certificate cert = solve(make_problem("quad", n), dom, cfg);
    CHECK(cert.certified);
    CHECK(cert.evaluations == (std::int64_t(1) << n));
    CHECK(cert.best == Point(n, 1));  // all-ones is closest to 2e
  }
}

TEST_CASE("problems whose start is already optimal report first hit 1") {
  for (const char* nm : {"maxq", "mxhilb"}) {
    CAPTURE(nm);
    Certificate cert = run(nm, 3, Variant::Sucil);
    CHECK(cert.certified);
    CHECK(cert.first_best == 1);
    CHECK(cert.evals[0].first == Point{0, 0, 0});
  }
}

TEST_CASE("repeat runs are bit-identical") {
  Certificate a = run("CB3II", 3, Variant::Sucil);
  Certificate b = run("CB3II", 3, Variant::Sucil);
  CHECK(a.evaluations == b.evaluations);
  REQUIRE(a.evals.size() == b.evals.size());
  for (std::size_t i = 0; i < a.evals.size(); ++i) {
    CHECK(a.evals[i].first == b.evals[i].first);
    CHECK(a.evals[i].second == b.evals[i].second);
  }
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
  CHECK(a.stats.size() == b.stats.size());
}

TEST_CASE("bounds never cross the true objective anywhere on the lattice") {
  // After every iteration the table must under-estimate f at every feasible
  // point (unbounded entries trivially qualify).
  Domain dom{Box::uniform(2, -4, 4)};
  ProblemSpec spec = make_problem("quad", 2);
  std::int64_t checked = 0;
  IterationHook hook = [&](const IterationView& view) {
    Point x(2);
    for (std::int64_t idx = 0; idx < view.table.size(); ++idx) {
      view.dom.box.point_of(idx, x);
      const double fx = spec.eval(std::span<const int>(x));
      CHECK(view.table.eta(idx) <= fx + 1e-9);
      ++checked;
    }
    CHECK(view.lower <= view.upper + 1e-12);
  };
  SolverConfig cfg;
  Certificate cert = solve(spec, dom, cfg, hook);
  CHECK(cert.certified);
  CHECK(checked > 0);
}

TEST_CASE("cut enumeration visits poised subsets in lexicographic order") {
  // Stencil points around the origin in 2-d, ids 0..4; the two axis-collinear
  // triples are skipped.
  std::vector<std::pair<Point, double>> evals;
  Domain dom{Box::uniform(2, -4, 4)};
  ProblemSpec spec = make_problem("quad", 2);
  for (const Point& p : initial_stencil(Point{0, 0}, dom))
    evals.emplace_back(p, spec.eval(std::span<const int>(p)));

  std::vector<std::vector<std::int32_t>> seen;
  enumerate_cuts(evals, {0, 1, 2, 3, 4},
                 [&](std::span<const std::int32_t> ids, const PoisedSet& ps,
                     const Secant& secant, const ConeComplex& cc) {
                   seen.emplace_back(ids.begin(), ids.end());
                   CHECK(cc.facets.size() == 3);
                   // The secant interpolates the supplied values.
                   for (std::size_t j = 0; j < ps.points.size(); ++j) {
                     const double at = secant.eval(
                         std::span<const int>(ps.points[j]));
                     const double want = evals[std::size_t(ids[j])].second;
                     CHECK(at == doctest::Approx(want));
                   }
                 });
  const std::vector<std::vector<std::int32_t>> expect{
      {0, 1, 2}, {0, 1, 4}, {0, 2, 3}, {0, 3, 4},
      {1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
  CHECK(seen == expect);
}

TEST_CASE("variant names parse forgivingly and render canonically") {
  CHECK(variant_names() == std::vector<std::string>{
                               "SUCIL", "SUCIL-noTR", "SUCIL-ideal1",
                               "SUCIL-ideal2"});
  for (const auto& nm : variant_names()) {
    auto v = parse_variant(nm);
    REQUIRE(v.has_value());
    CHECK(variant_name(*v) == nm);
  }
  CHECK(parse_variant("sucil") == Variant::Sucil);
  CHECK(parse_variant("noTR") == Variant::SucilNoTR);
  CHECK(parse_variant("IDEAL2") == Variant::SucilIdeal2);
  CHECK_FALSE(parse_variant("simplex").has_value());
}

TEST_CASE("run records serialize to parseable structured text") {
  Certificate cert = run("quad", 2, Variant::Sucil);
  nlohmann::json j = nlohmann::json::parse(certificate_json(cert));
  CHECK(j["problem"] == "quad");
  CHECK(j["variant"] == "SUCIL");
  CHECK(j["n"] == 2);
  CHECK(j["certified"] == true);
  CHECK(j["status"] == "certified");
  CHECK(j["best"] == std::vector<int>{2, 2});
  CHECK(j["evaluations"] == cert.evaluations);
  CHECK(j["lower"].get<double>() == doctest::Approx(0.0));
  CHECK(j["iterations"].size() == cert.stats.size());
  CHECK(j["log"].size() == cert.evals.size());
  CHECK(j["log"][0]["x"] == std::vector<int>{0, 0});

  // Unbounded lower bounds render as null, not as a non-standard token.
  Certificate open;
  open.problem = "quad";
  open.variant = "SUCIL";
  open.n = 1;
  open.box = Box::uniform(1, -4, 4);
  open.start = Point{0};
  open.lower = -kInf;
  open.upper = 3.0;
  open.best = Point{0};
  nlohmann::json jc = nlohmann::json::parse(certificate_json(open));
  CHECK(jc["lower"].is_null());
  CHECK(jc["upper"].get<double>() == doctest::Approx(3.0));
  CHECK(jc["status"] == "budget-exhausted");
}

}  // TEST_SUITE("solver")
