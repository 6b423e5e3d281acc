#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sucil/geometry.hpp"

using namespace sucil;

namespace {

// Draw one poised set of n+1 lattice points with coordinates in [-6, 6].
PoisedSet random_poised_set(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coord(-6, 6);
  for (;;) {
    std::vector<Point> pts(n + 1, Point(n));
    for (auto& p : pts)
      for (auto& v : p) v = coord(rng);
    if (auto ps = check_poised(pts)) return std::move(*ps);
  }
}

double facet_at(const Affine& f, const Point& x) {
  return f.eval(std::span<const int>(x));
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("affine evaluation on lattice and real points") {
  Affine f{{2.0, -1.0}, 3.0};
  Point x{4, 5};
  CHECK(f.eval(std::span<const int>(x)) == doctest::Approx(6.0));
  std::vector<double> xr{0.5, 0.25};
  CHECK(f.eval(std::span<const double>(xr)) == doctest::Approx(3.75));
}

TEST_CASE("secant through a plane-unisolvent triangle") {
  auto ps = check_poised({{0, 0}, {1, 0}, {0, 1}});
  REQUIRE(ps.has_value());
  std::array<double, 3> fvals{8.0, 5.0, 5.0};
  Secant s = fit_secant(*ps, fvals);
  REQUIRE(s.c.size() == 2);
  CHECK(s.c[0] == doctest::Approx(-3.0));
  CHECK(s.c[1] == doctest::Approx(-3.0));
  CHECK(s.b == doctest::Approx(8.0));
  // The secant interpolates all three supplied values.
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(facet_at(s, ps->points[j]) == doctest::Approx(fvals[j]));
}

TEST_CASE("normalized facets of the unit triangle") {
  auto ps = check_poised({{0, 0}, {1, 0}, {0, 1}});
  REQUIRE(ps.has_value());
  ConeComplex cc = facet_halfspaces(*ps);
  REQUIRE(cc.facets.size() == 3);
  // Facet j is 1 at its own anchor, 0 at the other two points.
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l)
      CHECK(facet_at(cc.facets[j], cc.anchors[l]) ==
            doctest::Approx(j == l ? 1.0 : 0.0));
  // Closed forms: 1 - x - y, x, y.
  CHECK(cc.facets[0].c[0] == doctest::Approx(-1.0));
  CHECK(cc.facets[0].c[1] == doctest::Approx(-1.0));
  CHECK(cc.facets[0].b == doctest::Approx(1.0));
  CHECK(cc.facets[1].c[0] == doctest::Approx(1.0));
  CHECK(cc.facets[1].c[1] == doctest::Approx(0.0));
  CHECK(cc.facets[1].b == doctest::Approx(0.0));
  CHECK(cc.facets[2].c[0] == doctest::Approx(0.0));
  CHECK(cc.facets[2].c[1] == doctest::Approx(1.0));
  CHECK(cc.facets[2].b == doctest::Approx(0.0));
}

TEST_CASE("cone union does not cover every box point") {
  // Interpolating x1^2 - x1*x2 + x2^2 on {(1,1),(0,1),(1,0)} gives the
  // constant secant 1, yet the true minimum sits at the origin -- which
  // must land outside the union of the three cones so the bound there is
  // left untouched.
  std::vector<Point> pts{{1, 1}, {0, 1}, {1, 0}};
  auto ps = check_poised(pts);
  REQUIRE(ps.has_value());
  auto fq = [](const Point& p) {
    return double(p[0] * p[0] - p[0] * p[1] + p[1] * p[1]);
  };
  std::array<double, 3> fvals{fq(pts[0]), fq(pts[1]), fq(pts[2])};
  Secant s = fit_secant(*ps, fvals);
  CHECK(s.c[0] == doctest::Approx(0.0));
  CHECK(s.c[1] == doctest::Approx(0.0));
  CHECK(s.b == doctest::Approx(1.0));

  ConeComplex cc = facet_halfspaces(*ps);
  // Anchor (1,1): x1 + x2 - 1; anchor (0,1): 1 - x1; anchor (1,0): 1 - x2.
  Point origin{0, 0};
  CHECK(facet_at(cc.facets[0], origin) == doctest::Approx(-1.0));
  CHECK(facet_at(cc.facets[1], origin) == doctest::Approx(1.0));
  CHECK(facet_at(cc.facets[2], origin) == doctest::Approx(1.0));
  CHECK_FALSE(locate_in_union(std::span<const int>(origin), cc).has_value());
  // The anchors themselves are members of their own cones.
  for (int j = 0; j < 3; ++j) {
    auto loc = locate_in_union(std::span<const int>(cc.anchors[j]), cc);
    REQUIRE(loc.has_value());
    CHECK(*loc == j);
    CHECK(cone_membership(std::span<const int>(cc.anchors[j]), cc, j));
  }
}

TEST_CASE("one-dimensional cones split the line at the midpoint") {
  auto ps = check_poised({{-1}, {1}});
  REQUIRE(ps.has_value());
  ConeComplex cc = facet_halfspaces(*ps);
  // (1 - x)/2 anchored at -1 and (x + 1)/2 anchored at 1.
  Point lo{-3}, mid{0}, hi{3};
  CHECK(facet_at(cc.facets[0], mid) == doctest::Approx(0.5));
  CHECK(facet_at(cc.facets[1], mid) == doctest::Approx(0.5));
  auto at = [&](const Point& x) {
    return locate_in_union(std::span<const int>(x), cc);
  };
  REQUIRE(at(hi).has_value());
  CHECK(*at(hi) == 1);  // beyond the anchor at +1
  REQUIRE(at(lo).has_value());
  CHECK(*at(lo) == 0);  // beyond the anchor at -1
  CHECK_FALSE(at(mid).has_value());  // strictly between the two points
}

TEST_CASE("facet values are barycentric: they always sum to one") {
  std::mt19937_64 rng(7001);
  std::uniform_int_distribution<int> coord(-8, 8);
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      PoisedSet ps = random_poised_set(n, rng);
      ConeComplex cc = facet_halfspaces(ps);
      Point x(n);
      for (auto& v : x) v = coord(rng);
      double sum = 0.0;
      for (const auto& f : cc.facets) sum += facet_at(f, x);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("facets follow their anchors under point reordering") {
  std::vector<Point> pts{{2, -1}, {0, 3}, {-2, -2}};
  auto ps = check_poised(pts);
  REQUIRE(ps.has_value());
  ConeComplex cc = facet_halfspaces(*ps);

  std::vector<Point> shuffled{pts[2], pts[0], pts[1]};
  auto ps2 = check_poised(shuffled);
  REQUIRE(ps2.has_value());
  ConeComplex cc2 = facet_halfspaces(*ps2);

  // Match each original facet with the facet of the same anchor point.
  for (int j = 0; j < 3; ++j) {
    auto it = std::find(cc2.anchors.begin(), cc2.anchors.end(), cc.anchors[j]);
    REQUIRE(it != cc2.anchors.end());
    int k = int(it - cc2.anchors.begin());
    for (int h = 0; h < 2; ++h)
      CHECK(cc.facets[j].c[h] == doctest::Approx(cc2.facets[k].c[h]));
    CHECK(cc.facets[j].b == doctest::Approx(cc2.facets[k].b));
  }
}

TEST_CASE("cone multipliers equal negated facet values") {
  // Writing x = x^j + sum_l lambda_l (x^j - x^l) and solving the linear
  // system directly must agree with reading lambda_l off the facets.
  std::mt19937_64 rng(7002);
  std::uniform_int_distribution<int> coord(-6, 6);
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      PoisedSet ps = random_poised_set(n, rng);
      ConeComplex cc = facet_halfspaces(ps);
      Point x(n);
      for (auto& v : x) v = coord(rng);
      for (int j = 0; j <= n; ++j) {
        // Column l of A is x^j - x^l over the n non-anchor points.
        std::vector<double> a(std::size_t(n) * n, 0.0);
        std::vector<double> rhs(n, 0.0);
        int col = 0;
        for (int l = 0; l <= n; ++l) {
          if (l == j) continue;
          for (int h = 0; h < n; ++h)
            a[std::size_t(h) * n + col] = double(ps.points[j][h] - ps.points[l][h]);
          ++col;
        }
        for (int h = 0; h < n; ++h) rhs[h] = double(x[h] - ps.points[j][h]);
        auto lam = solve_linear(a, rhs);
        REQUIRE(lam.has_value());
        col = 0;
        for (int l = 0; l <= n; ++l) {
          if (l == j) continue;
          CHECK((*lam)[col] ==
                doctest::Approx(-facet_at(cc.facets[l], x)).epsilon(1e-7));
          ++col;
        }
      }
    }
  }
}

TEST_CASE("degenerate sets are rejected") {
  // Collinear points cannot pin down a plane.
  CHECK_FALSE(check_poised({{0, 0}, {1, 1}, {2, 2}}).has_value());
  // Duplicated point.
  CHECK_FALSE(check_poised({{0, 0}, {1, 0}, {1, 0}}).has_value());
  // Wrong cardinality for the dimension (n+1 points in dimension n).
  CHECK_THROWS_AS((void)check_poised({{0, 0}, {1, 0}}), DimensionMismatchError);
  // Ragged coordinates.
  CHECK_THROWS_AS((void)check_poised({{0, 0}, {1}, {0, 1}}),
                  DimensionMismatchError);
}

TEST_CASE("fitter reports the diagonal ratio and is reusable") {
  SecantFitter ft(2);
  std::vector<int> good{0, 0, 1, 0, 0, 1};
  CHECK(ft.factor(good));
  CHECK(ft.diag_ratio() > 1e-8);
  std::vector<int> bad{0, 0, 1, 1, 2, 2};
  CHECK_FALSE(ft.factor(bad));
  CHECK(ft.diag_ratio() < 1e-8);
  // Refactoring the good set after a failure works.
  CHECK(ft.factor(good));
  std::array<double, 3> fvals{8.0, 5.0, 5.0};
  std::array<double, 3> coeffs{};
  ft.secant(fvals, coeffs);
  CHECK(coeffs[0] == doctest::Approx(-3.0));
  CHECK(coeffs[1] == doctest::Approx(-3.0));
  CHECK(coeffs[2] == doctest::Approx(8.0));
}

TEST_CASE("exactly 20 of the 35 stencil 4-subsets are poised in R^3") {
  // The 2n+1 starting stencil around the origin for n = 3.
  std::vector<Point> stencil{{0, 0, 0}, {1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                             {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  int total = 0, poised = 0;
  std::array<int, 4> pick{};
  for (pick[0] = 0; pick[0] < 7; ++pick[0])
    for (pick[1] = pick[0] + 1; pick[1] < 7; ++pick[1])
      for (pick[2] = pick[1] + 1; pick[2] < 7; ++pick[2])
        for (pick[3] = pick[2] + 1; pick[3] < 7; ++pick[3]) {
          ++total;
          std::vector<Point> sub;
          for (int i : pick) sub.push_back(stencil[std::size_t(i)]);
          if (check_poised(sub).has_value()) ++poised;
        }
  CHECK(total == 35);
  CHECK(poised == 20);
}

TEST_CASE("membership is ambiguous only for inconsistent facets") {
  // Hand-built complex whose facets are all negative everywhere; every
  // cone then claims every point, which the locator must refuse to decide.
  ConeComplex cc;
  cc.anchors = {{0}, {1}};
  cc.facets = {Affine{{0.0}, -1.0}, Affine{{0.0}, -1.0}};
  Point x{0};
  CHECK_THROWS_AS((void)locate_in_union(std::span<const int>(x), cc),
                  AmbiguousMembershipError);
}

TEST_CASE("dense linear solve utility") {
  auto sol = solve_linear({2.0, 1.0, 1.0, 3.0}, {5.0, 10.0});
  REQUIRE(sol.has_value());
  CHECK((*sol)[0] == doctest::Approx(1.0));
  CHECK((*sol)[1] == doctest::Approx(3.0));
  CHECK_FALSE(solve_linear({1.0, 2.0, 2.0, 4.0}, {1.0, 2.0}).has_value());
}

}  // TEST_SUITE("geometry")
