#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sucil/lattice.hpp"

namespace sucil {

// A set of n+1 points is usable for a secant fit iff the augmented matrix
// (points as rows, with a trailing column of ones) is nonsingular.  We
// declare it so iff every diagonal magnitude of the triangular QR factor is
// at least kPoisedTol times the largest one.
inline constexpr double kPoisedTol = 1e-8;

// Cone membership works on normalized facets (value exactly 1 at the facet's
// own anchor point); a point is inside a halfspace iff the facet value is
// <= kMembershipTol.
inline constexpr double kMembershipTol = 1e-9;

// Affine function c^T x + b over lattice or real points.
struct Affine {
  std::vector<double> c;
  double b = 0.0;

  double eval(std::span<const int> x) const;
  double eval(std::span<const double> x) const;
};

using Secant = Affine;

// Householder-QR fitter for one interpolation set of n+1 points in Z^n.
// Factors the transposed augmented matrix A with A[0..n-1][j] = x^j and
// A[n][j] = 1, then answers secant / facet queries by triangular solves.
// All scratch is owned by the object, so a fitter can be reused across many
// candidate sets without allocating.
class SecantFitter {
public:
  SecantFitter() = default;
  explicit SecantFitter(int n) { reset(n); }

  void reset(int n);
  int n() const { return n_; }

  // Load one set of n+1 points (row-major, row j = point j) and factor.
  // Returns true iff the set is poised under `tol`.
  bool factor(std::span<const int> pts_rowmajor, double tol = kPoisedTol);

  // min |R_ii| / max |R_ii| of the last factorization (0 when the largest
  // diagonal vanishes).
  double diag_ratio() const { return ratio_; }

  // Solve the interpolation system (points-as-rows matrix times y = rhs).
  // y has n+1 entries: n linear coefficients followed by the offset.
  void solve_augmented(std::span<const double> rhs, std::span<double> y) const;

  // Secant through the loaded points with the given values; writes the n
  // coefficients and offset into `coeffs` (n+1 entries).
  void secant(std::span<const double> fvals, std::span<double> coeffs) const;

  // All n+1 normalized facets, row-major (n+1) x (n+1); row j holds the
  // coefficients and offset of the facet that is 1 at point j and 0 at the
  // other loaded points.
  void facets(std::span<double> out) const;

private:
  int n_ = 0;
  int m_ = 0;  // n_ + 1
  std::vector<double> a_;     // R in the upper triangle after factor()
  std::vector<double> v_;     // Householder vectors, column k in rows k..m-1
  std::vector<double> beta_;  // reflector scalars
  std::vector<double> pts_;   // loaded augmented matrix, for normalization
  mutable std::vector<double> z_;  // solve scratch
  double ratio_ = 0.0;
  bool factored_ = false;
};

// An interpolation set together with its factorization, ready for secant
// fitting and facet extraction.
struct PoisedSet {
  std::vector<Point> points;  // exactly n+1 points
  SecantFitter fitter;        // factored over `points`
};

// The n+1 normalized facet halfspaces of an interpolation set's cone
// decomposition.  Facet j vanishes at every point except its anchor
// (points[j]), where it equals 1; the cone anchored at point j is the set
// where every *other* facet is <= 0.
struct ConeComplex {
  std::vector<Point> anchors;
  std::vector<Affine> facets;
};

// Factor a candidate interpolation set.  Returns nullopt if the set is not
// poised; throws DimensionMismatchError on ragged input.
std::optional<PoisedSet> check_poised(std::vector<Point> points,
                                      double tol = kPoisedTol);

// Secant interpolant through (points[j], fvals[j]).
Secant fit_secant(const PoisedSet& ps, std::span<const double> fvals);

// Normalized facet halfspaces of the set's cone decomposition.
ConeComplex facet_halfspaces(const PoisedSet& ps);

// True iff x lies in the (closed) cone anchored at point j, i.e. every
// facet other than j evaluates to <= tol at x.
bool cone_membership(std::span<const int> x, const ConeComplex& cc, int j,
                     double tol = kMembershipTol);

// Index of the unique cone containing x, or nullopt if x lies in none.
// Throws AmbiguousMembershipError if the tolerance band admits more than
// one membership (possible only with inconsistent facets).
std::optional<int> locate_in_union(std::span<const int> x,
                                   const ConeComplex& cc,
                                   double tol = kMembershipTol);

// Dense square solve by Gaussian elimination with partial pivoting; returns
// nullopt when the matrix is numerically singular.  Utility for tests and
// assignment checking, not a hot path.
std::optional<std::vector<double>> solve_linear(std::vector<double> a_rowmajor,
                                               std::vector<double> rhs);

}  // namespace sucil
