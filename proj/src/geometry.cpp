#include "sucil/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace sucil {

double Affine::eval(std::span<const int> x) const {
  double s = b;
  for (std::size_t h = 0; h < c.size(); ++h) s += c[h] * x[h];
  return s;
}

double Affine::eval(std::span<const double> x) const {
  double s = b;
  for (std::size_t h = 0; h < c.size(); ++h) s += c[h] * x[h];
  return s;
}

void SecantFitter::reset(int n) {
  n_ = n;
  m_ = n + 1;
  a_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  v_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  beta_.assign(m_, 0.0);
  pts_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  z_.assign(m_, 0.0);
  ratio_ = 0.0;
  factored_ = false;
}

bool SecantFitter::factor(std::span<const int> pts_rowmajor, double tol) {
  const int m = m_;
  if (static_cast<int>(pts_rowmajor.size()) != m * n_) {
    throw DimensionMismatchError("factor() expects (n+1) x n coordinates");
  }
  // Build A with column j = (x^j, 1).
  for (int j = 0; j < m; ++j) {
    for (int h = 0; h < n_; ++h) {
      a_[static_cast<std::size_t>(h) * m + j] =
          static_cast<double>(pts_rowmajor[static_cast<std::size_t>(j) * n_ + h]);
    }
    a_[static_cast<std::size_t>(n_) * m + j] = 1.0;
  }
  std::copy(a_.begin(), a_.end(), pts_.begin());

  // Householder QR, reflectors stored in v_ / beta_.
  for (int k = 0; k < m; ++k) {
    double sigma = 0.0;
    for (int i = k + 1; i < m; ++i) {
      const double aik = a_[static_cast<std::size_t>(i) * m + k];
      sigma += aik * aik;
    }
    const double x0 = a_[static_cast<std::size_t>(k) * m + k];
    double* vk = &v_[static_cast<std::size_t>(k) * m];  // row k of v_ holds reflector k
    vk[k] = 1.0;
    for (int i = k + 1; i < m; ++i) {
      vk[i] = a_[static_cast<std::size_t>(i) * m + k];
    }
    if (sigma == 0.0) {
      beta_[k] = 0.0;  // column already triangular (R_kk = x0, possibly 0)
      continue;
    }
    const double mu = std::sqrt(x0 * x0 + sigma);
    const double v0 = (x0 <= 0.0) ? (x0 - mu) : (-sigma / (x0 + mu));
    beta_[k] = 2.0 * v0 * v0 / (sigma + v0 * v0);
    for (int i = k + 1; i < m; ++i) vk[i] /= v0;
    // Apply the reflector to the trailing columns (including column k).
    for (int j = k; j < m; ++j) {
      double dot = a_[static_cast<std::size_t>(k) * m + j];
      for (int i = k + 1; i < m; ++i) {
        dot += vk[i] * a_[static_cast<std::size_t>(i) * m + j];
      }
      dot *= beta_[k];
      a_[static_cast<std::size_t>(k) * m + j] -= dot;
      for (int i = k + 1; i < m; ++i) {
        a_[static_cast<std::size_t>(i) * m + j] -= vk[i] * dot;
      }
    }
  }

  double dmin = std::abs(a_[0]);
  double dmax = dmin;
  for (int k = 1; k < m; ++k) {
    const double d = std::abs(a_[static_cast<std::size_t>(k) * m + k]);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  ratio_ = (dmax > 0.0) ? dmin / dmax : 0.0;
  factored_ = (dmax > 0.0) && (dmin >= tol * dmax);
  return factored_;
}

void SecantFitter::solve_augmented(std::span<const double> rhs,
                                   std::span<double> y) const {
  const int m = m_;
  if (static_cast<int>(rhs.size()) != m || static_cast<int>(y.size()) != m) {
    throw DimensionMismatchError("solve_augmented() expects n+1 entries");
  }
  if (!factored_) {
    throw NotPoisedError("solve requested on an unfactored or singular set");
  }
  // The interpolation matrix is A^T = (QR)^T = R^T Q^T.  Forward-substitute
  // R^T z = rhs, then y = Q z.
  for (int i = 0; i < m; ++i) {
    double s = rhs[i];
    for (int j = 0; j < i; ++j) {
      s -= a_[static_cast<std::size_t>(j) * m + i] * z_[j];
    }
    z_[i] = s / a_[static_cast<std::size_t>(i) * m + i];
  }
  // Q = H_0 H_1 ... H_{m-1}; apply reflectors to z in reverse order.
  for (int k = m - 1; k >= 0; --k) {
    if (beta_[k] == 0.0) continue;
    const double* vk = &v_[static_cast<std::size_t>(k) * m];
    double dot = z_[k];
    for (int i = k + 1; i < m; ++i) dot += vk[i] * z_[i];
    dot *= beta_[k];
    z_[k] -= dot;
    for (int i = k + 1; i < m; ++i) z_[i] -= vk[i] * dot;
  }
  std::copy(z_.begin(), z_.end(), y.begin());
}

void SecantFitter::secant(std::span<const double> fvals,
                          std::span<double> coeffs) const {
  solve_augmented(fvals, coeffs);
}

void SecantFitter::facets(std::span<double> out) const {
  const int m = m_;
  if (static_cast<int>(out.size()) != m * m) {
    throw DimensionMismatchError("facets() expects (n+1)^2 entries");
  }
  std::vector<double> rhs(m, 0.0);
  std::vector<double> y(m, 0.0);
  for (int j = 0; j < m; ++j) {
    rhs.assign(m, 0.0);
    rhs[j] = 1.0;
    solve_augmented(rhs, y);
    // Normalize so the facet value at its own anchor is exactly 1: divide
    // by the achieved value there (== 1 up to roundoff by construction).
    double at_anchor = y[n_];
    for (int h = 0; h < n_; ++h) {
      at_anchor += y[h] * pts_[static_cast<std::size_t>(h) * m + j];
    }
    if (!(at_anchor > 0.0)) {
      throw NotPoisedError("facet normalization found a nonpositive anchor value");
    }
    for (int i = 0; i < m; ++i) {
      out[static_cast<std::size_t>(j) * m + i] = y[i] / at_anchor;
    }
  }
}

std::optional<PoisedSet> check_poised(std::vector<Point> points, double tol) {
  if (points.empty()) {
    throw DimensionMismatchError("check_poised() needs n+1 points");
  }
  const int n = static_cast<int>(points[0].size());
  if (static_cast<int>(points.size()) != n + 1) {
    throw DimensionMismatchError("check_poised() got " +
                                 std::to_string(points.size()) +
                                 " points for dimension " + std::to_string(n));
  }
  std::vector<int> flat;
  flat.reserve(static_cast<std::size_t>(n + 1) * n);
  for (const Point& p : points) {
    if (static_cast<int>(p.size()) != n) {
      throw DimensionMismatchError("check_poised() got points of mixed dimension");
    }
    flat.insert(flat.end(), p.begin(), p.end());
  }
  PoisedSet ps;
  ps.fitter.reset(n);
  if (!ps.fitter.factor(flat, tol)) return std::nullopt;
  ps.points = std::move(points);
  return ps;
}

Secant fit_secant(const PoisedSet& ps, std::span<const double> fvals) {
  const int n = ps.fitter.n();
  if (static_cast<int>(fvals.size()) != n + 1) {
    throw DimensionMismatchError("fit_secant() expects n+1 values");
  }
  std::vector<double> y(n + 1);
  ps.fitter.secant(fvals, y);
  Secant s;
  s.c.assign(y.begin(), y.begin() + n);
  s.b = y[n];
  return s;
}

ConeComplex facet_halfspaces(const PoisedSet& ps) {
  const int n = ps.fitter.n();
  const int m = n + 1;
  std::vector<double> flat(static_cast<std::size_t>(m) * m);
  ps.fitter.facets(flat);
  ConeComplex cc;
  cc.anchors = ps.points;
  cc.facets.resize(m);
  for (int j = 0; j < m; ++j) {
    cc.facets[j].c.assign(flat.begin() + static_cast<std::size_t>(j) * m,
                          flat.begin() + static_cast<std::size_t>(j) * m + n);
    cc.facets[j].b = flat[static_cast<std::size_t>(j) * m + n];
  }
  return cc;
}

bool cone_membership(std::span<const int> x, const ConeComplex& cc, int j,
                     double tol) {
  const int m = static_cast<int>(cc.facets.size());
  for (int l = 0; l < m; ++l) {
    if (l == j) continue;
    if (cc.facets[l].eval(x) > tol) return false;
  }
  return true;
}

std::optional<int> locate_in_union(std::span<const int> x,
                                   const ConeComplex& cc, double tol) {
  const int m = static_cast<int>(cc.facets.size());
  int positives = 0;
  int last = -1;
  for (int l = 0; l < m; ++l) {
    if (cc.facets[l].eval(x) > tol) {
      if (++positives >= 2) return std::nullopt;
      last = l;
    }
  }
  if (positives == 0) {
    // Normalized facet values sum to 1, so a consistent complex always has
    // at least one value above tolerance; every anchor would qualify here.
    throw AmbiguousMembershipError(
        "every cone accepts the query point; facet set is inconsistent");
  }
  return last;
}

std::optional<std::vector<double>> solve_linear(std::vector<double> a,
                                                std::vector<double> rhs) {
  const int m = static_cast<int>(rhs.size());
  if (static_cast<int>(a.size()) != m * m) {
    throw DimensionMismatchError("solve_linear() expects a square matrix");
  }
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  for (int k = 0; k < m; ++k) {
    int piv = k;
    double best = std::abs(a[static_cast<std::size_t>(perm[k]) * m + k]);
    for (int i = k + 1; i < m; ++i) {
      const double v = std::abs(a[static_cast<std::size_t>(perm[i]) * m + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < 1e-300) return std::nullopt;
    std::swap(perm[k], perm[piv]);
    const double akk = a[static_cast<std::size_t>(perm[k]) * m + k];
    for (int i = k + 1; i < m; ++i) {
      double* rowi = &a[static_cast<std::size_t>(perm[i]) * m];
      const double f = rowi[k] / akk;
      rowi[k] = 0.0;
      for (int j = k + 1; j < m; ++j) {
        rowi[j] -= f * a[static_cast<std::size_t>(perm[k]) * m + j];
      }
      rhs[perm[i]] -= f * rhs[perm[k]];
    }
  }
  std::vector<double> x(m);
  for (int i = m - 1; i >= 0; --i) {
    double s = rhs[perm[i]];
    for (int j = i + 1; j < m; ++j) {
      s -= a[static_cast<std::size_t>(perm[i]) * m + j] * x[j];
    }
    x[i] = s / a[static_cast<std::size_t>(perm[i]) * m + i];
  }
  return x;
}

}  // namespace sucil
