#include "sucil/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

namespace sucil {

namespace {

double quad_eval(std::span<const int> x) {
  double s = 0.0;
  for (const int xi : x) {
    const double d = xi - 2.0;
    s += d * d;
  }
  return s;
}

// Chained rotated quadratic; couples consecutive coordinates through a
// rotation by pi/8.  `cyclic` closes the chain with x_{n+1} = x_1.
double abhi_eval(std::span<const int> x, bool cyclic) {
  const double c1 = std::cos(std::numbers::pi / 8.0);
  const double c2 = std::sin(std::numbers::pi / 8.0);
  const int n = static_cast<int>(x.size());
  const int terms = cyclic ? n : n - 1;
  double s = 0.0;
  for (int i = 0; i < terms; ++i) {
    const double a = x[i] - 2.0;
    const double b = x[(i + 1) % n] - 2.0;
    const double t1 = c1 * a - c2 * b;
    const double t2 = c2 * a - c1 * b;
    s += 64.0 * t1 * t1 + t2 * t2;
  }
  return s;
}

// max over i of squared distance to the i-th shifted center 2 e_i + e.
double klt_eval(std::span<const int> x) {
  const int n = static_cast<int>(x.size());
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int h = 0; h < n; ++h) {
      const double center = (h == i) ? 3.0 : 1.0;  // 2 e_i + e
      const double d = x[h] - center;
      s += d * d;
    }
    best = std::max(best, s);
  }
  return best;
}

double maxq_eval(std::span<const int> x) {
  double best = 0.0;
  for (const int xi : x) {
    best = std::max(best, static_cast<double>(xi) * xi);
  }
  return best;
}

double mxhilb_eval(std::span<const int> x) {
  const int n = static_cast<int>(x.size());
  double best = 0.0;
  for (int i = 1; i <= n; ++i) {
    double s = 0.0;
    for (int j = 1; j <= n; ++j) {
      s += std::abs(static_cast<double>(x[j - 1])) / (i + j - 1);
    }
    best = std::max(best, s);
  }
  return best;
}

double lq_eval(std::span<const int> x) {
  const int n = static_cast<int>(x.size());
  double s = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double a = x[i];
    const double b = x[i + 1];
    const double lin = -a - b;
    s += std::max(lin, lin + a * a + b * b - 1.0);
  }
  return s;
}

double cb3i_eval(std::span<const int> x) {
  const int n = static_cast<int>(x.size());
  double s = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double a = x[i];
    const double b = x[i + 1];
    const double t1 = a * a * a * a + b * b;
    const double t2 = (2.0 - a) * (2.0 - a) + (2.0 - b) * (2.0 - b);
    const double t3 = 2.0 * std::exp(-a + b);
    s += std::max({t1, t2, t3});
  }
  return s;
}

double cb3ii_eval(std::span<const int> x) {
  const int n = static_cast<int>(x.size());
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double a = x[i];
    const double b = x[i + 1];
    s1 += a * a * a * a + b * b;
    s2 += (2.0 - a) * (2.0 - a) + (2.0 - b) * (2.0 - b);
    s3 += 2.0 * std::exp(-a + b);
  }
  return std::max({s1, s2, s3});
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

Point scaled_ones(int n, int v) { return Point(static_cast<std::size_t>(n), v); }

}  // namespace

std::vector<std::string> problem_names() {
  return {"quad", "abhi", "KLT", "maxq", "mxhilb", "LQ", "CB3I", "CB3II"};
}

ProblemSpec make_problem(std::string_view name, int n,
                         const ProblemOptions& opts) {
  if (n < 1) {
    throw DimensionTooSmallError("dimension must be at least 1");
  }
  const std::string key = lower(name);
  ProblemSpec p;
  p.n = n;

  auto need_chain = [&](const char* nm) {
    if (n < 2) {
      throw DimensionTooSmallError(std::string(nm) +
                                   " couples consecutive coordinates and needs n >= 2");
    }
  };

  if (key == "quad") {
    p.name = "quad";
    p.eval = quad_eval;
    p.known_min = 0.0;
    p.known_argmin = {scaled_ones(n, 2)};
    p.argmin_note = "2e";
  } else if (key == "abhi") {
    need_chain("abhi");
    p.name = "abhi";
    const bool cyclic = opts.abhi_cyclic;
    p.eval = [cyclic](std::span<const int> x) { return abhi_eval(x, cyclic); };
    p.known_min = 0.0;
    p.known_argmin = {scaled_ones(n, 2)};
    p.argmin_note = "2e";
  } else if (key == "klt") {
    p.name = "KLT";
    p.eval = klt_eval;
    p.known_min = static_cast<double>(n);
    p.known_argmin = {scaled_ones(n, 2)};
    p.argmin_note = "2e";
  } else if (key == "maxq") {
    p.name = "maxq";
    p.eval = maxq_eval;
    p.known_min = 0.0;
    p.known_argmin = {scaled_ones(n, 0)};
    p.argmin_note = "origin";
    p.start_policy = StartPolicy::Origin;
  } else if (key == "mxhilb") {
    p.name = "mxhilb";
    p.eval = mxhilb_eval;
    p.known_min = 0.0;
    p.known_argmin = {scaled_ones(n, 0)};
    p.argmin_note = "origin";
    p.start_policy = StartPolicy::Origin;
  } else if (key == "lq") {
    need_chain("LQ");
    p.name = "LQ";
    p.eval = lq_eval;
    p.known_min = -static_cast<double>(n - 1);
    p.known_argmin = {scaled_ones(n, 1)};
    p.argmin_note = "many; e is one of them";
  } else if (key == "cb3i") {
    need_chain("CB3I");
    p.name = "CB3I";
    p.eval = cb3i_eval;
    p.known_min = 2.0 * (n - 1);
    p.known_argmin = {scaled_ones(n, 1)};
    p.argmin_note = "e";
  } else if (key == "cb3ii") {
    need_chain("CB3II");
    p.name = "CB3II";
    p.eval = cb3ii_eval;
    p.known_min = 2.0 * (n - 1);
    p.known_argmin = {scaled_ones(n, 1)};
    p.argmin_note = "e";
  } else {
    throw UnknownProblemError("no problem named '" + std::string(name) + "'");
  }
  return p;
}

CountingOracle::CountingOracle(ProblemSpec spec, Box box)
    : spec_(std::move(spec)), box_(std::move(box)) {
  if (spec_.n != box_.dim()) {
    throw DimensionMismatchError("oracle box dimension does not match problem");
  }
  seen_.assign(static_cast<std::size_t>(box_.volume()), 0);
}

double CountingOracle::operator()(std::span<const int> x) {
  const std::int64_t idx = box_.index_of(x);
  std::uint8_t& flag = seen_[static_cast<std::size_t>(idx)];
  if (flag) {
    throw DuplicateEvaluationError(
        "black-box asked to re-evaluate an already-logged point");
  }
  flag = 1;
  const double f = spec_.eval(x);
  log_.emplace_back(Point(x.begin(), x.end()), f);
  return f;
}

ProbeReport convexity_probe(const Evaluator& f, const Domain& dom,
                            std::int64_t trials, std::uint64_t seed) {
  const int n = dom.dim();
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_int_distribution<int>> coord;
  coord.reserve(n);
  for (int h = 0; h < n; ++h) {
    coord.emplace_back(dom.box.lo[h], dom.box.hi[h]);
  }
  std::uniform_int_distribution<int> dir(-2, 2);
  std::uniform_int_distribution<int> span_pick(2, 4);

  ProbeReport rep;
  Point y(n), z(n), x(n), d(n);
  for (std::int64_t t = 0; t < trials; ++t) {
    bool found = false;
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
      for (int h = 0; h < n; ++h) y[h] = coord[h](rng);
      bool nonzero = false;
      for (int h = 0; h < n; ++h) {
        d[h] = dir(rng);
        nonzero = nonzero || d[h] != 0;
      }
      if (!nonzero) continue;
      const int steps = span_pick(rng);
      std::uniform_int_distribution<int> interior_pick(1, steps - 1);
      const int s = interior_pick(rng);
      bool ok = true;
      for (int h = 0; h < n; ++h) {
        z[h] = y[h] + steps * d[h];
        x[h] = y[h] + s * d[h];
      }
      ok = dom.feasible_point(y) && dom.feasible_point(z) &&
           dom.feasible_point(x);
      if (!ok) continue;
      found = true;
      const double lam = static_cast<double>(s) / steps;
      const double fy = f(y);
      const double fz = f(z);
      const double fx = f(x);
      const double bound = (1.0 - lam) * fy + lam * fz;
      const double slack =
          1e-9 * std::max({1.0, std::abs(fy), std::abs(fz), std::abs(fx)});
      ++rep.trials;
      if (fx > bound + slack) {
        ++rep.violations;
        if (rep.pass) {
          rep.pass = false;
          rep.lo_end = y;
          rep.hi_end = z;
          rep.interior = x;
          rep.observed = fx;
          rep.bound = bound;
        }
      }
    }
  }
  return rep;
}

ProbeReport convexity_probe(const ProblemSpec& spec, const Domain& dom,
                            std::int64_t trials, std::uint64_t seed) {
  return convexity_probe(spec.eval, dom, trials, seed);
}

Point default_start(const ProblemSpec& spec, const Box& box) {
  const int n = box.dim();
  Point x(n, 0);
  if (spec.start_policy == StartPolicy::Origin) {
    if (!box.contains(x)) {
      throw StencilOutsideBoxError(
          "canonical start (origin) lies outside the box");
    }
    return x;
  }
  for (int h = 0; h < n; ++h) {
    const double mid = 0.5 * (box.lo[h] + box.hi[h]);
    x[h] = static_cast<int>(std::trunc(mid));
  }
  return x;
}

}  // namespace sucil
