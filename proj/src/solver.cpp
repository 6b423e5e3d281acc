#include "sucil/solver.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace sucil {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Advance a sorted index combination (lexicographic); false when exhausted.
bool next_combination(std::vector<int>& idx, int total) {
  const int r = static_cast<int>(idx.size());
  int i = r - 1;
  while (i >= 0 && idx[i] == total - r + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

// Scratch for one batch of candidate cuts: points gathered, fitted in
// parallel, then applied in combination order so results never depend on
// thread count.
struct CutBatch {
  int n = 0, m = 0, capacity = 0, count = 0;
  std::vector<std::int32_t> ids;
  std::vector<int> pts;
  std::vector<double> fvals;
  std::vector<double> models;
  std::vector<double> facets;
  std::vector<std::uint8_t> ok;
  std::vector<std::uint8_t> enabled;
  std::vector<std::int64_t> improved;
  std::vector<std::uint8_t> pruned;
  std::vector<SecantFitter> fitters;

  void reset(int n_, int cap) {
    n = n_;
    m = n_ + 1;
    capacity = cap;
    count = 0;
    ids.assign(static_cast<std::size_t>(cap) * m, 0);
    pts.assign(static_cast<std::size_t>(cap) * m * n, 0);
    fvals.assign(static_cast<std::size_t>(cap) * m, 0.0);
    models.assign(static_cast<std::size_t>(cap) * m, 0.0);
    facets.assign(static_cast<std::size_t>(cap) * m * m, 0.0);
    ok.assign(static_cast<std::size_t>(cap), 0);
    enabled.assign(static_cast<std::size_t>(cap), 0);
    improved.assign(static_cast<std::size_t>(cap), 0);
    pruned.assign(static_cast<std::size_t>(cap), 0);
    fitters.resize(static_cast<std::size_t>(cap));
    for (auto& f : fitters) f.reset(n_);
  }
};

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Sucil: return "SUCIL";
    case Variant::SucilNoTR: return "SUCIL-noTR";
    case Variant::SucilIdeal1: return "SUCIL-ideal1";
    case Variant::SucilIdeal2: return "SUCIL-ideal2";
  }
  return "?";
}

std::vector<std::string> variant_names() {
  return {"SUCIL", "SUCIL-noTR", "SUCIL-ideal1", "SUCIL-ideal2"};
}

std::optional<Variant> parse_variant(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s.rfind("sucil-", 0) == 0) s = s.substr(6);
  if (s == "sucil" || s.empty()) return Variant::Sucil;
  if (s == "notr") return Variant::SucilNoTR;
  if (s == "ideal1") return Variant::SucilIdeal1;
  if (s == "ideal2") return Variant::SucilIdeal2;
  return std::nullopt;
}

std::vector<Point> initial_stencil(const Point& xbar, const Domain& dom) {
  const int n = dom.dim();
  if (static_cast<int>(xbar.size()) != n) {
    throw DimensionMismatchError("starting point dimension mismatch");
  }
  std::vector<Point> pts;
  pts.reserve(2 * static_cast<std::size_t>(n) + 1);
  pts.push_back(xbar);
  // Lower neighbors first, then upper neighbors, coordinate by coordinate:
  // points below the start precede points above it, mirroring lattice
  // enumeration order.
  for (int h = 0; h < n; ++h) {
    Point down = xbar;
    --down[h];
    pts.push_back(std::move(down));
  }
  for (int h = 0; h < n; ++h) {
    Point up = xbar;
    ++up[h];
    pts.push_back(std::move(up));
  }
  std::string bad;
  for (const Point& p : pts) {
    if (!dom.feasible_point(p)) {
      bad += bad.empty() ? "" : ", ";
      bad += "(";
      for (int h = 0; h < n; ++h) {
        bad += (h ? "," : "") + std::to_string(p[h]);
      }
      bad += ")";
    }
  }
  if (!bad.empty()) {
    throw StencilOutsideBoxError(
        "unit stencil around the start leaves the domain at " + bad +
        "; recenter the starting point at least one step inside every bound");
  }
  return pts;
}

int step_radius(int delta, bool improved, int delta_min) {
  if (improved) return delta + 1;
  return std::max(delta_min, delta / 2);
}

Certificate solve(CountingOracle& oracle, const Domain& dom,
                  const SolverConfig& cfg, const IterationHook& hook) {
  const auto t_run = std::chrono::steady_clock::now();
  const ProblemSpec& spec = oracle.spec();
  const int n = dom.dim();
  const int m = n + 1;
  if (!(oracle.box() == dom.box)) {
    throw DimensionMismatchError("oracle box does not match the domain box");
  }
  if (spec.n != n) {
    throw DimensionMismatchError("problem dimension does not match the domain");
  }
  const std::int64_t budget = cfg.budget > 0 ? cfg.budget : dom.size();
  const Point start = cfg.start ? *cfg.start : default_start(spec, dom.box);
  if (!dom.feasible_point(start)) {
    throw StencilOutsideBoxError(
        "starting point lies outside the domain; pick one at least one step "
        "inside every bound");
  }
  std::vector<Point> init =
      cfg.initial_points ? *cfg.initial_points : initial_stencil(start, dom);
  for (const Point& p : init) {
    if (!dom.feasible_point(p)) {
      throw StencilOutsideBoxError("initial point set leaves the domain");
    }
  }

  EtaTable table = init_table(dom);
  std::vector<std::uint8_t> evaluated(
      static_cast<std::size_t>(dom.box.volume()), 0);
  std::vector<std::pair<Point, double>> evals;
  double u = kInf;
  Point xhat = start;

  auto eval_point = [&](const Point& p) {
    const double f = oracle(p);
    evaluated[static_cast<std::size_t>(dom.box.index_of(p))] = 1;
    evals.emplace_back(p, f);
    if (f < u) {
      u = f;
      xhat = p;
    }
    return f;
  };

  std::vector<std::int32_t> pending;
  for (const Point& p : init) {
    if (static_cast<std::int64_t>(evals.size()) >= budget) break;
    eval_point(p);
    pending.push_back(static_cast<std::int32_t>(evals.size()) - 1);
  }

  int delta = cfg.delta_min;
  double l = -kInf;
  bool certified = false;
  std::vector<CutStatsRow> stats;

  CutBatch batch;
  batch.reset(n, 128);
  std::vector<std::int32_t> source;
  ActiveSet active;
  std::vector<int> active_coords;
  std::vector<int> comb;
  std::vector<std::int32_t> combo_ids(m);

  int k = 0;
  while (true) {
    ++k;
    const auto t0 = std::chrono::steady_clock::now();
    CutStatsRow row;
    row.iteration = k;

    active = refresh_active(table, dom, evaluated, u);
    if (active.empty()) {
      // Every unevaluated point already has a bound at or above u: the
      // incumbent is provably optimal.
      l = u;
      certified = true;
      row.lower = l;
      row.upper = u;
      row.seconds = seconds_since(t0);
      stats.push_back(row);
      if (hook) hook(IterationView{k, l, u, table, dom, evals});
      break;
    }
    active_coords = decode_active(dom.box, active);
    const double l_start = table_min(table, active).first;

    const auto id_count = static_cast<std::int32_t>(evals.size());
    source.clear();
    if (cfg.variant == Variant::SucilIdeal1) {
      source.resize(static_cast<std::size_t>(id_count));
      std::iota(source.begin(), source.end(), 0);
    } else {
      source = generator_set(table, active, id_count);
      for (const std::int32_t id : pending) {
        if (source.empty() || source.back() < id) source.push_back(id);
      }
    }

    // ---- Cut pass over candidate combinations ------------------------
    auto flush_batch = [&]() {
      const int cnt = batch.count;
      if (cnt == 0) return;
#ifdef SUCIL_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int s = 0; s < cnt; ++s) {
        SecantFitter& ft = batch.fitters[static_cast<std::size_t>(s)];
        const std::size_t po = static_cast<std::size_t>(s) * m * n;
        batch.ok[static_cast<std::size_t>(s)] =
            ft.factor({batch.pts.data() + po, static_cast<std::size_t>(m) * n},
                      cfg.poised_tol)
                ? 1
                : 0;
        if (batch.ok[static_cast<std::size_t>(s)]) {
          const std::size_t vo = static_cast<std::size_t>(s) * m;
          ft.secant({batch.fvals.data() + vo, static_cast<std::size_t>(m)},
                    {batch.models.data() + vo, static_cast<std::size_t>(m)});
        }
      }
      for (int s = 0; s < cnt; ++s) {
        batch.enabled[static_cast<std::size_t>(s)] = 0;
        if (!batch.ok[static_cast<std::size_t>(s)]) continue;
        ++row.combos_poised;
        const std::size_t vo = static_cast<std::size_t>(s) * m;
        const double* mod = batch.models.data() + vo;
        // Cheap dominance test: the secant's maximum over the whole box.
        // If it cannot exceed the smallest active bound, the cut cannot
        // strictly raise anything and the scan is skipped.
        double mmax = mod[n];
        for (int h = 0; h < n; ++h) {
          mmax += std::max(mod[h] * dom.box.lo[h], mod[h] * dom.box.hi[h]);
        }
        if (mmax <= l_start) continue;
        batch.enabled[static_cast<std::size_t>(s)] = 1;
      }
      // Facet solves are the most expensive part of a fit; do them only for
      // the cuts that survived the dominance test.
#ifdef SUCIL_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int s = 0; s < cnt; ++s) {
        if (!batch.enabled[static_cast<std::size_t>(s)]) continue;
        batch.fitters[static_cast<std::size_t>(s)].facets(
            {batch.facets.data() + static_cast<std::size_t>(s) * m * m,
             static_cast<std::size_t>(m) * m});
      }
      const CutBatchView bview{
          cnt,
          m,
          {batch.ids.data(), static_cast<std::size_t>(cnt) * m},
          {batch.models.data(), static_cast<std::size_t>(cnt) * m},
          {batch.facets.data(), static_cast<std::size_t>(cnt) * m * m},
          {batch.enabled.data(), static_cast<std::size_t>(cnt)}};
      apply_cut_batch(table, bview, active, active_coords, u,
                      cfg.membership_tol,
                      {batch.improved.data(), static_cast<std::size_t>(cnt)},
                      {batch.pruned.data(), static_cast<std::size_t>(cnt)});
      for (int s = 0; s < cnt; ++s) {
        if (batch.improved[static_cast<std::size_t>(s)] > 0) {
          ++row.cuts_updating;
          if (batch.pruned[static_cast<std::size_t>(s)]) ++row.cuts_pruning;
        }
      }
      batch.count = 0;
    };

    auto push_combo = [&](std::span<const std::int32_t> cids) {
      ++row.combos_total;
      const int s = batch.count++;
      const std::size_t vo = static_cast<std::size_t>(s) * m;
      for (int j = 0; j < m; ++j) {
        const std::int32_t id = cids[j];
        batch.ids[vo + j] = id;
        batch.fvals[vo + j] = evals[static_cast<std::size_t>(id)].second;
        const Point& p = evals[static_cast<std::size_t>(id)].first;
        std::copy(p.begin(), p.end(),
                  batch.pts.begin() +
                      static_cast<std::ptrdiff_t>((vo + j) * n));
      }
      if (batch.count == batch.capacity) flush_batch();
    };

    const int src_size = static_cast<int>(source.size());
    if (src_size >= m) {
      if (pending.size() == source.size()) {
        // First pass: every combination of the initial points.
        comb.resize(m);
        std::iota(comb.begin(), comb.end(), 0);
        do {
          for (int j = 0; j < m; ++j) {
            combo_ids[static_cast<std::size_t>(j)] =
                source[static_cast<std::size_t>(comb[j])];
          }
          push_combo(combo_ids);
        } while (next_combination(comb, src_size));
      } else if (pending.size() == 1 && pending[0] == source.back()) {
        // Steady state: only combinations containing the newest point are
        // new; every all-older combination was examined in a prior pass.
        if (src_size - 1 >= n) {
          comb.resize(n);
          std::iota(comb.begin(), comb.end(), 0);
          do {
            for (int j = 0; j < n; ++j) {
              combo_ids[static_cast<std::size_t>(j)] =
                  source[static_cast<std::size_t>(comb[j])];
            }
            combo_ids[static_cast<std::size_t>(n)] = source.back();
            push_combo(combo_ids);
          } while (next_combination(comb, src_size - 1));
        }
      } else {
        // Fallback: full enumeration filtered to combinations that touch a
        // pending id (not reachable from the standard loop shapes).
        comb.resize(m);
        std::iota(comb.begin(), comb.end(), 0);
        do {
          bool has_new = false;
          for (int j = 0; j < m && !has_new; ++j) {
            has_new = std::binary_search(pending.begin(), pending.end(),
                                         source[static_cast<std::size_t>(comb[j])]);
          }
          if (!has_new) continue;
          for (int j = 0; j < m; ++j) {
            combo_ids[static_cast<std::size_t>(j)] =
                source[static_cast<std::size_t>(comb[j])];
          }
          push_combo(combo_ids);
        } while (next_combination(comb, src_size));
      }
      flush_batch();
    }

    // ---- Lower bound and termination ---------------------------------
    const double tmin = table_min(table, active).first;
    l = std::min(u, tmin);
    row.lower = l;
    row.upper = u;
    row.seconds = seconds_since(t0);
    stats.push_back(row);
    if (hook) hook(IterationView{k, l, u, table, dom, evals});
    if (u - l <= cfg.certify_tol) {
      certified = true;
      break;
    }
    if (static_cast<std::int64_t>(evals.size()) >= budget) break;

    // ---- Next iterate -------------------------------------------------
    std::int64_t pick = -1;
    if (cfg.variant == Variant::SucilIdeal1 ||
        cfg.variant == Variant::SucilIdeal2) {
      double bf = kInf;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const double f = spec.eval(
            {active_coords.data() + i * static_cast<std::size_t>(n),
             static_cast<std::size_t>(n)});
        if (f < bf) {
          bf = f;
          pick = static_cast<std::int64_t>(i);
        }
      }
    } else if (cfg.variant == Variant::SucilNoTR) {
      double be = kInf;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const double v = table.eta(active[i]);
        if (v < be) {
          be = v;
          pick = static_cast<std::int64_t>(i);
        }
      }
    } else {
      int dmin = INT_MAX;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const int d = linf_dist(
            {active_coords.data() + i * static_cast<std::size_t>(n),
             static_cast<std::size_t>(n)},
            xhat);
        dmin = std::min(dmin, d);
      }
      // Grow the radius just enough to reach the working set; the growth
      // persists into the next radius update.
      delta = std::max(delta, dmin);
      double be = kInf;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const int d = linf_dist(
            {active_coords.data() + i * static_cast<std::size_t>(n),
             static_cast<std::size_t>(n)},
            xhat);
        if (d > delta) continue;
        const double v = table.eta(active[i]);
        if (v < be) {
          be = v;
          pick = static_cast<std::int64_t>(i);
        }
      }
    }
    Point next(n);
    dom.box.point_of(active[static_cast<std::size_t>(pick)], next);
    const double u_before = u;
    const double fnext = eval_point(next);
    delta = step_radius(delta, fnext < u_before, cfg.delta_min);
    pending.assign(1, static_cast<std::int32_t>(evals.size()) - 1);
  }

  Certificate cert;
  cert.problem = spec.name;
  cert.variant = std::string(variant_name(cfg.variant));
  cert.n = n;
  cert.box = dom.box;
  cert.start = start;
  cert.status =
      certified ? SolveStatus::Certified : SolveStatus::BudgetExhausted;
  cert.certified = certified;
  cert.lower = l;
  cert.upper = u;
  cert.best = xhat;
  cert.evaluations = static_cast<std::int64_t>(evals.size());
  for (std::size_t i = 0; i < evals.size(); ++i) {
    if (evals[i].second <= u + cfg.certify_tol) {
      cert.first_best = static_cast<std::int64_t>(i) + 1;
      break;
    }
  }
  cert.stats = std::move(stats);
  cert.evals = std::move(evals);
  cert.seconds = seconds_since(t_run);
  return cert;
}

Certificate solve(const ProblemSpec& spec, const Domain& dom,
                  const SolverConfig& cfg, const IterationHook& hook) {
  CountingOracle oracle(spec, dom.box);
  return solve(oracle, dom, cfg, hook);
}

void enumerate_cuts(const std::vector<std::pair<Point, double>>& evals,
                    std::vector<std::int32_t> source, const CutVisitor& visit) {
  std::sort(source.begin(), source.end());
  source.erase(std::unique(source.begin(), source.end()), source.end());
  if (source.empty()) return;
  const int n = static_cast<int>(evals[static_cast<std::size_t>(source[0])]
                                     .first.size());
  const int m = n + 1;
  const int total = static_cast<int>(source.size());
  if (total < m) return;
  std::vector<int> comb(m);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<std::int32_t> ids(m);
  std::vector<Point> pts(m);
  std::vector<double> fv(m);
  do {
    for (int j = 0; j < m; ++j) {
      ids[static_cast<std::size_t>(j)] =
          source[static_cast<std::size_t>(comb[j])];
      pts[static_cast<std::size_t>(j)] =
          evals[static_cast<std::size_t>(ids[j])].first;
      fv[static_cast<std::size_t>(j)] =
          evals[static_cast<std::size_t>(ids[j])].second;
    }
    auto ps = check_poised(pts);
    if (!ps) continue;
    const Secant sec = fit_secant(*ps, fv);
    const ConeComplex cc = facet_halfspaces(*ps);
    visit(ids, *ps, sec, cc);
  } while (next_combination(comb, total));
}

BruteForceResult brute_force_oracle(const ProblemSpec& spec,
                                    const Domain& dom) {
  const std::int64_t vol = dom.box.volume();
  BruteForceResult out;
  out.min_value = kInf;
  Point x(dom.dim());
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    if (!dom.feasible(idx)) continue;
    dom.box.point_of(idx, x);
    const double f = spec.eval(x);
    if (f < out.min_value) {
      out.min_value = f;
      out.argmins.clear();
      out.argmins.push_back(x);
    } else if (f == out.min_value) {
      out.argmins.push_back(x);
    }
  }
  return out;
}

std::string certificate_json(const Certificate& cert) {
  using nlohmann::json;
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  json j;
  j["problem"] = cert.problem;
  j["variant"] = cert.variant;
  j["n"] = cert.n;
  j["box"] = {{"lo", cert.box.lo}, {"hi", cert.box.hi}};
  j["start"] = cert.start;
  j["status"] = cert.certified ? "certified" : "budget-exhausted";
  j["certified"] = cert.certified;
  j["lower"] = num(cert.lower);
  j["upper"] = num(cert.upper);
  j["best"] = cert.best;
  j["evaluations"] = cert.evaluations;
  j["first_best"] = cert.first_best;
  j["seconds"] = cert.seconds;
  json rows = json::array();
  for (const CutStatsRow& r : cert.stats) {
    rows.push_back({{"iteration", r.iteration},
                    {"combos_total", r.combos_total},
                    {"combos_poised", r.combos_poised},
                    {"cuts_updating", r.cuts_updating},
                    {"cuts_pruning", r.cuts_pruning},
                    {"lower", num(r.lower)},
                    {"upper", num(r.upper)},
                    {"seconds", r.seconds}});
  }
  j["iterations"] = std::move(rows);
  json log = json::array();
  for (const auto& [p, f] : cert.evals) {
    log.push_back({{"x", p}, {"f", f}});
  }
  j["log"] = std::move(log);
  return j.dump(2) + "\n";
}

}  // namespace sucil
