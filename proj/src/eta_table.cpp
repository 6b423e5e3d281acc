#include "sucil/eta_table.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

namespace sucil {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxDim = 32;
constexpr std::int64_t kTableBudgetBytes = std::int64_t{2} << 30;
}  // namespace

Domain::Domain(Box b, std::vector<std::uint8_t> m)
    : box(std::move(b)), mask(std::move(m)) {
  if (!mask.empty() &&
      static_cast<std::int64_t>(mask.size()) != box.volume()) {
    throw DimensionMismatchError("mask size does not match box volume");
  }
}

bool Domain::feasible_point(std::span<const int> x) const {
  if (!box.contains(x)) return false;
  return feasible(box.index_of(x));
}

std::int64_t Domain::size() const {
  const std::int64_t vol = box.volume();
  if (mask.empty()) return vol;
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < vol; ++i) {
    if (mask[static_cast<std::size_t>(i)]) ++count;
  }
  return count;
}

EtaTable::EtaTable(const Domain& dom, int n) : n_(n) {
  if (n < 1 || n > kMaxDim) {
    throw DimensionMismatchError("table dimension out of range: " +
                                 std::to_string(n));
  }
  const std::int64_t vol = dom.box.volume();
  const std::int64_t bytes_per_point = 8 + 4 * (std::int64_t{n} + 1);
  if (vol > kTableBudgetBytes / bytes_per_point) {
    throw LatticeTooLargeError("bound table would exceed the 2 GiB budget");
  }
  eta_.assign(static_cast<std::size_t>(vol), kNegInf);
  gen_.assign(static_cast<std::size_t>(vol) * (n + 1), -1);
}

EtaTable init_table(const Domain& dom) { return EtaTable(dom, dom.dim()); }

namespace {

// Apply one cut at one lattice point.  Returns 1 on strict improvement and
// sets `pruned` when the improved bound reaches u.
inline int apply_at_point(EtaTable& table, const Box& box, const CutView& cut,
                          std::int64_t idx, double u, double tol,
                          int& pruned) {
  const int n = table.n();
  const int m = n + 1;
  int xbuf[kMaxDim];
  box.point_of(idx, {xbuf, static_cast<std::size_t>(n)});

  // Membership in the cone union: exactly one normalized facet positive.
  int positives = 0;
  for (int j = 0; j < m; ++j) {
    const double* fj = cut.facets.data() + static_cast<std::size_t>(j) * m;
    double v = fj[n];
    for (int h = 0; h < n; ++h) v += fj[h] * xbuf[h];
    if (v > tol) {
      if (++positives >= 2) return 0;
    }
  }
  if (positives != 1) return 0;

  double mval = cut.model[n];
  for (int h = 0; h < n; ++h) mval += cut.model[h] * xbuf[h];
  double& slot = table.eta_data()[idx];
  if (mval > slot) {
    slot = mval;
    std::int32_t* g =
        table.gen_data() + static_cast<std::size_t>(idx) * m;
    for (int j = 0; j < m; ++j) g[j] = cut.ids[j];
    if (mval >= u) pruned = 1;
    return 1;
  }
  return 0;
}

void check_cut(const EtaTable& table, const CutView& cut) {
  const std::size_t m = static_cast<std::size_t>(table.n()) + 1;
  if (cut.ids.size() != m || cut.model.size() != m ||
      cut.facets.size() != m * m) {
    throw DimensionMismatchError("cut arrays do not match table dimension");
  }
}

}  // namespace

UpdateResult update_eta_reference(EtaTable& table, const Domain& dom,
                                  const CutView& cut, const ActiveSet& active,
                                  double u, double tol) {
  check_cut(table, cut);
  UpdateResult r;
  int pruned = 0;
  for (const std::int64_t idx : active) {
    r.improved += apply_at_point(table, dom.box, cut, idx, u, tol, pruned);
  }
  r.pruned_any = pruned != 0;
  return r;
}

UpdateResult update_eta(EtaTable& table, const Domain& dom, const CutView& cut,
                        const ActiveSet& active, double u, double tol) {
  check_cut(table, cut);
  UpdateResult r;
  int pruned = 0;
  std::int64_t improved = 0;
  const std::int64_t count = static_cast<std::int64_t>(active.size());
#ifdef SUCIL_HAVE_OPENMP
#pragma omp parallel for schedule(static) reduction(+ : improved) \
    reduction(| : pruned)
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    improved += apply_at_point(table, dom.box, cut,
                               active[static_cast<std::size_t>(i)], u, tol,
                               pruned);
  }
  r.improved = improved;
  r.pruned_any = pruned != 0;
  return r;
}

namespace {

// Flat-coordinate kernel: membership and value of one cut at one point
// whose coordinates are already decoded.  Checks the model value first so
// points whose bound is already at or above the secant exit after one dot
// product.
inline int apply_at_row(EtaTable& table, const CutView& cut,
                        std::int64_t idx, const int* x, double u, double tol,
                        int& pruned) {
  const int n = table.n();
  const int m = n + 1;
  double mval = cut.model[n];
  for (int h = 0; h < n; ++h) mval += cut.model[h] * x[h];
  double& slot = table.eta_data()[idx];
  if (!(mval > slot)) return 0;

  int positives = 0;
  for (int j = 0; j < m; ++j) {
    const double* fj = cut.facets.data() + static_cast<std::size_t>(j) * m;
    double v = fj[n];
    for (int h = 0; h < n; ++h) v += fj[h] * x[h];
    if (v > tol) {
      if (++positives >= 2) return 0;
    }
  }
  if (positives != 1) return 0;

  slot = mval;
  std::int32_t* g = table.gen_data() + static_cast<std::size_t>(idx) * m;
  for (int j = 0; j < m; ++j) g[j] = cut.ids[j];
  if (mval >= u) pruned = 1;
  return 1;
}

}  // namespace

UpdateResult update_eta_flat_reference(EtaTable& table, const CutView& cut,
                                       std::span<const std::int64_t> idxs,
                                       std::span<const int> coords, double u,
                                       double tol) {
  check_cut(table, cut);
  const int n = table.n();
  UpdateResult r;
  int pruned = 0;
  for (std::size_t i = 0; i < idxs.size(); ++i) {
    r.improved += apply_at_row(table, cut, idxs[i],
                               coords.data() + i * static_cast<std::size_t>(n),
                               u, tol, pruned);
  }
  r.pruned_any = pruned != 0;
  return r;
}

UpdateResult update_eta_flat(EtaTable& table, const CutView& cut,
                             std::span<const std::int64_t> idxs,
                             std::span<const int> coords, double u,
                             double tol) {
  check_cut(table, cut);
  const int n = table.n();
  UpdateResult r;
  int pruned = 0;
  std::int64_t improved = 0;
  const std::int64_t count = static_cast<std::int64_t>(idxs.size());
#ifdef SUCIL_HAVE_OPENMP
#pragma omp parallel for schedule(static) reduction(+ : improved) \
    reduction(| : pruned)
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    improved += apply_at_row(
        table, cut, idxs[static_cast<std::size_t>(i)],
        coords.data() + static_cast<std::size_t>(i) * n, u, tol, pruned);
  }
  r.improved = improved;
  r.pruned_any = pruned != 0;
  return r;
}

namespace {

void check_batch(const EtaTable& table, const CutBatchView& batch,
                 std::span<const std::int64_t> idxs,
                 std::span<const int> coords,
                 std::span<const std::int64_t> improved,
                 std::span<const std::uint8_t> pruned) {
  const std::size_t m = static_cast<std::size_t>(table.n()) + 1;
  const auto cnt = static_cast<std::size_t>(batch.count);
  if (batch.m != table.n() + 1 || batch.ids.size() != cnt * m ||
      batch.models.size() != cnt * m || batch.facets.size() != cnt * m * m ||
      batch.enabled.size() != cnt) {
    throw DimensionMismatchError("cut batch arrays do not match table dimension");
  }
  if (improved.size() < cnt || pruned.size() < cnt) {
    throw DimensionMismatchError("cut batch tally arrays are too short");
  }
  if (coords.size() != idxs.size() * static_cast<std::size_t>(table.n())) {
    throw DimensionMismatchError("coordinate block does not match index list");
  }
}

}  // namespace

void apply_cut_batch(EtaTable& table, const CutBatchView& batch,
                     std::span<const std::int64_t> idxs,
                     std::span<const int> coords, double u, double tol,
                     std::span<std::int64_t> improved,
                     std::span<std::uint8_t> pruned) {
  check_batch(table, batch, idxs, coords, improved, pruned);
  const int n = table.n();
  const int m = n + 1;
  const int cnt = batch.count;
  std::fill_n(improved.begin(), static_cast<std::size_t>(cnt), 0);
  std::fill_n(pruned.begin(), static_cast<std::size_t>(cnt), 0);
  if (cnt == 0 || idxs.empty()) return;

  // Compact the enabled cuts and transpose their models so that every
  // coefficient is contiguous across cuts; the per-point secant values then
  // come out of one vectorizable multiply-add pass.  The facet test stays in
  // the row-major early-exit form: at realistic candidate rates most points
  // fail membership within the first two facet rows, so bailing out early
  // beats evaluating all m rows with vector code.
  std::vector<int> slot_of;  // position in the enabled sequence -> cut index
  slot_of.reserve(static_cast<std::size_t>(cnt));
  for (int s = 0; s < cnt; ++s) {
    if (batch.enabled[static_cast<std::size_t>(s)]) slot_of.push_back(s);
  }
  const int ecnt = static_cast<int>(slot_of.size());
  if (ecnt == 0) return;
  std::vector<double> mt(static_cast<std::size_t>(m) * ecnt);
  for (int e = 0; e < ecnt; ++e) {
    const double* src =
        batch.models.data() + static_cast<std::size_t>(slot_of[e]) * m;
    for (int h = 0; h < m; ++h) {
      mt[static_cast<std::size_t>(h) * ecnt + e] = src[h];
    }
  }

  const auto rows = static_cast<std::int64_t>(idxs.size());
  double* eta = table.eta_data();
  std::int32_t* gens = table.gen_data();
#ifdef SUCIL_HAVE_OPENMP
#pragma omp parallel
#endif
  {
    std::vector<std::int64_t> my_improved(static_cast<std::size_t>(ecnt), 0);
    std::vector<std::uint8_t> my_pruned(static_cast<std::size_t>(ecnt), 0);
    std::vector<double> vals(static_cast<std::size_t>(ecnt));
#ifdef SUCIL_HAVE_OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t i = 0; i < rows; ++i) {
      const int* __restrict x = coords.data() + static_cast<std::size_t>(i) * n;
      const double* __restrict mrow =
          mt.data() + static_cast<std::size_t>(n) * ecnt;
      double* __restrict vv = vals.data();
      for (int e = 0; e < ecnt; ++e) vv[e] = mrow[e];
      for (int h = 0; h < n; ++h) {
        const double xh = x[h];
        const double* __restrict mh =
            mt.data() + static_cast<std::size_t>(h) * ecnt;
        for (int e = 0; e < ecnt; ++e) vv[e] += mh[e] * xh;
      }
      const std::int64_t idx = idxs[static_cast<std::size_t>(i)];
      double cur = eta[idx];
      double vmax = vv[0];
      for (int e = 1; e < ecnt; ++e) vmax = std::max(vmax, vv[e]);
      if (!(vmax > cur)) continue;  // no cut in the block can raise this point
      std::int32_t* g = gens + static_cast<std::size_t>(idx) * m;
      for (int e = 0; e < ecnt; ++e) {
        const double mval = vv[e];
        if (!(mval > cur)) continue;
        const int s = slot_of[static_cast<std::size_t>(e)];
        const double* fs =
            batch.facets.data() + static_cast<std::size_t>(s) * m * m;
        int positives = 0;
        for (int j = 0; j < m; ++j) {
          const double* fj = fs + static_cast<std::size_t>(j) * m;
          double v = fj[n];
          for (int h = 0; h < n; ++h) v += fj[h] * x[h];
          if (v > tol) {
            if (++positives >= 2) break;
          }
        }
        if (positives != 1) continue;
        cur = mval;
        const std::int32_t* ids =
            batch.ids.data() + static_cast<std::size_t>(s) * m;
        for (int j = 0; j < m; ++j) g[j] = ids[j];
        ++my_improved[static_cast<std::size_t>(e)];
        if (mval >= u) my_pruned[static_cast<std::size_t>(e)] = 1;
      }
      eta[idx] = cur;
    }
#ifdef SUCIL_HAVE_OPENMP
#pragma omp critical
#endif
    {
      for (int e = 0; e < ecnt; ++e) {
        const auto s = static_cast<std::size_t>(slot_of[static_cast<std::size_t>(e)]);
        improved[s] += my_improved[static_cast<std::size_t>(e)];
        pruned[s] = static_cast<std::uint8_t>(pruned[s] |
                                              my_pruned[static_cast<std::size_t>(e)]);
      }
    }
  }
}

void apply_cut_batch_reference(EtaTable& table, const CutBatchView& batch,
                               std::span<const std::int64_t> idxs,
                               std::span<const int> coords, double u,
                               double tol, std::span<std::int64_t> improved,
                               std::span<std::uint8_t> pruned) {
  check_batch(table, batch, idxs, coords, improved, pruned);
  const int m = table.n() + 1;
  const int cnt = batch.count;
  std::fill_n(improved.begin(), static_cast<std::size_t>(cnt), 0);
  std::fill_n(pruned.begin(), static_cast<std::size_t>(cnt), 0);
  for (int s = 0; s < cnt; ++s) {
    if (!batch.enabled[static_cast<std::size_t>(s)]) continue;
    const std::size_t vo = static_cast<std::size_t>(s) * m;
    const CutView view{
        batch.ids.subspan(vo, static_cast<std::size_t>(m)),
        batch.models.subspan(vo, static_cast<std::size_t>(m)),
        batch.facets.subspan(static_cast<std::size_t>(s) * m * m,
                             static_cast<std::size_t>(m) * m)};
    const UpdateResult res =
        update_eta_flat_reference(table, view, idxs, coords, u, tol);
    improved[static_cast<std::size_t>(s)] = res.improved;
    pruned[static_cast<std::size_t>(s)] = res.pruned_any ? 1 : 0;
  }
}

std::vector<int> decode_active(const Box& box, const ActiveSet& active) {
  const int n = box.dim();
  std::vector<int> coords(active.size() * static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < active.size(); ++i) {
    box.point_of(active[i],
                 {coords.data() + i * static_cast<std::size_t>(n),
                  static_cast<std::size_t>(n)});
  }
  return coords;
}

UpdateResult update_eta(EtaTable& table, const Domain& dom,
                        const PoisedSet& ps, const Secant& secant,
                        const ConeComplex& cc,
                        std::span<const std::int32_t> ids,
                        const ActiveSet& active, double u) {
  const int n = ps.fitter.n();
  const int m = n + 1;
  std::vector<double> model(m);
  for (int h = 0; h < n; ++h) model[h] = secant.c[h];
  model[n] = secant.b;
  std::vector<double> facets(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int h = 0; h < n; ++h) {
      facets[static_cast<std::size_t>(j) * m + h] = cc.facets[j].c[h];
    }
    facets[static_cast<std::size_t>(j) * m + n] = cc.facets[j].b;
  }
  CutView view{ids, model, facets};
  return update_eta(table, dom, view, active, u);
}

std::pair<double, std::int64_t> table_min(const EtaTable& table,
                                          const ActiveSet& active) {
  if (active.empty()) {
    throw EmptyActiveSetError("table_min over an empty working set");
  }
  double best = table.eta(active[0]);
  std::int64_t best_idx = active[0];
  for (std::size_t i = 1; i < active.size(); ++i) {
    const double v = table.eta(active[i]);
    if (v < best) {
      best = v;
      best_idx = active[i];
    }
  }
  return {best, best_idx};
}

std::vector<std::int32_t> generator_set(const EtaTable& table,
                                        const ActiveSet& active,
                                        std::int32_t id_limit) {
  std::vector<std::uint8_t> mark(static_cast<std::size_t>(id_limit), 0);
  const int m = table.n() + 1;
  for (const std::int64_t idx : active) {
    const std::span<const std::int32_t> g = table.gen(idx);
    if (g[0] < 0) continue;  // bound still -inf, no generators
    for (int j = 0; j < m; ++j) mark[static_cast<std::size_t>(g[j])] = 1;
  }
  std::vector<std::int32_t> out;
  for (std::int32_t id = 0; id < id_limit; ++id) {
    if (mark[static_cast<std::size_t>(id)]) out.push_back(id);
  }
  return out;
}

ActiveSet refresh_active(const EtaTable& table, const Domain& dom,
                         const std::vector<std::uint8_t>& evaluated_mask,
                         double u) {
  const std::int64_t vol = table.size();
  if (static_cast<std::int64_t>(evaluated_mask.size()) != vol) {
    throw DimensionMismatchError("evaluated mask size does not match table");
  }
  ActiveSet active;
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    if (!dom.feasible(idx)) continue;
    if (evaluated_mask[static_cast<std::size_t>(idx)]) continue;
    if (table.eta(idx) < u) active.push_back(idx);
  }
  return active;
}

void dump_table_csv(const EtaTable& table, const Domain& dom,
                    std::ostream& out) {
  const int n = table.n();
  const int m = n + 1;
  for (int h = 0; h < n; ++h) out << "x" << h << ",";
  out << "eta,gen\n";
  std::vector<int> x(n);
  char buf[64];
  for (std::int64_t idx = 0; idx < table.size(); ++idx) {
    if (!dom.feasible(idx)) continue;
    dom.box.point_of(idx, x);
    for (int h = 0; h < n; ++h) out << x[h] << ",";
    const double v = table.eta(idx);
    if (std::isinf(v)) {
      out << (v < 0 ? "-inf" : "inf");
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf;
    }
    out << ",";
    const std::span<const std::int32_t> g = table.gen(idx);
    if (g[0] >= 0) {
      for (int j = 0; j < m; ++j) {
        if (j) out << " ";
        out << g[j];
      }
    }
    out << "\n";
  }
}

}  // namespace sucil
