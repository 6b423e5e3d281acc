#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "sucil/geometry.hpp"
#include "sucil/lattice.hpp"

namespace sucil {

// Feasible region: a box of lattice points, optionally thinned by a
// membership mask (one byte per lattice index; empty mask = full box).
struct Domain {
  Box box;
  std::vector<std::uint8_t> mask;

  Domain() = default;
  explicit Domain(Box b) : box(std::move(b)) {}
  Domain(Box b, std::vector<std::uint8_t> m);

  int dim() const { return box.dim(); }

  bool feasible(std::int64_t idx) const {
    return mask.empty() || mask[static_cast<std::size_t>(idx)] != 0;
  }
  bool feasible_point(std::span<const int> x) const;

  // Number of feasible lattice points.
  std::int64_t size() const;
};

// Indices of the current working subset of the domain, in enumeration
// order (ascending lattice index).
using ActiveSet = std::vector<std::int64_t>;

// Dense per-point lower bound over the domain, with generator bookkeeping:
// each point remembers the ids of the n+1 evaluated points whose secant
// last strictly raised its bound.
class EtaTable {
public:
  EtaTable(const Domain& dom, int n);

  int n() const { return n_; }
  std::int64_t size() const { return static_cast<std::int64_t>(eta_.size()); }

  double eta(std::int64_t idx) const { return eta_[static_cast<std::size_t>(idx)]; }
  // Generator ids for a point; entries are -1 when the bound is still -inf.
  std::span<const std::int32_t> gen(std::int64_t idx) const {
    return {gen_.data() + static_cast<std::size_t>(idx) * (n_ + 1),
            static_cast<std::size_t>(n_ + 1)};
  }

  double* eta_data() { return eta_.data(); }
  const double* eta_data() const { return eta_.data(); }
  std::int32_t* gen_data() { return gen_.data(); }
  const std::int32_t* gen_data() const { return gen_.data(); }

private:
  int n_;
  std::vector<double> eta_;
  std::vector<std::int32_t> gen_;
};

// One conditional cut ready for application: the ids of its n+1 defining
// evaluated points, the secant coefficients, and the normalized facets.
struct CutView {
  std::span<const std::int32_t> ids;  // n+1 ids, ascending
  std::span<const double> model;      // n+1 entries: c, then b
  std::span<const double> facets;     // (n+1) x (n+1) row-major normalized
};

struct UpdateResult {
  std::int64_t improved = 0;  // points whose bound strictly rose
  bool pruned_any = false;    // some improved point reached m(x) >= u
};

// Fresh table with every bound at -inf and no generators.
EtaTable init_table(const Domain& dom);

// Apply one cut to every point of `active` that lies in the cut's cone
// union, max-merging the secant value into the table and recording
// generators on strict improvement.  `u` is the current best objective
// value and only feeds the pruning flag.  Parallelized over points when
// OpenMP is enabled; results are identical to the serial reference.
UpdateResult update_eta(EtaTable& table, const Domain& dom, const CutView& cut,
                        const ActiveSet& active,
                        double u = std::numeric_limits<double>::infinity(),
                        double tol = kMembershipTol);

// Serial twin of update_eta, kept as the reference implementation for
// equivalence tests and benchmarks.
UpdateResult update_eta_reference(EtaTable& table, const Domain& dom,
                                  const CutView& cut, const ActiveSet& active,
                                  double u = std::numeric_limits<double>::infinity(),
                                  double tol = kMembershipTol);

// Hot-path variant over pre-decoded coordinates: row i of `coords`
// (|idxs| x n, row-major) holds the point at lattice index idxs[i].
// Skips the index-to-point decode that dominates the plain scan.
UpdateResult update_eta_flat(EtaTable& table, const CutView& cut,
                             std::span<const std::int64_t> idxs,
                             std::span<const int> coords,
                             double u = std::numeric_limits<double>::infinity(),
                             double tol = kMembershipTol);

// Serial twin of update_eta_flat.
UpdateResult update_eta_flat_reference(
    EtaTable& table, const CutView& cut, std::span<const std::int64_t> idxs,
    std::span<const int> coords,
    double u = std::numeric_limits<double>::infinity(),
    double tol = kMembershipTol);

// A block of cuts in flattened layout (count cuts, m = n + 1 entries per
// model row).  `enabled[s]` gates cut s; disabled slots are skipped without
// touching the table.
struct CutBatchView {
  int count = 0;
  int m = 0;
  std::span<const std::int32_t> ids;      // count x m
  std::span<const double> models;         // count x m (c, then b)
  std::span<const double> facets;         // count x m x m row-major
  std::span<const std::uint8_t> enabled;  // count
};

// Apply a block of cuts as if update_eta_flat were called once per enabled
// cut in index order: at every point the lower-indexed cuts take effect
// first and later cuts compare against the already-raised bound, so the
// resulting table, generators, and per-cut tallies are identical to the
// one-cut-at-a-time path.  The scan is parallelized over points and
// evaluates the whole block's secant values per point in one fused pass,
// which is what makes this the hot-path kernel.  `improved[s]` receives the
// number of points cut s strictly raised; `pruned[s]` becomes nonzero when
// one of those points reached u.
void apply_cut_batch(EtaTable& table, const CutBatchView& batch,
                     std::span<const std::int64_t> idxs,
                     std::span<const int> coords, double u, double tol,
                     std::span<std::int64_t> improved,
                     std::span<std::uint8_t> pruned);

// Serial twin of apply_cut_batch: literally one update_eta_flat_reference
// call per enabled cut.
void apply_cut_batch_reference(EtaTable& table, const CutBatchView& batch,
                               std::span<const std::int64_t> idxs,
                               std::span<const int> coords, double u,
                               double tol, std::span<std::int64_t> improved,
                               std::span<std::uint8_t> pruned);

// Decode an active set into the flat coordinate layout used by
// update_eta_flat.
std::vector<int> decode_active(const Box& box, const ActiveSet& active);

// Convenience wrapper building a CutView from the geometry types.
UpdateResult update_eta(EtaTable& table, const Domain& dom,
                        const PoisedSet& ps, const Secant& secant,
                        const ConeComplex& cc,
                        std::span<const std::int32_t> ids,
                        const ActiveSet& active,
                        double u = std::numeric_limits<double>::infinity());

// Minimum bound over `active` and the first index attaining it in
// enumeration order.  Throws EmptyActiveSetError when `active` is empty.
std::pair<double, std::int64_t> table_min(const EtaTable& table,
                                          const ActiveSet& active);

// Union of generator ids over `active`, ascending.  `id_limit` bounds the
// id universe (total evaluated points).
std::vector<std::int32_t> generator_set(const EtaTable& table,
                                        const ActiveSet& active,
                                        std::int32_t id_limit);

// The working subset: feasible, not yet evaluated, bound still below u.
ActiveSet refresh_active(const EtaTable& table, const Domain& dom,
                         const std::vector<std::uint8_t>& evaluated_mask,
                         double u);

// Debug/fixture dump: one row per feasible point with coordinates, bound,
// and generator ids.
void dump_table_csv(const EtaTable& table, const Domain& dom,
                    std::ostream& out);

}  // namespace sucil
