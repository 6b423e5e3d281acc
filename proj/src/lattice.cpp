#include "sucil/lattice.hpp"

#include <cstdlib>
#include <limits>
#include <string>
#include <utility>

namespace sucil {

namespace {
// The point table stores one double (8 bytes) plus a small constant number
// of generator ids per point; cap the raw point count so the largest table
// stays comfortably under 2 GiB.
constexpr std::int64_t kMaxLatticePoints = std::int64_t{1} << 27;
}  // namespace

Box::Box(std::vector<int> lo_, std::vector<int> hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) {
    throw DimensionMismatchError("box bounds have different lengths: " +
                                 std::to_string(lo.size()) + " vs " +
                                 std::to_string(hi.size()));
  }
  for (std::size_t h = 0; h < lo.size(); ++h) {
    if (lo[h] > hi[h]) {
      throw DimensionMismatchError("box is empty in coordinate " +
                                   std::to_string(h));
    }
  }
}

Box Box::uniform(int n, int lo, int hi) {
  return Box(std::vector<int>(n, lo), std::vector<int>(n, hi));
}

std::int64_t Box::volume() const {
  std::int64_t vol = 1;
  for (int h = 0; h < dim(); ++h) {
    const std::int64_t side = std::int64_t{hi[h]} - lo[h] + 1;
    if (vol > kMaxLatticePoints / side) {
      throw LatticeTooLargeError("lattice exceeds the in-memory budget of " +
                                 std::to_string(kMaxLatticePoints) +
                                 " points");
    }
    vol *= side;
  }
  return vol;
}

bool Box::contains(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != dim()) {
    throw DimensionMismatchError("point has dimension " +
                                 std::to_string(x.size()) + ", box has " +
                                 std::to_string(dim()));
  }
  for (int h = 0; h < dim(); ++h) {
    if (x[h] < lo[h] || x[h] > hi[h]) return false;
  }
  return true;
}

std::int64_t Box::index_of(std::span<const int> x) const {
  if (!contains(x)) {
    throw DimensionMismatchError("point lies outside the box");
  }
  std::int64_t idx = 0;
  std::int64_t stride = 1;
  for (int h = 0; h < dim(); ++h) {
    idx += stride * (x[h] - lo[h]);
    stride *= std::int64_t{hi[h]} - lo[h] + 1;
  }
  return idx;
}

void Box::point_of(std::int64_t idx, std::span<int> out) const {
  if (static_cast<int>(out.size()) != dim()) {
    throw DimensionMismatchError("output span has wrong dimension");
  }
  for (int h = 0; h < dim(); ++h) {
    const std::int64_t side = std::int64_t{hi[h]} - lo[h] + 1;
    out[h] = lo[h] + static_cast<int>(idx % side);
    idx /= side;
  }
}

Point Box::point_of(std::int64_t idx) const {
  Point p(dim());
  point_of(idx, p);
  return p;
}

int linf_dist(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatchError("distance between points of different size");
  }
  int d = 0;
  for (std::size_t h = 0; h < a.size(); ++h) {
    const int ad = std::abs(a[h] - b[h]);
    if (ad > d) d = ad;
  }
  return d;
}

}  // namespace sucil
