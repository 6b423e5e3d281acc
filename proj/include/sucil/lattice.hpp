#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sucil/errors.hpp"

namespace sucil {

using Point = std::vector<int>;

// Axis-aligned box of integer lattice points, bounds inclusive on both sides.
struct Box {
  std::vector<int> lo;
  std::vector<int> hi;

  Box() = default;
  Box(std::vector<int> lo_, std::vector<int> hi_);

  // Uniform box [lo, hi]^n.
  static Box uniform(int n, int lo, int hi);

  int dim() const { return static_cast<int>(lo.size()); }

  // Number of lattice points.  Throws LatticeTooLargeError if the count
  // overflows or exceeds the in-memory table budget.
  std::int64_t volume() const;

  bool contains(std::span<const int> x) const;

  // Dense linear index of a point; coordinate 0 varies fastest.
  std::int64_t index_of(std::span<const int> x) const;

  // Inverse of index_of, writing into `out` (sized dim()).
  void point_of(std::int64_t idx, std::span<int> out) const;
  Point point_of(std::int64_t idx) const;

  bool operator==(const Box& other) const = default;
};

// Chebyshev (max-coordinate) distance between two points.
int linf_dist(std::span<const int> a, std::span<const int> b);

}  // namespace sucil
