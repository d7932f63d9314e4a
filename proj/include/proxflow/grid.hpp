#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "proxflow/errors.hpp"

namespace proxflow {

/// Periodic lattice in 1, 2 or 3 dimensions; sites are indexed row-major.
/// Every side must be at least 2 (periodic differences degenerate below that).
struct GridShape {
  std::vector<int> dims;

  explicit GridShape(std::vector<int> d) : dims(std::move(d)) {
    if (dims.empty() || dims.size() > 3)
      throw DimensionError("GridShape: number of dimensions must be 1, 2 or 3");
    for (int L : dims)
      if (L < 2) throw DimensionError("GridShape: every side length must be >= 2");
  }

  int ndim() const { return static_cast<int>(dims.size()); }

  std::size_t size() const {
    std::size_t n = 1;
    for (int L : dims) n *= static_cast<std::size_t>(L);
    return n;
  }

  /// Row-major stride of an axis (distance between neighbours along it).
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = ndim() - 1; a > axis; --a) s *= static_cast<std::size_t>(dims[a]);
    return s;
  }

  bool operator==(const GridShape& o) const { return dims == o.dims; }
};

}  // namespace proxflow
