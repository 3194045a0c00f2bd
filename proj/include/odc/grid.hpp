#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace odc {

/// Row-major pixel grid. Row index is y, column index is x, so `g(y, x)`.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Mask = Grid<bool>;
using LabelGrid = Grid<std::int32_t>;

/// Fraction of set entries in a boolean grid; 0 for an empty grid.
template <typename Derived>
double set_fraction(const Eigen::ArrayBase<Derived>& flags) {
  if (flags.size() == 0) return 0.0;
  return static_cast<double>(flags.count()) / static_cast<double>(flags.size());
}

}  // namespace odc
