#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace kslab {

/// One periodic axis: `points` samples over a period of `length`.
struct Axis {
  int points = 0;
  double length = 0.0;

  bool operator==(const Axis&) const = default;
};

/// Periodic rectangular lattice in 1, 2 or 3 dimensions.
///
/// Cells are stored in row-major axis order (the last axis varies fastest).
/// Every axis carries a power-of-two number of points, at least 8.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Axis> axes);

  /// Grid with identical axes in every direction.
  static Grid uniform(int dim, int points, double length);

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Axis>& axes() const { return axes_; }

  Eigen::Index size() const { return size_; }
  double cell_volume() const;
  /// |Ω|, the product of the axis lengths.
  double measure() const;

  /// Multi-index of a flat cell position; unused trailing entries are 0.
  std::array<int, 3> unravel(Eigen::Index flat) const;
  Eigen::Index ravel(const std::array<int, 3>& idx) const;

  /// Physical coordinate of a cell centre along `axis` (cell i sits at i*h).
  double coordinate(int axis, int i) const {
    const auto& a = axes_[static_cast<std::size_t>(axis)];
    return a.length * static_cast<double>(i) / a.points;
  }

  bool operator==(const Grid&) const = default;

 private:
  std::vector<Axis> axes_;
  Eigen::Index size_ = 0;
};

std::string describe(const Grid& grid);

/// Real samples of u or v on a grid, one value per cell.
template <typename Scalar>
class FieldT {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  FieldT() = default;

  /// Zero field.
  explicit FieldT(Grid grid) : grid_(std::move(grid)), values_(Vector::Zero(grid_.size())) {}

  FieldT(Grid grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("field size " + std::to_string(values_.size()) +
                                  " does not match grid size " + std::to_string(grid_.size()));
    if (!values_.allFinite()) throw std::invalid_argument("field contains non-finite values");
  }

  static FieldT constant(Grid grid, Scalar c) {
    Vector v = Vector::Constant(grid.size(), c);
    return FieldT(std::move(grid), std::move(v));
  }

  const Grid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  Scalar operator[](Eigen::Index i) const { return values_[i]; }

 private:
  Grid grid_;
  Vector values_;
};

using Field = FieldT<double>;

template <typename Scalar>
Scalar mean(const FieldT<Scalar>& f) {
  return f.values().mean();
}

/// ∫_Ω f dx as a cell-volume weighted sum.
template <typename Scalar>
Scalar mass(const FieldT<Scalar>& f) {
  return f.values().sum() * static_cast<Scalar>(f.grid().cell_volume());
}

template <typename Scalar>
Scalar min_value(const FieldT<Scalar>& f) {
  return f.values().minCoeff();
}

template <typename Scalar>
Scalar max_value(const FieldT<Scalar>& f) {
  return f.values().maxCoeff();
}

/// Samples `fn(x)` at every cell, where x holds the physical coordinates.
template <typename Fn>
Field sample(const Grid& grid, Fn&& fn) {
  Field::Vector v(grid.size());
  std::array<double, 3> x{};
  for (Eigen::Index c = 0; c < grid.size(); ++c) {
    const auto idx = grid.unravel(c);
    for (int a = 0; a < grid.dim(); ++a) x[static_cast<std::size_t>(a)] = grid.coordinate(a, idx[static_cast<std::size_t>(a)]);
    v[c] = fn(x);
  }
  return Field(grid, std::move(v));
}

}  // namespace kslab
