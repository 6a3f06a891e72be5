#include "kslab/grid.hpp"

#include <sstream>

namespace kslab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 3)
    throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  size_ = 1;
  for (const auto& a : axes_) {
    if (a.points < 8 || !is_power_of_two(a.points))
      throw std::invalid_argument("points per axis must be a power of two >= 8, got " +
                                  std::to_string(a.points));
    if (!(a.length > 0.0) || !std::isfinite(a.length))
      throw std::invalid_argument("axis length must be positive");
    size_ *= a.points;
  }
}

Grid Grid::uniform(int dim, int points, double length) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  return Grid(std::vector<Axis>(static_cast<std::size_t>(dim), Axis{points, length}));
}

double Grid::cell_volume() const {
  double h = 1.0;
  for (const auto& a : axes_) h *= a.length / a.points;
  return h;
}

double Grid::measure() const {
  double m = 1.0;
  for (const auto& a : axes_) m *= a.length;
  return m;
}

std::array<int, 3> Grid::unravel(Eigen::Index flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim() - 1; a >= 0; --a) {
    const int n = axes_[static_cast<std::size_t>(a)].points;
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

Eigen::Index Grid::ravel(const std::array<int, 3>& idx) const {
  Eigen::Index flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * axes_[static_cast<std::size_t>(a)].points + idx[static_cast<std::size_t>(a)];
  return flat;
}

std::string describe(const Grid& grid) {
  std::ostringstream os;
  for (int a = 0; a < grid.dim(); ++a) {
    if (a) os << " x ";
    os << grid.axis(a).points << "@" << grid.axis(a).length;
  }
  return os.str();
}

}  // namespace kslab
