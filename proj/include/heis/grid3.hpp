#pragma once

// Regular-grid scalar field over a box with Catmull-Rom tricubic
// evaluation.  C^1 across cells, so interpolated fields have continuous
// gradients -- the property the flow and construction code relies on when
// it differentiates tabulated Jacobians and potentials.

#include "heis/heisenberg.hpp"
#include "heis/quadrature.hpp"

#include <functional>
#include <vector>

namespace heis {

class ScalarGrid3 {
 public:
  ScalarGrid3() = default;
  ScalarGrid3(const Box& box, const Eigen::Vector3i& dims,
              std::vector<double> values);

  // Sample fn at the nodes of box with the given per-axis node counts.
  static ScalarGrid3 tabulate(const Box& box, const Eigen::Vector3i& dims,
                              const std::function<double(const Point&)>& fn);

  double value(const Point& p) const;
  // Value and Cartesian gradient in one pass.
  double value_gradient(const Point& p, Point* grad) const;

  const Box& box() const { return box_; }
  const Eigen::Vector3i& dims() const { return dims_; }
  double node(int ix, int iy, int it) const { return values_[index(ix, iy, it)]; }

 private:
  std::size_t index(int ix, int iy, int it) const {
    return (static_cast<std::size_t>(it) * dims_.y() + iy) * dims_.x() + ix;
  }

  Box box_{};
  Eigen::Vector3i dims_{Eigen::Vector3i::Zero()};
  Point spacing_{Point::Ones()};
  std::vector<double> values_;
};

}  // namespace heis
