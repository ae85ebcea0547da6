#include "heis/grid3.hpp"

#include "heis/errors.hpp"

#include <algorithm>
#include <cmath>

namespace heis {

ScalarGrid3::ScalarGrid3(const Box& box, const Eigen::Vector3i& dims,
                         std::vector<double> values)
    : box_(box), dims_(dims), values_(std::move(values)) {
  if (dims_.minCoeff() < 2)
    throw ConfigError("ScalarGrid3: need at least 2 nodes per axis");
  if (values_.size() != static_cast<std::size_t>(dims_.prod()))
    throw ConfigError("ScalarGrid3: value count does not match dims");
  spacing_ = Point((box_.hi.x() - box_.lo.x()) / (dims_.x() - 1),
                   (box_.hi.y() - box_.lo.y()) / (dims_.y() - 1),
                   (box_.hi.z() - box_.lo.z()) / (dims_.z() - 1));
}

ScalarGrid3 ScalarGrid3::tabulate(const Box& box, const Eigen::Vector3i& dims,
                                  const std::function<double(const Point&)>& fn) {
  std::vector<double> values(static_cast<std::size_t>(dims.prod()));
  const Point h((box.hi.x() - box.lo.x()) / (dims.x() - 1),
                (box.hi.y() - box.lo.y()) / (dims.y() - 1),
                (box.hi.z() - box.lo.z()) / (dims.z() - 1));
  std::size_t k = 0;
  for (int it = 0; it < dims.z(); ++it)
    for (int iy = 0; iy < dims.y(); ++iy)
      for (int ix = 0; ix < dims.x(); ++ix)
        values[k++] = fn(Point(box.lo.x() + ix * h.x(), box.lo.y() + iy * h.y(),
                               box.lo.z() + it * h.z()));
  return ScalarGrid3(box, dims, std::move(values));
}

namespace {

struct Axis {
  int idx[4];      // clamped node indices
  double w[4];     // value weights
  double dw[4];    // derivative weights (per unit local coordinate)
};

Axis axis_weights(double coord, double lo, double h, int n) {
  double s = (coord - lo) / h;
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  int i = std::min(static_cast<int>(std::floor(s)), n - 2);
  const double u = s - i;
  const double u2 = u * u, u3 = u2 * u;
  Axis a;
  a.idx[0] = std::max(i - 1, 0);
  a.idx[1] = i;
  a.idx[2] = std::min(i + 1, n - 1);
  a.idx[3] = std::min(i + 2, n - 1);
  a.w[0] = 0.5 * (-u3 + 2 * u2 - u);
  a.w[1] = 0.5 * (3 * u3 - 5 * u2 + 2);
  a.w[2] = 0.5 * (-3 * u3 + 4 * u2 + u);
  a.w[3] = 0.5 * (u3 - u2);
  a.dw[0] = 0.5 * (-3 * u2 + 4 * u - 1);
  a.dw[1] = 0.5 * (9 * u2 - 10 * u);
  a.dw[2] = 0.5 * (-9 * u2 + 8 * u + 1);
  a.dw[3] = 0.5 * (3 * u2 - 2 * u);
  return a;
}

}  // namespace

double ScalarGrid3::value(const Point& p) const {
  return value_gradient(p, nullptr);
}

double ScalarGrid3::value_gradient(const Point& p, Point* grad) const {
  const Axis ax = axis_weights(p.x(), box_.lo.x(), spacing_.x(), dims_.x());
  const Axis ay = axis_weights(p.y(), box_.lo.y(), spacing_.y(), dims_.y());
  const Axis at = axis_weights(p.z(), box_.lo.z(), spacing_.z(), dims_.z());
  double v = 0.0, gx = 0.0, gy = 0.0, gt = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) {
      double line = 0.0, dline = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double f = values_[index(ax.idx[i], ay.idx[j], at.idx[k])];
        line += ax.w[i] * f;
        dline += ax.dw[i] * f;
      }
      const double wjk = ay.w[j] * at.w[k];
      v += wjk * line;
      if (grad) {
        gx += wjk * dline;
        gy += ay.dw[j] * at.w[k] * line;
        gt += ay.w[j] * at.dw[k] * line;
      }
    }
  if (grad)
    *grad = Point(gx / spacing_.x(), gy / spacing_.y(), gt / spacing_.z());
  return v;
}

}  // namespace heis
