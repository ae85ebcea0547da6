#include "heis/potential_field.hpp"

#include "heis/errors.hpp"

#include <cmath>

namespace heis {

Point hgrad(const PotentialField& phi, const Point& p, const QuadratureConfig& cfg) {
  if (phi.grad) return phi.grad(p);
  return Point(hderiv(phi.value, p, Direction::X, cfg),
               hderiv(phi.value, p, Direction::Y, cfg),
               hderiv(phi.value, p, Direction::T, cfg));
}

Eigen::Matrix2d hhess(const PotentialField& phi, const Point& p,
                      const QuadratureConfig& cfg) {
  if (phi.hess) return phi.hess(p);
  Eigen::Matrix2d H;
  if (phi.grad) {
    // One difference layer on top of exact first derivatives.
    const double h = cfg.fd_step;
    const Point gxp = phi.grad(subgroup_step(p, Direction::X, h));
    const Point gxm = phi.grad(subgroup_step(p, Direction::X, -h));
    const Point gyp = phi.grad(subgroup_step(p, Direction::Y, h));
    const Point gym = phi.grad(subgroup_step(p, Direction::Y, -h));
    const Point dX = (gxp - gxm) / (2 * h);  // X applied to (Xphi, Yphi, Tphi)
    const Point dY = (gyp - gym) / (2 * h);
    H << dX.x(), dX.y(),   // XX, XY
        dY.x(), dY.y();    // YX, YY
    return H;
  }
  H << hderiv2(phi.value, p, Direction::X, Direction::X, cfg),
      hderiv2(phi.value, p, Direction::X, Direction::Y, cfg),
      hderiv2(phi.value, p, Direction::Y, Direction::X, cfg),
      hderiv2(phi.value, p, Direction::Y, Direction::Y, cfg);
  return H;
}

PotentialField constant_potential(double c) {
  PotentialField f;
  f.value = [c](const Point&) { return c; };
  f.grad = [](const Point&) { return Point::Zero().eval(); };
  f.hess = [](const Point&) { return Eigen::Matrix2d::Zero().eval(); };
  return f;
}

PotentialField coordinate_potential(Direction dir) {
  PotentialField f;
  switch (dir) {
    case Direction::X:
      f.value = [](const Point& p) { return p.x(); };
      f.grad = [](const Point&) { return Point(1, 0, 0); };
      f.hess = [](const Point&) { return Eigen::Matrix2d::Zero().eval(); };
      break;
    case Direction::Y:
      f.value = [](const Point& p) { return p.y(); };
      f.grad = [](const Point&) { return Point(0, 1, 0); };
      f.hess = [](const Point&) { return Eigen::Matrix2d::Zero().eval(); };
      break;
    default:
      f.value = [](const Point& p) { return p.z(); };
      // X t = 2y, Y t = -2x, T t = 1; second layer picks up the bracket.
      f.grad = [](const Point& p) { return Point(2 * p.y(), -2 * p.x(), 1); };
      f.hess = [](const Point&) {
        Eigen::Matrix2d H;
        H << 0, -2, 2, 0;
        return H;
      };
  }
  return f;
}

PotentialField affine_contact_potential(double c1, double c2, double c3) {
  PotentialField f;
  f.value = [=](const Point& p) { return c1 - 4 * c2 * p.y() + 4 * c3 * p.x(); };
  f.grad = [=](const Point&) { return Point(4 * c3, -4 * c2, 0); };
  f.hess = [](const Point&) { return Eigen::Matrix2d::Zero().eval(); };
  return f;
}

PotentialField radial_stretch_potential() {
  PotentialField f;
  f.value = [](const Point& p) {
    const double n = gauge4(p);
    if (n <= 0.0) throw EvaluationError("radial stretch potential: pole at origin");
    return -0.5 * p.z() * std::log(n);
  };
  f.grad = [](const Point& p) {
    const double n = gauge4(p);
    if (n <= 0.0) throw EvaluationError("radial stretch potential: pole at origin");
    const Point dn = gauge4_gradient(p);
    const double xn = dn.x() + 2 * p.y() * dn.z();
    const double yn = dn.y() - 2 * p.x() * dn.z();
    const double L = 0.25 * std::log(n);
    // phi = -2 t L with X t = 2y, Y t = -2x, T t = 1.
    return Point(-4 * p.y() * L - 0.5 * p.z() * xn / n,
                 4 * p.x() * L - 0.5 * p.z() * yn / n,
                 -2 * L - 0.5 * p.z() * dn.z() / n);
  };
  return f;
}

PotentialField gauge_bump_potential(double a) {
  PotentialField f;
  f.value = [a](const Point& p) { return std::exp(-gauge4(p) / a); };
  f.grad = [a](const Point& p) {
    const double v = std::exp(-gauge4(p) / a);
    const Point dn = gauge4_gradient(p);
    const double xn = dn.x() + 2 * p.y() * dn.z();
    const double yn = dn.y() - 2 * p.x() * dn.z();
    return Point(-v * xn / a, -v * yn / a, -v * dn.z() / a);
  };
  return f;
}

}  // namespace heis
