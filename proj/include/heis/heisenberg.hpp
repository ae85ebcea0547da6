#pragma once

// Core arithmetic of the first Heisenberg group realized on R^3 with
// coordinates (x, y, t).  Group law, Koranyi gauge and the associated
// left-invariant metric, anisotropic dilations, and the standard
// left-invariant frame {X, Y, T}.  Everything is a free function over
// Eigen vectors so expressions compose naturally; the scalar type is a
// template parameter with double as the working default.

#include <Eigen/Dense>

#include <cmath>

namespace heis {

template <class S>
using Pt = Eigen::Matrix<S, 3, 1>;

using Point = Pt<double>;

// Group product p * q = (px+qx, py+qy, pt+qt+2(qx py - px qy)).
template <class S>
Pt<S> mul(const Pt<S>& p, const Pt<S>& q) {
  return Pt<S>(p.x() + q.x(), p.y() + q.y(),
               p.z() + q.z() + S(2) * (q.x() * p.y() - p.x() * q.y()));
}

// Group inverse is plain negation.
template <class S>
Pt<S> inv(const Pt<S>& p) {
  return -p;
}

// Fourth power of the Koranyi gauge, ((x^2+y^2)^2 + t^2).  Cheap and
// exact to differentiate, so several callers work with it directly.
template <class S>
S gauge4(const Pt<S>& p) {
  const S r2 = p.x() * p.x() + p.y() * p.y();
  return r2 * r2 + p.z() * p.z();
}

template <class S>
S gauge(const Pt<S>& p) {
  using std::pow;
  return pow(gauge4(p), S(0.25));
}

// Anisotropic dilation delta_r(x, y, t) = (r x, r y, r^2 t).
template <class S>
Pt<S> dilate(S r, const Pt<S>& p) {
  return Pt<S>(r * p.x(), r * p.y(), r * r * p.z());
}

// Left-invariant distance d(p, q) = ||q^{-1} * p||.
template <class S>
S dist(const Pt<S>& p, const Pt<S>& q) {
  return gauge(mul(inv(q), p));
}

// Cartesian gradient of gauge4; feeding it through chain rules is the
// closed-form route to gauge derivatives used by the analytic potentials.
template <class S>
Pt<S> gauge4_gradient(const Pt<S>& p) {
  const S r2 = p.x() * p.x() + p.y() * p.y();
  return Pt<S>(S(4) * p.x() * r2, S(4) * p.y() * r2, S(2) * p.z());
}

// Left-invariant frame at p, as coefficient vectors over (dx, dy, dt):
//   X = dx + 2y dt,  Y = dy - 2x dt,  T = dt,  with [X, Y] = -4T.
template <class S>
struct FrameT {
  Pt<S> X, Y, T;
};

template <class S>
FrameT<S> frame(const Pt<S>& p) {
  return FrameT<S>{Pt<S>(S(1), S(0), S(2) * p.y()),
                   Pt<S>(S(0), S(1), S(-2) * p.x()),
                   Pt<S>(S(0), S(0), S(1))};
}

// Tangent vector a dx + b dy + c dt attached at a base point.
template <class S>
struct TangentT {
  Pt<S> base;
  Pt<S> coeffs;  // (a, b, c) over the coordinate frame
};

using Tangent = TangentT<double>;

// Components over {X_p, Y_p, T_p}.  The horizontal pair coincides with
// the coordinate pair; only the T slot absorbs the shear.
template <class S>
Pt<S> frame_components(const TangentT<S>& v) {
  const S a = v.coeffs.x();
  const S b = v.coeffs.y();
  return Pt<S>(a, b, v.coeffs.z() - S(2) * v.base.y() * a + S(2) * v.base.x() * b);
}

// Norm of the horizontal part, |a X + b Y|_H = hypot(a, b).
template <class S>
S horizontal_norm(const TangentT<S>& v) {
  using std::hypot;
  return hypot(v.coeffs.x(), v.coeffs.y());
}

// One-parameter coordinate subgroups through p: p * (h,0,0), p * (0,h,0),
// p * (0,0,h).  Differentiating scalar fields along these realizes X, Y, T.
enum class Direction { X, Y, T };

template <class S>
Pt<S> subgroup_step(const Pt<S>& p, Direction dir, S h) {
  switch (dir) {
    case Direction::X:
      return mul(p, Pt<S>(h, S(0), S(0)));
    case Direction::Y:
      return mul(p, Pt<S>(S(0), h, S(0)));
    default:
      return mul(p, Pt<S>(S(0), S(0), h));
  }
}

}  // namespace heis
