#pragma once

// Scalar potentials phi with optional closed-form frame derivatives.
// grad packs (X phi, Y phi, T phi); hess packs the second-order frame
// derivatives [[XX, XY], [YX, YY]] where XY means X applied after Y.
// Missing derivatives fall back to finite differences along the group
// subgroups, so every potential is usable everywhere, just at different
// cost/accuracy.

#include "heis/heisenberg.hpp"
#include "heis/quadrature.hpp"

#include <functional>

namespace heis {

struct PotentialField {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> grad;            // optional
  std::function<Eigen::Matrix2d(const Point&)> hess;  // optional
};

// (X phi, Y phi, T phi), analytic when available.
Point hgrad(const PotentialField& phi, const Point& p, const QuadratureConfig& cfg);

// [[XX, XY], [YX, YY]] phi; falls back to differences of hgrad.
Eigen::Matrix2d hhess(const PotentialField& phi, const Point& p,
                      const QuadratureConfig& cfg);

// phi = c, generating the vertical flow c * T.
PotentialField constant_potential(double c);

// phi = x, y, or t as plain coordinate fields.
PotentialField coordinate_potential(Direction dir);

// phi = c1 - 4 c2 y + 4 c3 x; its flow is the left translation
// s |-> (s c2, s c3, s c1) * p, the unique contact generator with
// prescribed velocity (c2, c3, c1) at the origin.
PotentialField affine_contact_potential(double c1, double c2, double c3);

// The radial stretch generator phi = -2 t log||p||.
PotentialField radial_stretch_potential();

// phi = exp(-gauge^4 / a), a smooth compactly-concentrated test field.
PotentialField gauge_bump_potential(double a);

}  // namespace heis
