#pragma once

// Contact vector fields generated by scalar potentials:
//   v_phi = -(1/4) Y phi * X + (1/4) X phi * Y + phi * T,
// their horizontal differential and strain, the ZZ-based dilatation-rate
// bound, and the loglog truncation used to pass from growth bounds to
// bounded data.

#include "heis/potential_field.hpp"

#include <complex>

namespace heis {

struct ContactField {
  PotentialField phi;
  QuadratureConfig cfg;

  // Cartesian components (v1, v2, v3) over (dx, dy, dt).
  Point components(const Point& p) const;
  Tangent at(const Point& p) const;
  // tr D_H v, which for a contact field equals T phi.
  double horizontal_divergence(const Point& p) const;
  // D_H v = [[X v1, Y v1], [X v2, Y v2]].
  Eigen::Matrix2d horizontal_differential(const Point& p) const;
};

// ZZ phi for Z = (1/2)(X - iY):
//   (1/4) [ (XX - YY) phi - i (XY + YX) phi ].
std::complex<double> zz(const PotentialField& phi, const Point& p,
                        const QuadratureConfig& cfg);

// Trace-free symmetrized horizontal gradient
//   S_H v = (1/2) [[Xv1 - Yv2, Xv2 + Yv1], [Xv2 + Yv1, Yv2 - Xv1]],
// computed by differencing the field components; independent of the
// second-derivative route taken by zz().
Eigen::Matrix2d strain_matrix(const ContactField& v, const Point& p);

// Grid sweep of sqrt(2) |ZZ phi| over a box: c is the sup (the dilatation
// growth rate of the flow, K(f_s) <= e^{c s}), worst_point its argmax, and
// max_identity_residual the largest observed |sqrt(2)|ZZphi| - 2||S_H v||_F|
// between the two independent computation routes.
struct StrainReport {
  double c = 0.0;
  Point worst_point = Point::Zero();
  Eigen::Vector3i grid = Eigen::Vector3i::Zero();
  double max_identity_residual = 0.0;
};

StrainReport strain_report(const PotentialField& phi, const Box& region,
                           const Eigen::Vector3i& dims, const QuadratureConfig& cfg);

// Loglog cutoff profile G_l on the gauge^4 variable: 1 on [0, l], a
// quintic-smoothstep descent of 1 - (loglog r - loglog l)/l after l, 0
// once that expression dies; requires l >= e.
double truncation_profile(double r, double l);
double truncation_profile_derivative(double r, double l);

// phi_l(p) = G_l(||p||^4) phi(p).
PotentialField truncate_potential(const PotentialField& phi, double l,
                                  const QuadratureConfig& cfg);

}  // namespace heis
