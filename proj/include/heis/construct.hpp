#pragma once

// Contact potentials adapted to a map g and a smooth compactly supported
// density psi.  The chain is
//   lambda_g(p, q)^4 = int J_g(u) xi0(Gamma_u(p, q)) du,
//   eta_g(p, q)      = -log lambda_g(p, g^{-1}(q)),
//   tphi(p, q)       = eta_g(p, q) * (g^{-1}(q)^{-1} p)_3,
//   phi1(p)          = int tphi(p, q) psi(q) dq,
// and phi = phi1 - phi2 with phi2 the affine contact potential matching
// the field of phi1 at the origin, so v_phi(0) = 0.
//
// The lambda quadrature uses one frozen stratified sample set of the unit
// ball for every evaluation, mapped to B(p, d/2) by u = p * delta_{d/2} w.
// Under that map xi0(Gamma_u) collapses to a fixed radial weight per
// sample, so lambda is a smooth deterministic function of (p, q) and its
// frame derivatives can be taken exactly through the estimator.

#include "heis/flow.hpp"
#include "heis/grid3.hpp"
#include "heis/measure.hpp"

#include <memory>

namespace heis {

// Radial cutoff: 1 on gauge <= 1/4, quintic smoothstep down to 0 at 1/2.
double xi0(const Point& p);
double xi0_profile(double r);
// int xi0 over the group (1-D radial reduction); its fourth root is the
// exact lambda/d ratio when g is the identity.
double xi0_integral();

// J_g as a field: log J and (optionally) its Cartesian gradient, which
// the derivative path of lambda needs.
struct JacobianField {
  std::function<double(const Point&)> log_jacobian;
  std::function<Point(const Point&)> grad_log_jacobian;  // optional
};

JacobianField identity_jacobian();
// Direct evaluation through the word (gradient by central differences).
JacobianField map_jacobian(const ComposedMap& g, const QuadratureConfig& cfg);
// Tabulated log J with analytic interpolant gradient.
JacobianField table_jacobian(std::shared_ptr<const ScalarGrid3> table);

// The frozen unit-ball sample set with per-sample cutoff weights.
struct ConstructSamples {
  std::vector<Point> w;
  std::vector<double> xi;
};
ConstructSamples make_construct_samples(const QuadratureConfig& cfg);

struct LambdaValue {
  double value = 0.0;
  Point grad = Point::Zero();  // frame derivatives (X, Y, T) in p
};

// lambda at (p, a) for a = g^{-1}(q); gradients only when requested (they
// need grad_log_jacobian unless J is constant).
LambdaValue lambda_eval(const JacobianField& J, const Point& p, const Point& a,
                        const ConstructSamples& S, bool with_gradient);

// eta and tphi in the same convention (a = g^{-1}(q) precomputed).
LambdaValue eta_eval(const JacobianField& J, const Point& p, const Point& a,
                     const ConstructSamples& S, bool with_gradient);
LambdaValue tilde_phi_eval(const JacobianField& J, const Point& p, const Point& a,
                           const ConstructSamples& S, bool with_gradient);

// g packaged for the construction: forward/backward evaluation plus the
// Jacobian field of g itself.
struct MapBundle {
  std::function<Point(const Point&)> forward;
  std::function<Point(const Point&)> backward;
  JacobianField jacobian;
};

MapBundle identity_bundle();
MapBundle map_bundle(const ComposedMap& g, const QuadratureConfig& cfg);

struct ConstructedPotential {
  PotentialField field;   // phi1 - phi2, with analytic-through-the-estimator grads
  PotentialField phi1;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;  // components of v_{phi1} at 0
};

// Build phi_{g,psi}.  psi enters through its quadrature cells (atoms are
// taken as point weights, density cells by midpoint rule).
ConstructedPotential build_contact_potential(const MapBundle& g, const Measure& psi,
                                             const QuadratureConfig& cfg);

// Sampled version of a potential: phi and its frame gradient on a box
// grid, evaluated thereafter by tricubic interpolation.
struct TabulatedPotential {
  std::shared_ptr<const ScalarGrid3> phi, xphi, yphi, tphi;
  PotentialField field() const;
};

TabulatedPotential tabulate_potential(const PotentialField& src, const Box& box,
                                      const Eigen::Vector3i& dims,
                                      const QuadratureConfig& cfg);

std::shared_ptr<const ScalarGrid3> tabulate_log_jacobian(const ComposedMap& g,
                                                         const Box& box,
                                                         const Eigen::Vector3i& dims);

}  // namespace heis
