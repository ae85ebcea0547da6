#include "heis/contact_field.hpp"

#include "heis/errors.hpp"

#include <cmath>

namespace heis {

Point ContactField::components(const Point& p) const {
  const Point g = hgrad(phi, p, cfg);
  const double v1 = -0.25 * g.y();
  const double v2 = 0.25 * g.x();
  return Point(v1, v2, phi.value(p) + 2 * p.y() * v1 - 2 * p.x() * v2);
}

Tangent ContactField::at(const Point& p) const {
  return Tangent{p, components(p)};
}

double ContactField::horizontal_divergence(const Point& p) const {
  return hgrad(phi, p, cfg).z();
}

Eigen::Matrix2d ContactField::horizontal_differential(const Point& p) const {
  const Eigen::Matrix2d H = hhess(phi, p, cfg);
  Eigen::Matrix2d D;
  // v1 = -(1/4) Y phi, v2 = (1/4) X phi.
  D << -0.25 * H(0, 1), -0.25 * H(1, 1),  // X v1, Y v1
      0.25 * H(0, 0), 0.25 * H(1, 0);     // X v2, Y v2
  return D;
}

std::complex<double> zz(const PotentialField& phi, const Point& p,
                        const QuadratureConfig& cfg) {
  const Eigen::Matrix2d H = hhess(phi, p, cfg);
  return 0.25 * std::complex<double>(H(0, 0) - H(1, 1), -(H(0, 1) + H(1, 0)));
}

Eigen::Matrix2d strain_matrix(const ContactField& v, const Point& p) {
  // Differences of the assembled components at half the configured step:
  // deliberately a different estimator than hhess so the strain/ZZ
  // identity is a real cross-check rather than an algebraic tautology.
  const double h = 0.5 * v.cfg.fd_step;
  auto comp = [&](Direction dir, double s) {
    return v.components(subgroup_step(p, dir, s));
  };
  const Point dx = (comp(Direction::X, h) - comp(Direction::X, -h)) / (2 * h);
  const Point dy = (comp(Direction::Y, h) - comp(Direction::Y, -h)) / (2 * h);
  const double A = dx.x() - dy.y();  // X v1 - Y v2
  const double B = dx.y() + dy.x();  // X v2 + Y v1
  Eigen::Matrix2d S;
  S << A, B, B, -A;
  return 0.5 * S;
}

StrainReport strain_report(const PotentialField& phi, const Box& region,
                           const Eigen::Vector3i& dims, const QuadratureConfig& cfg) {
  if (dims.minCoeff() < 2) throw ConfigError("strain_report: need >= 2 nodes per axis");
  StrainReport rep;
  rep.grid = dims;
  const ContactField field{phi, cfg};
  const Point h((region.hi.x() - region.lo.x()) / (dims.x() - 1),
                (region.hi.y() - region.lo.y()) / (dims.y() - 1),
                (region.hi.z() - region.lo.z()) / (dims.z() - 1));
  for (int it = 0; it < dims.z(); ++it)
    for (int iy = 0; iy < dims.y(); ++iy)
      for (int ix = 0; ix < dims.x(); ++ix) {
        const Point p(region.lo.x() + ix * h.x(), region.lo.y() + iy * h.y(),
                      region.lo.z() + it * h.z());
        const double m = std::sqrt(2.0) * std::abs(zz(phi, p, cfg));
        if (m > rep.c) {
          rep.c = m;
          rep.worst_point = p;
        }
        const double s2 = 2.0 * strain_matrix(field, p).norm();
        rep.max_identity_residual = std::max(rep.max_identity_residual, std::abs(m - s2));
      }
  return rep;
}

namespace {

double smoothstep5(double z) { return ((6 * z - 15) * z + 10) * z * z * z; }
double smoothstep5_deriv(double z) {
  const double w = z * (z - 1);
  return 30 * w * w;
}

double descent(double r, double l) {
  return 1.0 - (std::log(std::log(r)) - std::log(std::log(l))) / l;
}

}  // namespace

double truncation_profile(double r, double l) {
  if (l < M_E) throw ConfigError("truncation_profile: need l >= e");
  if (r <= l) return 1.0;
  const double z = descent(r, l);
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  return smoothstep5(z);
}

double truncation_profile_derivative(double r, double l) {
  if (l < M_E) throw ConfigError("truncation_profile: need l >= e");
  if (r <= l) return 0.0;
  const double z = descent(r, l);
  if (z <= 0.0 || z >= 1.0) return 0.0;
  return smoothstep5_deriv(z) * (-1.0 / (l * r * std::log(r)));
}

PotentialField truncate_potential(const PotentialField& phi, double l,
                                  const QuadratureConfig& cfg) {
  if (l < M_E) throw ConfigError("truncate_potential: need l >= e");
  PotentialField out;
  out.value = [phi, l](const Point& p) {
    const double g = truncation_profile(gauge4(p), l);
    return g == 0.0 ? 0.0 : g * phi.value(p);
  };
  out.grad = [phi, l, cfg](const Point& p) {
    const double n = gauge4(p);
    const double g = truncation_profile(n, l);
    if (g == 0.0) return Point::Zero().eval();
    const double dg = truncation_profile_derivative(n, l);
    const Point base = hgrad(phi, p, cfg) * g;
    if (dg == 0.0) return base;
    const Point dn = gauge4_gradient(p);
    const double v = phi.value(p);
    return (base + dg * v *
                       Point(dn.x() + 2 * p.y() * dn.z(), dn.y() - 2 * p.x() * dn.z(),
                             dn.z()))
        .eval();
  };
  return out;
}

}  // namespace heis
