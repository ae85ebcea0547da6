#include "heis/construct.hpp"

#include "heis/errors.hpp"

#include <cmath>
#include <utility>

namespace heis {

namespace {

double smoothstep5(double z) { return z * z * z * (10.0 + z * (-15.0 + 6.0 * z)); }

}  // namespace

double xi0_profile(double r) {
  if (r <= 0.25) return 1.0;
  if (r >= 0.5) return 0.0;
  return smoothstep5((0.5 - r) * 4.0);
}

double xi0(const Point& p) { return xi0_profile(gauge(p)); }

double xi0_integral() {
  // Radial reduction against the polar area element 2 pi^2 r^3 dr.
  static const double cached = [] {
    auto f = [](double r) { return xi0_profile(r) * r * r * r; };
    return 4.0 * unit_ball_volume() * integrate_1d(f, 0.0, 0.5, 1e-13);
  }();
  return cached;
}

JacobianField identity_jacobian() {
  return {[](const Point&) { return 0.0; },
          [](const Point&) { return Point(Point::Zero()); }};
}

JacobianField map_jacobian(const ComposedMap& g, const QuadratureConfig& cfg) {
  auto shared = std::make_shared<const ComposedMap>(g);
  JacobianField out;
  out.log_jacobian = [shared](const Point& p) { return shared->log_jacobian(p); };
  double h = cfg.fd_step;
  out.grad_log_jacobian = [shared, h](const Point& p) {
    Point grad;
    for (int k = 0; k < 3; ++k) {
      Point dp = Point::Zero();
      dp[k] = h;
      grad[k] =
          (shared->log_jacobian(p + dp) - shared->log_jacobian(p - dp)) / (2.0 * h);
    }
    return grad;
  };
  return out;
}

JacobianField table_jacobian(std::shared_ptr<const ScalarGrid3> table) {
  JacobianField out;
  out.log_jacobian = [table](const Point& p) { return table->value(p); };
  out.grad_log_jacobian = [table](const Point& p) {
    Point grad;
    table->value_gradient(p, &grad);
    return grad;
  };
  return out;
}

ConstructSamples make_construct_samples(const QuadratureConfig& cfg) {
  int n = std::max(8, cfg.mc_samples);
  int strata = std::min(n, 64);
  auto rng = make_rng(cfg, 0x78693073ULL);
  ConstructSamples s;
  s.w.reserve(n);
  s.xi.reserve(n);
  for (int i = 0; i < n; ++i) {
    int stratum = static_cast<int>((static_cast<long long>(i) * strata) / n);
    Point w = stratified_ball_point(rng, stratum, strata);
    s.w.push_back(w);
    s.xi.push_back(xi0_profile(0.5 * gauge(w)));
  }
  return s;
}

LambdaValue lambda_eval(const JacobianField& J, const Point& p, const Point& a,
                        const ConstructSamples& S, bool with_gradient) {
  LambdaValue out;
  Point rel = mul(inv(a), p);
  double n4 = gauge4(rel);
  if (n4 < 1e-200 || S.w.empty()) return out;

  double d = std::pow(n4, 0.25);
  double c = 0.5 * d;

  // Frame derivatives of c(p) = d(p, a) / 2 through the gauge of a^{-1} p.
  Point dn = gauge4_gradient(rel);
  double inv4d3 = 1.0 / (4.0 * d * d * d);
  Point dc(0.5 * (dn.x() + 2.0 * rel.y() * dn.z()) * inv4d3,
           0.5 * (dn.y() - 2.0 * rel.x() * dn.z()) * inv4d3,
           0.5 * dn.z() * inv4d3);

  double acc = 0.0;
  Point bcc = Point::Zero();
  for (std::size_t i = 0; i < S.w.size(); ++i) {
    double xi = S.xi[i];
    if (xi == 0.0) continue;
    const Point& s = S.w[i];
    Point u = mul(p, dilate(c, s));
    double j = J.log_jacobian ? std::exp(J.log_jacobian(u)) : 1.0;
    acc += xi * j;
    if (!with_gradient) continue;
    Point gl =
        J.grad_log_jacobian ? J.grad_log_jacobian(u) : Point(Point::Zero());
    if (gl.isZero()) continue;
    // Cartesian gradient of log J at u, chained through u = p * delta_c s
    // with c depending on p; q3 collects the t-sensitivity to c.
    double q3 = 2.0 * c * s.z() + 2.0 * (s.x() * p.y() - s.y() * p.x());
    Point xu(1.0 + dc.x() * s.x(), dc.x() * s.y(),
             dc.x() * q3 + 2.0 * p.y() - 2.0 * c * s.y());
    Point yu(dc.y() * s.x(), 1.0 + dc.y() * s.y(),
             dc.y() * q3 - 2.0 * p.x() + 2.0 * c * s.x());
    Point tu(dc.z() * s.x(), dc.z() * s.y(), 1.0 + dc.z() * q3);
    double w = xi * j;
    bcc += w * Point(gl.dot(xu), gl.dot(yu), gl.dot(tu));
  }
  double n = static_cast<double>(S.w.size());
  acc /= n;
  bcc /= n;

  double c4 = c * c * c * c;
  double lam4 = c4 * unit_ball_volume() * acc;
  if (!(lam4 > 0.0)) throw EvaluationError("lambda quadrature collapsed");
  out.value = std::pow(lam4, 0.25);
  if (with_gradient) {
    Point glam4 = unit_ball_volume() * (4.0 * c * c * c * acc * dc + c4 * bcc);
    out.grad = glam4 / (4.0 * out.value * out.value * out.value);
  }
  return out;
}

LambdaValue eta_eval(const JacobianField& J, const Point& p, const Point& a,
                     const ConstructSamples& S, bool with_gradient) {
  LambdaValue lam = lambda_eval(J, p, a, S, with_gradient);
  if (!(lam.value > 0.0)) throw EvaluationError("eta at coincident points");
  LambdaValue out;
  out.value = -std::log(lam.value);
  if (with_gradient) out.grad = -lam.grad / lam.value;
  return out;
}

LambdaValue tilde_phi_eval(const JacobianField& J, const Point& p, const Point& a,
                           const ConstructSamples& S, bool with_gradient) {
  LambdaValue out;
  Point rel = mul(inv(a), p);
  // eta ~ -log d while u3 ~ d^2, so the product and its frame gradient
  // both vanish at p = a; cut before the log blows up.
  if (gauge4(rel) < 1e-48) return out;
  LambdaValue eta = eta_eval(J, p, a, S, with_gradient);
  double u3 = rel.z();
  out.value = eta.value * u3;
  if (with_gradient) {
    out.grad = Point(eta.grad.x() * u3 + 2.0 * eta.value * rel.y(),
                     eta.grad.y() * u3 - 2.0 * eta.value * rel.x(),
                     eta.grad.z() * u3 + eta.value);
  }
  return out;
}

MapBundle identity_bundle() {
  MapBundle b;
  b.forward = [](const Point& p) { return p; };
  b.backward = [](const Point& p) { return p; };
  b.jacobian = identity_jacobian();
  return b;
}

MapBundle map_bundle(const ComposedMap& g, const QuadratureConfig& cfg) {
  auto fwd = std::make_shared<const ComposedMap>(g);
  auto bwd = std::make_shared<const ComposedMap>(g.inverse());
  MapBundle b;
  b.forward = [fwd](const Point& p) { return (*fwd)(p); };
  b.backward = [bwd](const Point& p) { return (*bwd)(p); };
  b.jacobian = map_jacobian(g, cfg);
  return b;
}

namespace {

struct Phi1State {
  std::vector<Point> centers;   // g^{-1}(q_c)
  std::vector<double> weights;  // psi mass carried by the cell
  ConstructSamples samples;
  JacobianField jac;
};

std::shared_ptr<const Phi1State> phi1_state(const MapBundle& g, const Measure& psi,
                                            const QuadratureConfig& cfg) {
  auto st = std::make_shared<Phi1State>();
  for (const Atom& a : psi.atoms) {
    if (a.mass == 0.0) continue;
    st->centers.push_back(g.backward(a.location));
    st->weights.push_back(a.mass);
  }
  if (psi.density) {
    const DensityGrid& grid = *psi.density;
    double cv = grid.cell_volume();
    for (int it = 0; it < grid.dims.z(); ++it)
      for (int iy = 0; iy < grid.dims.y(); ++iy)
        for (int ix = 0; ix < grid.dims.x(); ++ix) {
          double v = grid.values[grid.index(ix, iy, it)];
          if (v == 0.0) continue;
          st->centers.push_back(g.backward(grid.center(ix, iy, it)));
          st->weights.push_back(v * cv);
        }
  }
  st->samples = make_construct_samples(cfg);
  st->jac = g.jacobian;
  return st;
}

}  // namespace

ConstructedPotential build_contact_potential(const MapBundle& g, const Measure& psi,
                                             const QuadratureConfig& cfg) {
  ConstructedPotential out;
  auto st = phi1_state(g, psi, cfg);
  if (st->centers.empty()) {
    out.field = constant_potential(0.0);
    out.phi1 = constant_potential(0.0);
    return out;
  }

  PotentialField phi1;
  phi1.value = [st](const Point& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < st->centers.size(); ++i)
      acc += st->weights[i] *
             tilde_phi_eval(st->jac, p, st->centers[i], st->samples, false).value;
    return acc;
  };
  phi1.grad = [st](const Point& p) {
    Point acc = Point::Zero();
    for (std::size_t i = 0; i < st->centers.size(); ++i)
      acc += st->weights[i] *
             tilde_phi_eval(st->jac, p, st->centers[i], st->samples, true).grad;
    return acc;
  };

  // Recenter: subtract the affine contact potential whose field matches
  // v_{phi1} at the origin, measured by frame finite differences.
  Point origin = Point::Zero();
  double xd = hderiv(phi1.value, origin, Direction::X, cfg);
  double yd = hderiv(phi1.value, origin, Direction::Y, cfg);
  out.c1 = -0.25 * yd;
  out.c2 = 0.25 * xd;
  out.c3 = phi1.value(origin);
  PotentialField phi2 = affine_contact_potential(out.c3, out.c1, out.c2);

  PotentialField field;
  field.value = [phi1, phi2](const Point& p) {
    return phi1.value(p) - phi2.value(p);
  };
  field.grad = [phi1, phi2](const Point& p) {
    return Point(phi1.grad(p) - phi2.grad(p));
  };
  out.field = std::move(field);
  out.phi1 = std::move(phi1);
  return out;
}

PotentialField TabulatedPotential::field() const {
  PotentialField f;
  auto v = phi;
  f.value = [v](const Point& p) { return v->value(p); };
  auto gx = xphi, gy = yphi, gt = tphi;
  f.grad = [gx, gy, gt](const Point& p) {
    return Point(gx->value(p), gy->value(p), gt->value(p));
  };
  return f;
}

TabulatedPotential tabulate_potential(const PotentialField& src, const Box& box,
                                      const Eigen::Vector3i& dims,
                                      const QuadratureConfig& cfg) {
  std::size_t total = static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
  std::vector<double> v(total), gx(total), gy(total), gt(total);
  Point span = box.hi - box.lo;
  std::size_t idx = 0;
  for (int it = 0; it < dims.z(); ++it)
    for (int iy = 0; iy < dims.y(); ++iy)
      for (int ix = 0; ix < dims.x(); ++ix, ++idx) {
        Point p(box.lo.x() + span.x() * ix / (dims.x() - 1),
                box.lo.y() + span.y() * iy / (dims.y() - 1),
                box.lo.z() + span.z() * it / (dims.z() - 1));
        v[idx] = src.value(p);
        Point g = src.grad ? src.grad(p)
                           : Point(hderiv(src.value, p, Direction::X, cfg),
                                   hderiv(src.value, p, Direction::Y, cfg),
                                   hderiv(src.value, p, Direction::T, cfg));
        gx[idx] = g.x();
        gy[idx] = g.y();
        gt[idx] = g.z();
      }
  TabulatedPotential out;
  out.phi = std::make_shared<const ScalarGrid3>(box, dims, std::move(v));
  out.xphi = std::make_shared<const ScalarGrid3>(box, dims, std::move(gx));
  out.yphi = std::make_shared<const ScalarGrid3>(box, dims, std::move(gy));
  out.tphi = std::make_shared<const ScalarGrid3>(box, dims, std::move(gt));
  return out;
}

std::shared_ptr<const ScalarGrid3> tabulate_log_jacobian(const ComposedMap& g,
                                                         const Box& box,
                                                         const Eigen::Vector3i& dims) {
  ScalarGrid3 grid = ScalarGrid3::tabulate(
      box, dims, [&g](const Point& p) { return g.log_jacobian(p); });
  return std::make_shared<const ScalarGrid3>(std::move(grid));
}

}  // namespace heis
