// End-to-end acceptance gate: one PASS/FAIL line per criterion, exit 0
// only if every criterion holds.  Tolerances are pinned here, next to the
// checks they guard.

#include "heis/cli.hpp"
#include "heis/construct.hpp"
#include "heis/contact_field.hpp"
#include "heis/errors.hpp"
#include "heis/flow.hpp"
#include "heis/iterate.hpp"
#include "heis/measure.hpp"
#include "heis/metric.hpp"
#include "heis/potential_field.hpp"
#include "heis/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace heis;
namespace fs = std::filesystem;

namespace {

struct Gate {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
  void note(const std::string& text) {
    if (ok) detail = text;
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Point random_point(std::mt19937_64& rng, double span) {
  std::uniform_real_distribution<double> u(-span, span);
  return Point(u(rng), u(rng), u(rng));
}

std::shared_ptr<const ContactField> field_of(PotentialField phi,
                                             QuadratureConfig cfg = {}) {
  return std::make_shared<const ContactField>(ContactField{std::move(phi), cfg});
}

// Shared between the iteration criterion and the weak-Jacobian one.
std::optional<IterationReport> g_iteration;

// --------------------------------------------------------------- criteria

void criterion_group_operations(Gate& g) {
  constexpr int kCases = 100000;
  constexpr double kTol = 1e-10;
  constexpr double kBudgetSeconds = 10.0;

  const auto t0 = std::chrono::steady_clock::now();
  QuadratureConfig cfg;
  auto rng = make_rng(cfg, 0x61636331);
  double worst = 0.0;
  for (int i = 0; i < kCases; ++i) {
    const Point p = random_point(rng, 2.0);
    const Point q = random_point(rng, 2.0);
    const Point r = random_point(rng, 2.0);

    const Point lhs = mul(mul(p, q), r);
    const Point rhs = mul(p, mul(q, r));
    worst = std::max(worst, (lhs - rhs).norm() / (1.0 + rhs.norm()));
    worst = std::max(worst, mul(p, inv(p)).norm() / (1.0 + p.norm()));
    worst = std::max(worst, (mul(p, Point(Point::Zero())) - p).norm());

    const double d = dist(p, q);
    const double tri = d - (dist(p, r) + dist(r, q));
    worst = std::max(worst, tri / (d + 0.01));

    const double dt = dist(mul(r, p), mul(r, q));
    worst = std::max(worst, std::abs(dt - d) / (d + 0.01));

    const double s = 0.25 + 2.0 * (i % 7) / 7.0;
    const double dh = dist(dilate(s, p), dilate(s, q));
    worst = std::max(worst, std::abs(dh - s * d) / (s * d + 0.01));
  }
  const double elapsed = seconds_since(t0);
  g.require(worst <= kTol, "worst relative residual " + num(worst));
  g.require(elapsed < kBudgetSeconds, "took " + num(elapsed) + "s");
  g.note("worst " + num(worst) + ", " + num(elapsed) + "s");
}

void criterion_frame_commutator(Gate& g) {
  constexpr int kPoints = 1000;
  constexpr double kTol = 1e-6;

  QuadratureConfig cfg;
  const std::vector<ScalarField> polys = {
      [](const Point& p) { return p.z(); },
      [](const Point& p) { return p.x() * p.x() * p.y() + p.z() * p.x(); },
      [](const Point& p) {
        return p.x() * p.x() * p.x() - 2 * p.x() * p.y() * p.z() + p.y() * p.y();
      }};
  auto rng = make_rng(cfg, 0x61636332);
  double worst = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const Point p = random_point(rng, 1.5);
    const ScalarField& f = polys[i % polys.size()];
    const double xy = hderiv2(f, p, Direction::X, Direction::Y, cfg);
    const double yx = hderiv2(f, p, Direction::Y, Direction::X, cfg);
    const double tf = hderiv(f, p, Direction::T, cfg);
    worst = std::max(worst, std::abs(xy - yx + 4.0 * tf));
  }
  g.require(worst <= kTol, "worst commutator residual " + num(worst));
  g.note("worst " + num(worst));
}

void criterion_ball_volume_quadrature(Gate& g) {
  constexpr double kTolVolume = 0.005;
  constexpr double kTolQuad = 0.01;
  constexpr double kBudgetSeconds = 60.0;

  const auto t0 = std::chrono::steady_clock::now();

  // 1-D reduction of the unit-ball volume as the oracle.
  const double oracle =
      2.0 * M_PI *
      integrate_1d(
          [](double r) { return 2.0 * r * std::sqrt(std::max(0.0, 1.0 - std::pow(r, 4))); },
          0.0, 1.0, 1e-12);
  g.require(std::abs(oracle - M_PI * M_PI / 2.0) <= 1e-9,
            "oracle reduction off: " + num(oracle));

  QuadratureConfig big;
  big.mc_samples = 16000000;
  const double vol = ball_volume(Point::Zero(), 1.0, big);
  const double vol_dev = std::abs(vol / oracle - 1.0);
  g.require(vol_dev <= kTolVolume, "ball volume dev " + num(vol_dev));

  // Polar vs Cartesian on three integrands (radial, compact, anisotropic).
  QuadratureConfig polar_cfg;
  polar_cfg.mc_samples = 100000;
  QuadratureConfig cart_cfg;
  cart_cfg.mc_samples = 4000000;

  const ScalarField f1 = [](const Point& p) { return std::exp(-gauge4(p)); };
  const ScalarField f2 = xi0;
  const ScalarField f3 = [](const Point& p) {
    const double g2 = std::sqrt(gauge4(p));
    return std::exp(-gauge4(p)) * (1.0 + p.x() * p.x() / (1.0 + g2));
  };

  double worst = vol_dev;
  {
    const double a = polar_integrate(f1, polar_cfg);
    const double b = cartesian_integrate(f1, ball_box(Point::Zero(), 3.0), cart_cfg);
    worst = std::max(worst, std::abs(a / b - 1.0));
  }
  {
    const double a = polar_integrate(f2, polar_cfg, RadialRange{0.75});
    const double b = cartesian_integrate(f2, ball_box(Point::Zero(), 0.5), cart_cfg);
    worst = std::max(worst, std::abs(a / b - 1.0));
  }
  {
    const double a = polar_integrate(f3, polar_cfg);
    const double b = cartesian_integrate(f3, ball_box(Point::Zero(), 3.0), cart_cfg);
    worst = std::max(worst, std::abs(a / b - 1.0));
  }
  const double elapsed = seconds_since(t0);
  g.require(worst <= kTolQuad, "worst quadrature dev " + num(worst));
  g.require(elapsed < kBudgetSeconds, "took " + num(elapsed) + "s");
  g.note("worst " + num(worst) + ", " + num(elapsed) + "s");
}

void criterion_strain_identity(Gate& g) {
  constexpr double kTol = 1e-3;

  QuadratureConfig cfg;
  const Box region{Point(-1.5, -1.5, -1.5), Point(1.5, 1.5, 1.5)};
  const Eigen::Vector3i dims(20, 20, 20);
  const std::vector<PotentialField> pots = {affine_contact_potential(0.3, -0.2, 0.5),
                                            gauge_bump_potential(2.0),
                                            radial_stretch_potential()};
  double worst = 0.0;
  for (const PotentialField& phi : pots) {
    const StrainReport rep = strain_report(phi, region, dims, cfg);
    worst = std::max(worst, rep.max_identity_residual);
  }
  g.require(worst <= kTol, "worst identity residual " + num(worst));
  g.note("worst " + num(worst));
}

void criterion_flow_exactness(Gate& g) {
  constexpr double kTolConst = 1e-10;
  constexpr double kTolAffine = 1e-6;
  constexpr double kRoundtripFactor = 10.0;

  QuadratureConfig cfg;
  auto rng = make_rng(cfg, 0x61636335);
  double worst_const = 0.0, worst_affine = 0.0, worst_round = 0.0;

  const auto vconst = field_of(constant_potential(1.0));
  for (int i = 0; i < 10; ++i) {
    const Point p = random_point(rng, 2.0);
    const Point end = integrate(*vconst, p, 0.8).end();
    worst_const = std::max(worst_const, (end - Point(p.x(), p.y(), p.z() + 0.8)).norm());
  }
  g.require(worst_const <= kTolConst, "constant-potential drift " + num(worst_const));

  const double c1 = 0.8, c2 = -0.5, c3 = 0.3;
  const auto vaff = field_of(affine_contact_potential(c1, c2, c3));
  for (int i = 0; i < 20; ++i) {
    const Point p = random_point(rng, 2.0);
    const double s = (i % 2 ? 1.0 : -0.6);
    const Point end = integrate(*vaff, p, s).end();
    const Point expect = mul(Point(s * c2, s * c3, s * c1), p);
    worst_affine = std::max(worst_affine, (end - expect).norm() / (1.0 + expect.norm()));
  }
  g.require(worst_affine <= kTolAffine, "translation-flow dev " + num(worst_affine));

  const auto vbump = field_of(gauge_bump_potential(2.0));
  bool round_ok = true;
  for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
    FlowOptions opt;
    opt.step = h;
    for (int i = 0; i < 5; ++i) {
      const Point p = random_point(rng, 1.0);
      const Point fwd = integrate(*vbump, p, 1.0, opt).end();
      const Point back = integrate(*vbump, fwd, -1.0, opt).end();
      const double err = (back - p).norm();
      worst_round = std::max(worst_round, err / (h * h));
      round_ok = round_ok && err <= kRoundtripFactor * h * h;
    }
  }
  g.require(round_ok, "roundtrip error " + num(worst_round) + " x step^2");
  g.note("const " + num(worst_const) + ", affine " + num(worst_affine) + ", roundtrip " +
         num(worst_round) + " x step^2");
}

void criterion_jacobian_routes(Gate& g) {
  constexpr double kTol = 0.03;
  constexpr double kBudgetSeconds = 300.0;
  constexpr double kTime = 0.5;
  constexpr int kVolumeSamples = 600000;

  const auto t0 = std::chrono::steady_clock::now();
  QuadratureConfig cfg;
  QuadratureConfig vol_cfg;
  vol_cfg.mc_samples = kVolumeSamples;
  FlowOptions opt;
  opt.step = kTime / 8;

  const std::vector<Point> points = halton_ball_grid(1.0, 20, {}, 0.0);
  double worst = 0.0;
  for (const PotentialField& phi :
       {gauge_bump_potential(2.0), coordinate_potential(Direction::T)}) {
    const ComposedMap F = ComposedMap::flow(field_of(phi, cfg), kTime, opt);
    for (const Point& p : points) {
      const double divergence_route = std::exp(F.log_jacobian(p));
      const Eigen::Matrix2d dh = F.horizontal_differential(p);
      const double det_route = dh.determinant() * dh.determinant();
      const double volume_route =
          jacobian_volume(F, p, {0.125, 0.0625}, vol_cfg).value;
      worst = std::max(worst, std::abs(det_route / divergence_route - 1.0));
      worst = std::max(worst, std::abs(volume_route / divergence_route - 1.0));
      worst = std::max(worst, std::abs(volume_route / det_route - 1.0));
    }
  }
  const double elapsed = seconds_since(t0);
  g.require(worst <= kTol, "worst pairwise dev " + num(worst));
  g.require(elapsed < kBudgetSeconds, "took " + num(elapsed) + "s");
  g.note("worst " + num(worst) + ", " + num(elapsed) + "s");
}

void criterion_dilatation_growth(Gate& g) {
  constexpr double kSlack = 1.05;

  QuadratureConfig cfg;
  cfg.mc_samples = 512;
  const PotentialField phi = gauge_bump_potential(2.0);
  const Box region{Point(-2.5, -2.5, -2.5), Point(2.5, 2.5, 2.5)};
  const StrainReport strain = strain_report(phi, region, Eigen::Vector3i(15, 15, 15), cfg);
  g.require(strain.c > 0.0, "strain sup not positive");

  const std::vector<Point> points = halton_ball_grid(1.2, 20, {}, 0.0);
  double worst_margin = 0.0;
  for (double s : {0.25, 0.5, 1.0}) {
    FlowOptions opt;
    opt.step = s / 32;
    const ComposedMap F = ComposedMap::flow(field_of(phi, cfg), s, opt);
    const double bound = std::exp(strain.c * s) * kSlack;
    for (const Point& p : points) {
      const double H = dilatation(F, p, {0.05, 0.025}, 24, cfg).H;
      worst_margin = std::max(worst_margin, H / bound);
      if (H > bound) {
        g.require(false, "H " + num(H) + " exceeds e^(c s) bound " + num(bound) +
                             " at s " + num(s));
        return;
      }
    }
  }
  g.note("strain sup " + num(strain.c) + ", worst H/bound " + num(worst_margin));
}

void criterion_lambda_comparability(Gate& g) {
  constexpr int kPairs = 1000;
  constexpr double kTol = 0.02;
  constexpr double kSpreadMax = 10.0;

  QuadratureConfig cfg;
  cfg.mc_samples = 4096;
  const ConstructSamples S = make_construct_samples(cfg);
  const JacobianField J0 = identity_jacobian();
  const double target = std::pow(xi0_integral(), 0.25);

  auto rng = make_rng(cfg, 0x61636338);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < kPairs; ++i) {
    const Point p = random_point(rng, 2.0);
    const Point q = random_point(rng, 2.0);
    const double d = dist(p, q);
    if (d < 0.05) continue;
    const double ratio = lambda_eval(J0, p, q, S, false).value / d;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  g.require(hi > 0.0 && (hi - lo) / hi <= kTol,
            "identity ratio spread " + num((hi - lo) / hi));
  g.require(std::abs(hi / target - 1.0) <= kTol,
            "identity ratio " + num(hi) + " vs integral " + num(target));

  // Flow of the truncated radial stretch as the precomposition word.
  FlowOptions opt;
  opt.step = 0.4 / 16;
  const ComposedMap F = ComposedMap::flow(
      field_of(truncate_potential(radial_stretch_potential(), 8.0, cfg), cfg), 0.4, opt);
  const MapBundle bundle = map_bundle(F, cfg);

  QuadratureConfig small = cfg;
  small.mc_samples = 256;
  const ConstructSamples S2 = make_construct_samples(small);
  double wlo = 1e300, whi = -1e300;
  int used = 0;
  for (int i = 0; i < 100; ++i) {
    const Point p = random_point(rng, 1.5);
    const Point a = random_point(rng, 1.5);
    if (dist(p, a) < 0.1) continue;
    const double lam = lambda_eval(bundle.jacobian, p, a, S2, false).value;
    const double dg = dist(F(p), F(a));
    if (!(dg > 0.0)) continue;
    const double ratio = lam / dg;
    if (!std::isfinite(ratio) || ratio <= 0.0) {
      g.require(false, "stretched ratio degenerate: " + num(ratio));
      return;
    }
    wlo = std::min(wlo, ratio);
    whi = std::max(whi, ratio);
    ++used;
  }
  g.require(used > 50, "too few admissible pairs");
  g.require(whi / wlo <= kSpreadMax, "stretched ratio spread " + num(whi / wlo));
  g.note("identity dev " + num(std::abs(hi / target - 1.0)) + ", stretched spread " +
         num(whi / wlo));
}

void criterion_potential_construction(Gate& g) {
  constexpr double kTolOrigin = 1e-6;
  constexpr double kSupBound = 100.0;

  QuadratureConfig cfg;
  cfg.mc_samples = 256;
  cfg.grid_resolution = 6;

  Measure atom;
  atom.atoms.push_back({Point(0.5, 0.0, 0.0), 0.1});
  const Measure psi = regularize(atom, 2.0, cfg);
  const ConstructedPotential built = build_contact_potential(identity_bundle(), psi, cfg);

  const ContactField v{built.field, cfg};
  const double origin_norm = v.components(Point::Zero()).norm();
  g.require(origin_norm <= kTolOrigin, "field at origin " + num(origin_norm));

  const LogPotential pot{psi, nullptr};
  double sup = 0.0;
  for (const Point& p : halton_ball_grid(2.0, 200, {}, 0.0)) {
    const double div = hgrad(built.field, p, cfg).z();
    const PotentialValue lam = eval_potential(pot, p);
    if (!lam.finite() || !std::isfinite(div)) {
      g.require(false, "divergence or potential not finite at a grid point");
      return;
    }
    sup = std::max(sup, std::abs(div - lam.value));
  }
  g.require(std::isfinite(sup) && sup < kSupBound,
            "divergence-potential sup " + num(sup));
  g.note("origin " + num(origin_norm) + ", div sup " + num(sup));
}

void criterion_iteration_comparability(Gate& g) {
  constexpr double kSpreadGrowth = 1.10;
  constexpr double kTolMarker = 1e-6;
  constexpr double kBudgetSeconds = 1800.0;

  const auto t0 = std::chrono::steady_clock::now();
  IterationConfig icfg;
  Measure atom;
  atom.atoms.push_back({Point(0.5, 0.0, 0.0), 0.05});
  icfg.psi = regularize(atom, 2.0, icfg.quad);
  icfg.exclusions = {Point(0.5, 0.0, 0.0)};

  const IterationReport report = iterate(icfg);
  g_iteration = report;

  double spread2 = 0.0, spread8 = 0.0;
  for (const IterationRun& run : report.runs) {
    g.require(std::isfinite(run.spread) && run.spread >= 1.0,
              "spread degenerate at m=" + std::to_string(run.m));
    g.require(run.normalization_error <= kTolMarker,
              "normalization error " + num(run.normalization_error));
    // Marker stays on the unit sphere after every level, not just the last.
    g.require(run.map.word.size() == 2 * static_cast<std::size_t>(run.m),
              "unexpected word length");
    for (int j = 1; j <= run.m; ++j) {
      ComposedMap prefix;
      prefix.word.assign(run.map.word.begin(), run.map.word.begin() + 2 * j);
      const double err = std::abs(gauge(prefix(icfg.p0)) - 1.0);
      g.require(err <= kTolMarker,
                "marker off sphere at m=" + std::to_string(run.m) +
                    " level " + std::to_string(j) + ": " + num(err));
    }
    if (run.m == 2) spread2 = run.spread;
    if (run.m == 8) spread8 = run.spread;
  }
  g.require(spread2 > 0.0 && spread8 > 0.0, "missing m=2 or m=8 run");
  g.require(spread8 <= kSpreadGrowth * spread2,
            "spread grew: m=2 " + num(spread2) + " -> m=8 " + num(spread8));
  const double elapsed = seconds_since(t0);
  g.require(elapsed < kBudgetSeconds, "took " + num(elapsed) + "s");
  g.note("spread " + num(spread2) + " -> " + num(spread8) + ", " + num(elapsed) + "s");
}

void criterion_weak_jacobian(Gate& g) {
  g.require(g_iteration.has_value(), "iteration report unavailable");
  if (!g.ok) return;

  QuadratureConfig cfg;
  cfg.mc_samples = 2048;
  const Box box = ball_box(Point::Zero(), 0.5);
  double i2 = 0.0, i4 = 0.0, i8 = 0.0;
  for (const IterationRun& run : g_iteration->runs) {
    const double val = weak_jacobian_integral(run.map, xi0, box, cfg);
    if (run.m == 2) i2 = val;
    if (run.m == 4) i4 = val;
    if (run.m == 8) i8 = val;
  }
  const double d2 = std::abs(i2 - i8);
  const double d4 = std::abs(i4 - i8);
  g.require(d2 + 1e-15 >= d4,
            "not decreasing: |I2-I8| " + num(d2) + " < |I4-I8| " + num(d4));
  g.note("|I2-I8| " + num(d2) + ", |I4-I8| " + num(d4));
}

void criterion_metric_suite(Gate& g) {
  constexpr double kTolGeo = 0.02;
  constexpr double kTolExactDouble = 1e-12;
  constexpr double kSpreadFinite = 1e6;
  constexpr double kDoublingMax = 256.0;
  constexpr double kTolSlope = 0.025;

  QuadratureConfig cfg;
  GeodesicOptions opt;
  opt.waypoints = 4;
  opt.refinements = 1;
  opt.iterations = 30;
  opt.restarts = 1;
  const WeightField one = [](const Point&) { return 1.0; };
  const WeightField sixteen = [](const Point&) { return 16.0; };

  auto rng = make_rng(cfg, 0x6163633C);
  double worst_geo = 0.0, worst_double = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Point p = random_point(rng, 1.2);
    const Point q = random_point(rng, 1.2);
    if (dist(p, q) < 0.1) continue;
    const double base = weighted_distance(p, q, one, opt, cfg).length;
    const double plain = weighted_distance(p, q, nullptr, opt, cfg).length;
    const double twice = weighted_distance(p, q, sixteen, opt, cfg).length;
    worst_geo = std::max(worst_geo, std::abs(base / plain - 1.0));
    worst_double = std::max(worst_double, std::abs(twice / (2.0 * base) - 1.0));
  }
  g.require(worst_geo <= kTolGeo, "unit-weight geodesic dev " + num(worst_geo));
  g.require(worst_double <= kTolExactDouble,
            "constant-16 doubling dev " + num(worst_double));

  // Radial-stretch flow Jacobian as the deformation weight.
  FlowOptions fopt;
  fopt.step = 0.4 / 16;
  const ComposedMap F = ComposedMap::flow(
      field_of(truncate_potential(radial_stretch_potential(), 8.0, cfg), cfg), 0.4,
      fopt);
  const Box table_box{Point(-4, -4, -16), Point(4, 4, 16)};
  const auto logj = tabulate_log_jacobian(F, table_box, Eigen::Vector3i(16, 16, 32));
  const WeightField omega = [logj](const Point& p) { return std::exp(logj->value(p)); };

  SuiteConfig scfg;
  scfg.pairs = 200;
  scfg.quad.mc_samples = 20000;
  const MetricSuite suite = comparability_suite(F, omega, scfg);
  g.require(suite.pairs.size() == 200, "suite pair count");
  double rlo = 1e300, rhi = 0.0;
  for (const MetricPair& mp : suite.pairs) {
    if (!(mp.rho_f > 0.0) || !(mp.d_w > 0.0) || !std::isfinite(mp.rho_w)) {
      g.require(false, "degenerate pair distances");
      return;
    }
    const double ratio = mp.d_w / mp.rho_f;
    rlo = std::min(rlo, ratio);
    rhi = std::max(rhi, ratio);
  }
  const double spread = rhi / rlo;
  g.require(std::isfinite(spread) && spread < kSpreadFinite,
            "deformation/pushforward spread " + num(spread));

  QuadratureConfig dq;
  dq.mc_samples = 40000;
  const DoublingReport doubling = doubling_ladder(omega, Point::Zero(), 0.25, 4, dq);
  for (double qv : doubling.quotients)
    g.require(std::isfinite(qv) && qv > 0.0 && qv <= kDoublingMax,
              "doubling quotient " + num(qv));

  QuadratureConfig vq;
  vq.mc_samples = 20000;
  const LengthScalingReport anchor =
      vertical_length_scaling(one, Point::Zero(), 1.0, {2, 4, 8, 16}, vq);
  g.require(std::abs(anchor.slope - 0.5) <= 1e-9,
            "unit-weight vertical slope " + num(anchor.slope));
  const LengthScalingReport scaling =
      vertical_length_scaling(omega, Point(0, 0, 0.5), 1.0, {2, 4, 8, 16}, vq);
  g.require(std::abs(scaling.slope - 0.5) <= kTolSlope,
            "weighted vertical slope " + num(scaling.slope));

  g.note("geo dev " + num(worst_geo) + ", spread " + num(spread) + ", slope " +
         num(scaling.slope));
}

void criterion_artifact_determinism(Gate& g) {
  auto slurp = [](const fs::path& p) -> std::string {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto fresh = [](const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("heis_acceptance_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
  };

  Json metric_cfg;
  metric_cfg["pairs"] = 3;
  metric_cfg["mc_samples"] = 400;
  metric_cfg["doubling_rungs"] = 1;
  metric_cfg["subdivisions"] = Json::array({2, 4});
  const fs::path m1 = fresh("m1"), m2 = fresh("m2");
  g.require(run_command("metric", metric_cfg, m1.string()) == 0, "metric run failed");
  g.require(run_command("metric", metric_cfg, m2.string()) == 0, "metric rerun failed");
  g.require(slurp(m1 / "metric_report.json") == slurp(m2 / "metric_report.json"),
            "metric JSON bytes differ");
  g.require(slurp(m1 / "metric_pairs.csv") == slurp(m2 / "metric_pairs.csv"),
            "metric CSV bytes differ");
  g.require(!slurp(m1 / "metric_pairs.csv").empty(), "metric CSV empty");

  Json construct_cfg;
  construct_cfg["measure"] =
      parse_json(R"({"atoms":[{"location":[0.5,0,0],"mass":0.1}]})");
  construct_cfg["mollify_k"] = 2.0;
  construct_cfg["mc_samples"] = 128;
  construct_cfg["grid_resolution"] = 4;
  construct_cfg["scan_points"] = 8;
  const fs::path c1 = fresh("c1"), c2 = fresh("c2");
  g.require(run_command("construct", construct_cfg, c1.string()) == 0,
            "construct run failed");
  g.require(run_command("construct", construct_cfg, c2.string()) == 0,
            "construct rerun failed");
  g.require(slurp(c1 / "construct_report.json") == slurp(c2 / "construct_report.json"),
            "construct JSON bytes differ");
  g.require(slurp(c1 / "construct_scan.csv") == slurp(c2 / "construct_scan.csv"),
            "construct CSV bytes differ");
  g.note("metric + construct artifacts byte-identical");
}

}  // namespace

int main() {
  struct Entry {
    const char* id;
    const char* name;
    std::function<void(Gate&)> run;
  };
  const std::vector<Entry> entries = {
      {"01", "group-operations", criterion_group_operations},
      {"02", "frame-commutator", criterion_frame_commutator},
      {"03", "gauge-ball-volume-quadrature", criterion_ball_volume_quadrature},
      {"04", "strain-identity", criterion_strain_identity},
      {"05", "flow-exactness", criterion_flow_exactness},
      {"06", "jacobian-routes", criterion_jacobian_routes},
      {"07", "dilatation-growth-bound", criterion_dilatation_growth},
      {"08", "lambda-distance-comparability", criterion_lambda_comparability},
      {"09", "potential-construction", criterion_potential_construction},
      {"10", "iteration-comparability", criterion_iteration_comparability},
      {"11", "weak-jacobian-convergence", criterion_weak_jacobian},
      {"12", "metric-deformation-suite", criterion_metric_suite},
      {"13", "artifact-determinism", criterion_artifact_determinism},
  };

  int failed = 0;
  for (const Entry& e : entries) {
    Gate gate;
    try {
      e.run(gate);
    } catch (const std::exception& ex) {
      gate.ok = false;
      gate.detail = std::string("exception: ") + ex.what();
    }
    if (!gate.ok) ++failed;
    std::printf("%s %s %s%s%s\n", gate.ok ? "PASS" : "FAIL", e.id, e.name,
                gate.detail.empty() ? "" : "  -- ", gate.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failed,
              entries.size());
  return failed == 0 ? 0 : 1;
}
