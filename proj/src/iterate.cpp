#include "heis/iterate.hpp"

#include "heis/errors.hpp"

#include <chrono>
#include <cmath>

namespace heis {

namespace {

double radical_inverse(int base, long long i) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

std::vector<Point> halton_ball_grid(double radius, int count,
                                    const std::vector<Point>& holes,
                                    double hole_radius) {
  std::vector<Point> grid;
  grid.reserve(count);
  long long i = 1;
  const long long cap = 50'000'000;
  while (static_cast<int>(grid.size()) < count) {
    if (i > cap) throw EvaluationError("halton grid rejection stalled");
    Point p((2.0 * radical_inverse(2, i) - 1.0) * radius,
            (2.0 * radical_inverse(3, i) - 1.0) * radius,
            (2.0 * radical_inverse(5, i) - 1.0) * radius * radius);
    ++i;
    if (gauge4(p) >= std::pow(radius, 4.0)) continue;
    bool excluded = false;
    for (const Point& h : holes)
      if (dist(p, h) <= hole_radius) {
        excluded = true;
        break;
      }
    if (!excluded) grid.push_back(p);
  }
  return grid;
}

ComparabilityResult comparability(const ComposedMap& F, double c_shift,
                                  const LogPotential& pot,
                                  const std::vector<Point>& grid) {
  if (grid.empty()) throw EvaluationError("comparability grid is empty");
  ComparabilityResult out;
  out.ratios.reserve(grid.size());
  for (const Point& p : grid) {
    PotentialValue lam = eval_potential(pot, p);
    if (!lam.finite())
      throw EvaluationError("comparability grid touches a potential pole");
    double lj = F.log_jacobian(p);
    out.ratios.push_back(std::exp(lj - c_shift - 2.0 * lam.value));
  }
  double lo = out.ratios.front(), hi = lo;
  for (double r : out.ratios) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (!(lo > 0.0)) throw EvaluationError("comparability ratio vanished");
  out.spread = hi / lo;
  return out;
}

double weak_jacobian_integral(const ComposedMap& F, const ScalarField& test,
                              const Box& box, const QuadratureConfig& cfg) {
  auto rng = make_rng(cfg, 0x7765616bULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = std::max(16, cfg.mc_samples);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    Point p(box.lo.x() + (box.hi.x() - box.lo.x()) * u(rng),
            box.lo.y() + (box.hi.y() - box.lo.y()) * u(rng),
            box.lo.z() + (box.hi.z() - box.lo.z()) * u(rng));
    double t = test(p);
    if (t == 0.0) continue;
    acc += t * std::exp(F.log_jacobian(p));
  }
  return acc / n * box.volume();
}

double budget_epsilon(double K, double A1, double A2) {
  if (!(K > 0.0) || !(A1 > 0.0) || !(A2 > 0.0))
    throw ConfigError("budget requires positive K, A1, A2");
  double x = A2 * std::pow(K, 2.0 / 3.0);
  return 1.5 / A1 * (-std::expint(-x));
}

double dilatation_budget(double K, double eps_prime, double A1, double A2) {
  double eps = budget_epsilon(K, A1, A2);
  if (!(eps_prime < eps))
    throw DivergenceError("flow budget escapes before time 1");
  double k23 = A2 * std::pow(K, 2.0 / 3.0);
  auto f = [&](double r) {
    return eps_prime * A1 * std::exp(k23 * std::exp(2.0 * r / 3.0));
  };
  const int n = 4096;
  double h = 1.0 / n, phi = 0.0;
  for (int i = 0; i < n; ++i) {
    double k1 = f(phi);
    double k2 = f(phi + 0.5 * h * k1);
    double k3 = f(phi + 0.5 * h * k2);
    double k4 = f(phi + h * k3);
    phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(phi < 700.0)) throw DivergenceError("flow budget overflow");
  }
  return std::exp(phi);
}

NormalizedMap normalize_to_unit(const ComposedMap& g, const Point& direction) {
  double dg = gauge(direction);
  if (!(dg > 0.0)) throw ConfigError("normalization direction is zero");
  Point u = dilate(1.0 / dg, direction);
  Point a = g.inverse()(Point::Zero());
  auto miss = [&](double c) { return gauge(g(mul(a, dilate(c, u)))) - 1.0; };
  double lo = 0.0, hi = 1.0;
  int grow = 0;
  while (miss(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 60) throw EvaluationError("normalization bracket failed");
  }
  for (int i = 0; i < 120; ++i) {
    double mid = 0.5 * (lo + hi);
    (miss(mid) < 0.0 ? lo : hi) = mid;
  }
  double c = 0.5 * (lo + hi);
  NormalizedMap out;
  ComposedMap inner =
      ComposedMap::compose(ComposedMap::translation(a), ComposedMap::dilation(c));
  out.map = ComposedMap::compose(g, inner);
  out.p0 = u;
  out.scale = c;
  out.shift = a;
  return out;
}

IterationRun iterate_once(const IterationConfig& cfg, int m) {
  if (m < 1) throw ConfigError("iteration depth must be at least 1");
  auto t0 = std::chrono::steady_clock::now();

  IterationRun run;
  run.m = m;

  ComposedMap g_inv = cfg.g.inverse();
  ComposedMap f = ComposedMap::identity();
  Point marker = cfg.p0;
  double time = 1.0 / m;

  for (int j = 1; j <= m; ++j) {
    ComposedMap word = ComposedMap::compose(cfg.g, f.inverse());
    ComposedMap back = ComposedMap::compose(f, g_inv);

    MapBundle bundle;
    {
      auto fwd = std::make_shared<const ComposedMap>(word);
      auto bwd = std::make_shared<const ComposedMap>(back);
      bundle.forward = [fwd](const Point& p) { return (*fwd)(p); };
      bundle.backward = [bwd](const Point& p) { return (*bwd)(p); };
    }
    if (word.word.empty()) {
      bundle.jacobian = identity_jacobian();
    } else {
      bundle.jacobian =
          table_jacobian(tabulate_log_jacobian(word, cfg.domain, cfg.jac_dims));
    }

    ConstructedPotential built = build_contact_potential(bundle, cfg.psi, cfg.quad);
    TabulatedPotential tab =
        tabulate_potential(built.field, cfg.domain, cfg.phi_dims, cfg.quad);
    auto field = std::make_shared<const ContactField>(ContactField{tab.field(), cfg.quad});

    FlowOptions fopt;
    fopt.step = time / cfg.steps_per_level;

    Point z = integrate(*field, marker, time, fopt).end();
    double rho = gauge(z);
    if (!(rho > 1e-8) || !std::isfinite(rho))
      throw DivergenceError("marker point collapsed during iteration");

    ComposedMap level = ComposedMap::compose(
        ComposedMap::dilation(1.0 / rho), ComposedMap::flow(field, time, fopt));
    f = ComposedMap::compose(level, f);
    marker = dilate(1.0 / rho, z);

    run.rho.push_back(rho);
    run.c_m += -4.0 * std::log(rho);

    DilatationReport dil = dilatation(ComposedMap::flow(field, time, fopt), marker,
                                      {0.25, 0.125}, 24, cfg.quad);
    run.K_steps.push_back(dil.H);
  }

  run.normalization_error = std::abs(gauge(marker) - 1.0);
  run.map = f;

  run.grid = halton_ball_grid(cfg.grid_radius, cfg.grid_points, cfg.exclusions,
                              cfg.exclusion_radius);
  LogPotential pot;
  pot.measure = cfg.psi;
  if (!cfg.g.word.empty()) {
    auto fwd = std::make_shared<const ComposedMap>(cfg.g);
    pot.precompose = [fwd](const Point& p) { return (*fwd)(p); };
  }
  ComparabilityResult comp = comparability(f, run.c_m, pot, run.grid);
  run.ratios = std::move(comp.ratios);
  run.spread = comp.spread;

  run.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

IterationReport iterate(const IterationConfig& cfg) {
  IterationReport report;
  for (int m : cfg.m_values) report.runs.push_back(iterate_once(cfg, m));
  return report;
}

}  // namespace heis
