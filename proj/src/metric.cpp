#include "heis/metric.hpp"

#include "heis/errors.hpp"

#include <algorithm>
#include <cmath>

namespace heis {

namespace {

// Gauss-Legendre 4 on [0, 1].
constexpr double kGNode[4] = {0.5 - 0.5 * 0.8611363115940526,
                              0.5 - 0.5 * 0.3399810435848563,
                              0.5 + 0.5 * 0.3399810435848563,
                              0.5 + 0.5 * 0.8611363115940526};
constexpr double kGWeight[4] = {0.5 * 0.3478548451374538, 0.5 * 0.6521451548625461,
                                0.5 * 0.6521451548625461, 0.5 * 0.3478548451374538};

double quarter_root(double w) { return std::pow(std::max(w, 0.0), 0.25); }

}  // namespace

HorizontalPath realize(const PathSpec& spec) {
  HorizontalPath out;
  std::vector<Eigen::Vector2d> plan;
  plan.reserve(spec.waypoints.size() + 2);
  plan.emplace_back(spec.start.x(), spec.start.y());
  for (const auto& w : spec.waypoints) plan.push_back(w);
  plan.emplace_back(spec.end.x(), spec.end.y());

  Point cur = spec.start;
  out.points.push_back(cur);
  for (std::size_t k = 1; k < plan.size(); ++k) {
    Eigen::Vector2d d = plan[k] - plan[k - 1];
    cur = mul(cur, Point(d.x(), d.y(), 0.0));
    out.points.push_back(cur);
    out.length += d.norm();
  }

  double dt = spec.end.z() - cur.z();
  if (dt != 0.0) {
    // Close the vertical gap with a regular polygon of signed area -dt/4
    // anchored at the arrival point.
    double area = -dt / 4.0;
    int n = std::max(3, spec.gap_sides);
    double r = std::sqrt(2.0 * std::abs(area) / (n * std::sin(2.0 * M_PI / n)));
    double s = area >= 0.0 ? 1.0 : -1.0;
    Eigen::Vector2d anchor = plan.back();
    Eigen::Vector2d center = anchor + Eigen::Vector2d(r, 0.0);
    Eigen::Vector2d prev = anchor;
    for (int k = 1; k <= n; ++k) {
      double ang = M_PI + s * 2.0 * M_PI * k / n;
      Eigen::Vector2d v = center + r * Eigen::Vector2d(std::cos(ang), std::sin(ang));
      Eigen::Vector2d d = v - prev;
      cur = mul(cur, Point(d.x(), d.y(), 0.0));
      out.points.push_back(cur);
      out.length += d.norm();
      prev = v;
    }
  }
  return out;
}

double weighted_length(const HorizontalPath& path, const WeightField& omega) {
  if (!omega) return path.length;
  double acc = 0.0;
  for (std::size_t k = 1; k < path.points.size(); ++k) {
    const Point& a = path.points[k - 1];
    const Point& b = path.points[k];
    double dx = b.x() - a.x(), dy = b.y() - a.y();
    double len = std::hypot(dx, dy);
    if (len == 0.0) continue;
    double seg = 0.0;
    for (int i = 0; i < 4; ++i) {
      Point s = mul(a, Point(kGNode[i] * dx, kGNode[i] * dy, 0.0));
      seg += kGWeight[i] * quarter_root(omega(s));
    }
    acc += len * seg;
  }
  return acc;
}

namespace {

std::vector<Eigen::Vector2d> straight_waypoints(const Point& p, const Point& q, int n) {
  std::vector<Eigen::Vector2d> w;
  w.reserve(n);
  Eigen::Vector2d a(p.x(), p.y()), b(q.x(), q.y());
  for (int i = 1; i <= n; ++i) w.push_back(a + (b - a) * (double(i) / (n + 1)));
  return w;
}

std::vector<Eigen::Vector2d> midpoint_double(const Point& p, const Point& q,
                                             const std::vector<Eigen::Vector2d>& w) {
  std::vector<Eigen::Vector2d> nodes;
  nodes.emplace_back(p.x(), p.y());
  for (const auto& v : w) nodes.push_back(v);
  nodes.emplace_back(q.x(), q.y());
  std::vector<Eigen::Vector2d> out;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    out.push_back(0.5 * (nodes[k - 1] + nodes[k]));
    if (k + 1 < nodes.size()) out.push_back(nodes[k]);
  }
  return out;
}

}  // namespace

GeodesicResult weighted_distance(const Point& p, const Point& q,
                                 const WeightField& omega,
                                 const GeodesicOptions& opt,
                                 const QuadratureConfig& cfg) {
  GeodesicResult best;
  best.length = std::numeric_limits<double>::infinity();

  double scale = std::max(dist(p, q), 1e-12);
  auto rng = make_rng(cfg, 0x67656f64ULL);
  std::uniform_real_distribution<double> jit(-1.0, 1.0);

  long evals = 0;
  auto objective = [&](const PathSpec& spec) {
    ++evals;
    HorizontalPath h = realize(spec);
    return omega ? weighted_length(h, omega) : h.length;
  };

  int restarts = std::max(1, opt.restarts);
  for (int rst = 0; rst < restarts; ++rst) {
    PathSpec spec;
    spec.start = p;
    spec.end = q;
    spec.gap_sides = opt.gap_sides;
    spec.waypoints = straight_waypoints(p, q, std::max(1, opt.waypoints));
    for (auto& w : spec.waypoints) {
      Eigen::Vector2d d(jit(rng), jit(rng));
      if (rst > 0) w += 0.25 * scale * d;  // draws happen on every restart
    }

    double fcur = objective(spec);
    for (int round = 0; round <= opt.refinements; ++round) {
      if (round > 0) {
        spec.waypoints = midpoint_double(p, q, spec.waypoints);
        fcur = objective(spec);
      }
      double step = 0.5 * scale / (round + 1);
      for (int it = 0; it < opt.iterations; ++it) {
        bool improved = false;
        for (std::size_t i = 0; i < spec.waypoints.size(); ++i)
          for (int c = 0; c < 2; ++c)
            for (double dir : {1.0, -1.0}) {
              PathSpec trial = spec;
              trial.waypoints[i][c] += dir * step;
              double f = objective(trial);
              if (f < fcur) {
                spec = std::move(trial);
                fcur = f;
                improved = true;
                break;  // next coordinate
              }
            }
        if (!improved) {
          step *= 0.5;
          if (step < opt.tol * scale) break;
        }
      }
    }
    if (fcur < best.length) {
      best.length = fcur;
      best.path = realize(spec);
    }
  }
  best.evaluations = evals;
  return best;
}

GeodesicResult cc_distance(const Point& p, const Point& q,
                           const GeodesicOptions& opt,
                           const QuadratureConfig& cfg) {
  return weighted_distance(p, q, WeightField(), opt, cfg);
}

double david_semmes_distance(const Point& p, const Point& q,
                             const WeightField& omega,
                             const QuadratureConfig& cfg) {
  double d = dist(p, q);
  if (d == 0.0) return 0.0;
  double d4 = d * d * d * d;
  Box bp = ball_box(p, d), bq = ball_box(q, d);
  Box box{bp.lo.cwiseMin(bq.lo), bp.hi.cwiseMax(bq.hi)};

  auto rng = make_rng(cfg, 0x64617673ULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = std::max(1024, cfg.mc_samples);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    Point s(box.lo.x() + (box.hi.x() - box.lo.x()) * u(rng),
            box.lo.y() + (box.hi.y() - box.lo.y()) * u(rng),
            box.lo.z() + (box.hi.z() - box.lo.z()) * u(rng));
    if (gauge4(mul(inv(p), s)) >= d4 && gauge4(mul(inv(q), s)) >= d4) continue;
    acc += omega ? std::max(omega(s), 0.0) : 1.0;
  }
  return std::pow(acc / n * box.volume(), 0.25);
}

MetricSuite comparability_suite(const ComposedMap& F, const WeightField& omega,
                                const SuiteConfig& cfg) {
  if (cfg.pairs < 1) throw ConfigError("pair count must be positive");
  MetricSuite suite;
  auto rng = make_rng(cfg.quad, 0x70616972ULL);
  while (static_cast<int>(suite.pairs.size()) < cfg.pairs) {
    Point p = dilate(cfg.cloud_radius, ball_point(rng));
    Point q = dilate(cfg.cloud_radius, ball_point(rng));
    if (dist(p, q) < cfg.min_separation) continue;
    MetricPair pr;
    pr.p = p;
    pr.q = q;
    pr.rho_f = dist(F(p), F(q));
    pr.rho_w = weighted_distance(p, q, omega, cfg.geo, cfg.quad).length;
    pr.d_w = david_semmes_distance(p, q, omega, cfg.quad);
    if (!(pr.rho_w > 0.0) || !(pr.d_w > 0.0))
      throw EvaluationError("degenerate distance in metric suite");
    suite.pairs.push_back(pr);
  }
  double lo1 = 1e300, hi1 = 0.0, lo2 = 1e300, hi2 = 0.0;
  for (const MetricPair& pr : suite.pairs) {
    double r1 = pr.rho_f / pr.rho_w;
    double r2 = pr.rho_w / pr.d_w;
    lo1 = std::min(lo1, r1);
    hi1 = std::max(hi1, r1);
    lo2 = std::min(lo2, r2);
    hi2 = std::max(hi2, r2);
  }
  suite.pushforward_spread = hi1 / lo1;
  suite.deformation_spread = hi2 / lo2;
  return suite;
}

DoublingReport doubling_ladder(const WeightField& omega, const Point& center,
                               double r0, int rungs, const QuadratureConfig& cfg) {
  if (!(r0 > 0.0) || rungs < 1) throw ConfigError("bad doubling ladder range");
  DoublingReport rep;
  auto rng = make_rng(cfg, 0x6475706cULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = std::max(4096, cfg.mc_samples);
  for (int k = 0; k <= rungs; ++k) {
    double r = r0 * std::pow(2.0, k);
    Box box = ball_box(center, r);
    double r4 = r * r * r * r;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      Point s(box.lo.x() + (box.hi.x() - box.lo.x()) * u(rng),
              box.lo.y() + (box.hi.y() - box.lo.y()) * u(rng),
              box.lo.z() + (box.hi.z() - box.lo.z()) * u(rng));
      if (gauge4(mul(inv(center), s)) >= r4) continue;
      acc += omega ? std::max(omega(s), 0.0) : 1.0;
    }
    rep.radii.push_back(r);
    rep.masses.push_back(acc / n * box.volume());
  }
  for (std::size_t k = 1; k < rep.masses.size(); ++k) {
    if (!(rep.masses[k - 1] > 0.0))
      throw EvaluationError("doubling ladder hit an empty ball");
    rep.quotients.push_back(rep.masses[k] / rep.masses[k - 1]);
    rep.max_quotient = std::max(rep.max_quotient, rep.quotients.back());
  }
  return rep;
}

LengthScalingReport vertical_length_scaling(const WeightField& omega,
                                            const Point& base, double height,
                                            const std::vector<int>& subdivisions,
                                            const QuadratureConfig& cfg) {
  if (subdivisions.size() < 2) throw ConfigError("need at least two subdivisions");
  LengthScalingReport rep;
  for (int m : subdivisions) {
    if (m < 1) throw ConfigError("subdivision count must be positive");
    double sum = 0.0;
    Point prev = base;
    for (int i = 1; i <= m; ++i) {
      Point next = mul(base, Point(0.0, 0.0, height * i / m));
      sum += david_semmes_distance(prev, next, omega, cfg);
      prev = next;
    }
    rep.subdivisions.push_back(m);
    rep.sums.push_back(sum);
  }
  // log-log least squares for the growth exponent.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double n = static_cast<double>(rep.sums.size());
  for (std::size_t i = 0; i < rep.sums.size(); ++i) {
    double x = std::log(static_cast<double>(rep.subdivisions[i]));
    double y = std::log(rep.sums[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

}  // namespace heis
