#include "heis/flow.hpp"

#include "heis/errors.hpp"
#include "heis/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heis {

double flow_step(double time, const FlowOptions& opt) {
  if (opt.step > 0.0) return opt.step;
  return std::abs(time) > 0.0 ? std::abs(time) / 256.0 : 0.0;
}

namespace {

int step_count(double time, const FlowOptions& opt) {
  const double h = flow_step(time, opt);
  if (h == 0.0) return 0;
  return std::max(1, static_cast<int>(std::llround(std::abs(time) / h)));
}

void check_inside(const Point& p, const FlowOptions& opt) {
  if (!p.allFinite() || gauge4(p) > std::pow(opt.escape_radius, 4.0))
    throw EscapeError("flow: trajectory escaped the allowed region");
}

}  // namespace

FlowResult integrate(const ContactField& v, const Point& p, double time,
                     const FlowOptions& opt) {
  FlowResult out;
  const int n = step_count(time, opt);
  out.times.reserve(n + 1);
  out.points.reserve(n + 1);
  out.times.push_back(0.0);
  out.points.push_back(p);
  if (n == 0) return out;
  const double h = time / n;
  Point cur = p;
  for (int i = 0; i < n; ++i) {
    const Point k1 = v.components(cur);
    const Point k2 = v.components(cur + 0.5 * h * k1);
    const Point k3 = v.components(cur + 0.5 * h * k2);
    const Point k4 = v.components(cur + h * k3);
    cur += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    check_inside(cur, opt);
    out.times.push_back((i + 1) * h);
    out.points.push_back(cur);
  }
  return out;
}

FlowWithDifferential flow_with_differential(const ContactField& v, const Point& p,
                                            double time, const FlowOptions& opt) {
  FlowWithDifferential out;
  const int n = step_count(time, opt);
  out.path.times.push_back(0.0);
  out.path.points.push_back(p);
  out.differentials.push_back(Eigen::Matrix2d::Identity());
  if (n == 0) return out;
  const double h = time / n;
  Point cur = p;
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  for (int i = 0; i < n; ++i) {
    const Point k1 = v.components(cur);
    const Eigen::Matrix2d K1 = v.horizontal_differential(cur) * M;
    const Point p2 = cur + 0.5 * h * k1;
    const Point k2 = v.components(p2);
    const Eigen::Matrix2d K2 = v.horizontal_differential(p2) * (M + 0.5 * h * K1);
    const Point p3 = cur + 0.5 * h * k2;
    const Point k3 = v.components(p3);
    const Eigen::Matrix2d K3 = v.horizontal_differential(p3) * (M + 0.5 * h * K2);
    const Point p4 = cur + h * k3;
    const Point k4 = v.components(p4);
    const Eigen::Matrix2d K4 = v.horizontal_differential(p4) * (M + h * K3);
    cur += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    M += (h / 6.0) * (K1 + 2 * K2 + 2 * K3 + K4);
    check_inside(cur, opt);
    out.path.times.push_back((i + 1) * h);
    out.path.points.push_back(cur);
    out.differentials.push_back(M);
  }
  return out;
}

namespace {

struct FlowAndLog {
  Point end;
  double logj;
};

// Position and 2 int T phi in one RK4 pass.
FlowAndLog flow_jlog(const ContactField& v, const Point& p, double time,
                     const FlowOptions& opt) {
  const int n = step_count(time, opt);
  if (n == 0) return {p, 0.0};
  const double h = time / n;
  Point cur = p;
  double a = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point k1 = v.components(cur);
    const double a1 = 2.0 * v.horizontal_divergence(cur);
    const Point p2 = cur + 0.5 * h * k1;
    const Point k2 = v.components(p2);
    const double a2 = 2.0 * v.horizontal_divergence(p2);
    const Point p3 = cur + 0.5 * h * k2;
    const Point k3 = v.components(p3);
    const double a3 = 2.0 * v.horizontal_divergence(p3);
    const Point p4 = cur + h * k3;
    const Point k4 = v.components(p4);
    const double a4 = 2.0 * v.horizontal_divergence(p4);
    cur += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    a += (h / 6.0) * (a1 + 2 * a2 + 2 * a3 + a4);
    check_inside(cur, opt);
  }
  return {cur, a};
}

}  // namespace

double flow_log_jacobian(const ContactField& v, const Point& p, double time,
                         const FlowOptions& opt) {
  return flow_jlog(v, p, time, opt).logj;
}

Point ComposedMap::operator()(const Point& p) const {
  Point cur = p;
  for (const auto& letter : word) {
    if (const auto* f = std::get_if<FlowLetter>(&letter))
      cur = integrate(*f->field, cur, f->time, f->opt).end();
    else if (const auto* d = std::get_if<DilationLetter>(&letter))
      cur = dilate(d->r, cur);
    else
      cur = mul(std::get<TranslationLetter>(letter).u, cur);
  }
  return cur;
}

ComposedMap ComposedMap::inverse() const {
  ComposedMap out;
  out.word.reserve(word.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (const auto* f = std::get_if<FlowLetter>(&*it))
      out.word.push_back(FlowLetter{f->field, -f->time, f->opt});
    else if (const auto* d = std::get_if<DilationLetter>(&*it))
      out.word.push_back(DilationLetter{1.0 / d->r});
    else
      out.word.push_back(TranslationLetter{inv(std::get<TranslationLetter>(*it).u)});
  }
  return out;
}

double ComposedMap::log_jacobian(const Point& p) const {
  Point cur = p;
  double acc = 0.0;
  for (const auto& letter : word) {
    if (const auto* f = std::get_if<FlowLetter>(&letter)) {
      const FlowAndLog r = flow_jlog(*f->field, cur, f->time, f->opt);
      acc += r.logj;
      cur = r.end;
    } else if (const auto* d = std::get_if<DilationLetter>(&letter)) {
      acc += 4.0 * std::log(d->r);
      cur = dilate(d->r, cur);
    } else {
      cur = mul(std::get<TranslationLetter>(letter).u, cur);
    }
  }
  return acc;
}

double ComposedMap::jacobian(const Point& p) const { return std::exp(log_jacobian(p)); }

Eigen::Matrix2d ComposedMap::horizontal_differential(const Point& p) const {
  Point cur = p;
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  for (const auto& letter : word) {
    if (const auto* f = std::get_if<FlowLetter>(&letter)) {
      const FlowWithDifferential r = flow_with_differential(*f->field, cur, f->time, f->opt);
      M = r.end_differential() * M;
      cur = r.path.end();
    } else if (const auto* d = std::get_if<DilationLetter>(&letter)) {
      M = d->r * M;
      cur = dilate(d->r, cur);
    } else {
      cur = mul(std::get<TranslationLetter>(letter).u, cur);
    }
  }
  return M;
}

ComposedMap ComposedMap::identity() { return ComposedMap{}; }

ComposedMap ComposedMap::dilation(double r) {
  if (!(r > 0.0)) throw ConfigError("ComposedMap: dilation factor must be positive");
  return ComposedMap{{DilationLetter{r}}};
}

ComposedMap ComposedMap::translation(const Point& u) {
  return ComposedMap{{TranslationLetter{u}}};
}

ComposedMap ComposedMap::flow(std::shared_ptr<const ContactField> field, double time,
                              FlowOptions opt) {
  return ComposedMap{{FlowLetter{std::move(field), time, opt}}};
}

ComposedMap ComposedMap::compose(const ComposedMap& outer, const ComposedMap& inner) {
  ComposedMap out = inner;
  out.word.insert(out.word.end(), outer.word.begin(), outer.word.end());
  return out;
}

namespace {

// Bounding box of F(B(p, r)) in left-translated coordinates around F(p).
// There a gauge ball has extents O(r, r, r^2); in absolute coordinates its
// t-extent picks up a twist term of order r * |p_h| that would make an
// axis-aligned box almost empty away from the t-axis.
Box image_ball_box(const ComposedMap& F, const Point& fp, const Point& p,
                   double r, std::mt19937_64& rng, int boundary_samples) {
  const Point fpi = inv(fp);
  Point lo = Point::Zero();
  Point hi = Point::Zero();
  for (int i = 0; i < boundary_samples; ++i) {
    const Point u = mul(fpi, F(mul(p, dilate(r, sphere_point(rng)))));
    lo = lo.cwiseMin(u);
    hi = hi.cwiseMax(u);
  }
  const Point c = 0.5 * (lo + hi);
  const Point half = 0.75 * (hi - lo) + Point::Constant(1e-12);
  return Box{c - half, c + half};
}

double image_ball_volume(const ComposedMap& F, const ComposedMap& Finv,
                         const Point& p, double r, std::mt19937_64& rng,
                         int samples) {
  const Point fp = F(p);
  const Box box = image_ball_box(F, fp, p, r, rng, 64);
  std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
  std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
  std::uniform_real_distribution<double> ut(box.lo.z(), box.hi.z());
  const double r4 = r * r * r * r;
  long hits = 0;
  for (int i = 0; i < samples; ++i) {
    // Left translation preserves volume, so counting in u-coordinates
    // needs no Jacobian factor.
    const Point q = mul(fp, Point(ux(rng), uy(rng), ut(rng)));
    if (gauge4(mul(inv(p), Finv(q))) < r4) ++hits;
  }
  return box.volume() * static_cast<double>(hits) / samples;
}

}  // namespace

VolumeJacobianReport jacobian_volume(const ComposedMap& F, const Point& p,
                                     std::vector<double> radii,
                                     const QuadratureConfig& cfg) {
  if (radii.size() < 2) throw ConfigError("jacobian_volume: need >= 2 radii");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  auto rng = make_rng(cfg, 0x766f6c6aULL);
  const ComposedMap Finv = F.inverse();
  VolumeJacobianReport rep;
  rep.radii = radii;
  for (double r : radii) {
    const double vol = image_ball_volume(F, Finv, p, r, rng, cfg.mc_samples);
    rep.ratios.push_back(vol / (r * r * r * r * unit_ball_volume()));
  }
  const double es = rep.ratios[rep.ratios.size() - 1];
  const double ep = rep.ratios[rep.ratios.size() - 2];
  const double rs = radii[radii.size() - 1];
  const double rp = radii[radii.size() - 2];
  // Remove the leading O(r) error assuming the ladder ratio rp/rs.
  rep.value = es + (es - ep) * rs / (rp - rs);
  rep.converged = std::abs(es - ep) <= 0.05 * std::max(std::abs(es), 1e-12);
  return rep;
}

DilatationReport dilatation(const ComposedMap& F, const Point& p,
                            std::vector<double> radii, int sphere_samples,
                            const QuadratureConfig& cfg) {
  if (radii.size() < 2) throw ConfigError("dilatation: need >= 2 radii");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  auto rng = make_rng(cfg, 0x64696c61ULL);
  DilatationReport rep;
  rep.radii = radii;
  const Point fp = F(p);
  for (double r : radii) {
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sphere_samples; ++i) {
      const double d = dist(F(mul(p, dilate(r, sphere_point(rng)))), fp);
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    if (!(dmin > 0.0))
      throw EvaluationError("dilatation: degenerate image sphere");
    rep.ratios.push_back(dmax / dmin);
  }
  rep.H = std::max(rep.ratios[rep.ratios.size() - 1], rep.ratios[rep.ratios.size() - 2]);
  return rep;
}

QsReport qs_checks(const ComposedMap& F, double K,
                   const std::vector<Point>& batch, double radius,
                   const QuadratureConfig& cfg) {
  if (batch.empty()) throw ConfigError("qs_checks: empty batch");
  auto rng = make_rng(cfg, 0x71736368ULL);
  const ComposedMap Finv = F.inverse();
  QsReport rep;
  rep.bdist_min = std::numeric_limits<double>::infinity();
  rep.rh_exponents = {1.1, 1.25, 1.5};
  rep.rh_quotients.assign(rep.rh_exponents.size(), 0.0);
  const double expo = std::pow(K, 2.0 / 3.0);
  const int nb = std::max(8, cfg.mc_samples / 8);

  for (const Point& p : batch) {
    const Point fp = F(p);
    const double vol = image_ball_volume(F, Finv, p, radius, rng, cfg.mc_samples);
    for (int i = 0; i < 24; ++i) {
      const double d = dist(F(mul(p, dilate(radius, sphere_point(rng)))), fp);
      const double c = std::pow(vol, 0.25) / d;
      rep.bdist_min = std::min(rep.bdist_min, c);
      rep.bdist_max = std::max(rep.bdist_max, c);
    }
    rep.growth_envelope_C = std::max(
        rep.growth_envelope_C, gauge(fp) / (1.0 + std::pow(gauge(p), expo)));
    // Reverse Holder quotients of J over B(p, radius).
    std::vector<double> js(nb);
    for (int i = 0; i < nb; ++i)
      js[i] = F.jacobian(mul(p, dilate(radius, ball_point(rng))));
    const double mean = std::accumulate(js.begin(), js.end(), 0.0) / nb;
    for (std::size_t e = 0; e < rep.rh_exponents.size(); ++e) {
      double m = 0.0;
      for (double j : js) m += std::pow(j, rep.rh_exponents[e]);
      m = std::pow(m / nb, 1.0 / rep.rh_exponents[e]);
      rep.rh_quotients[e] = std::max(rep.rh_quotients[e], m / mean);
    }
  }

  // Change of variables against a bump centered on the image of the
  // first base point: int_{F Omega} u = int_Omega (u o F) J.
  const Point pc = batch.front();
  const Point fc = F(pc);
  const double R = 2.0 * radius;
  auto u = [&](const Point& q) {
    return mollifier(Point((q.x() - fc.x()) / R, (q.y() - fc.y()) / R,
                           (q.z() - fc.z()) / (R * R)));
  };
  const Box obox = image_ball_box(F, fc, pc, R, rng, 64);
  double lhs = 0.0;
  {
    std::uniform_real_distribution<double> ux(obox.lo.x(), obox.hi.x());
    std::uniform_real_distribution<double> uy(obox.lo.y(), obox.hi.y());
    std::uniform_real_distribution<double> ut(obox.lo.z(), obox.hi.z());
    const double r4 = R * R * R * R;
    double acc = 0.0;
    for (int i = 0; i < cfg.mc_samples; ++i) {
      const Point q = mul(fc, Point(ux(rng), uy(rng), ut(rng)));
      if (gauge4(mul(inv(pc), Finv(q))) < r4) acc += u(q);
    }
    lhs = obox.volume() * acc / cfg.mc_samples;
  }
  double rhs = 0.0;
  {
    double acc = 0.0;
    for (int i = 0; i < cfg.mc_samples; ++i) {
      const Point q = mul(pc, dilate(R, ball_point(rng)));
      acc += u(F(q)) * F.jacobian(q);
    }
    rhs = R * R * R * R * unit_ball_volume() * acc / cfg.mc_samples;
  }
  rep.cov_residual = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
  return rep;
}

}  // namespace heis
