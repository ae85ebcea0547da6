#include "heis/quadrature.hpp"

#include "heis/errors.hpp"

#include <algorithm>
#include <cmath>

namespace heis {

std::mt19937_64 make_rng(const QuadratureConfig& cfg, std::uint64_t key) {
  std::seed_seq seq{cfg.seed, key};
  return std::mt19937_64(seq);
}

namespace {

double central(const ScalarField& F, const Point& p, Direction dir, double h,
               double* fp = nullptr, double* fm = nullptr) {
  const double a = F(subgroup_step(p, dir, h));
  const double b = F(subgroup_step(p, dir, -h));
  if (!std::isfinite(a) || !std::isfinite(b))
    throw EvaluationError("hderiv: non-finite field value");
  if (fp) *fp = a;
  if (fm) *fm = b;
  return (a - b) / (2.0 * h);
}

}  // namespace

double hderiv(const ScalarField& F, const Point& p, Direction dir,
              const QuadratureConfig& cfg) {
  double fp = 0.0, fm = 0.0;
  const double d = central(F, p, dir, cfg.fd_step, &fp, &fm);
  // The two samples agreeing to roundoff means the difference carries no
  // signal at this step; widen to 1e-3 and Richardson-combine instead.
  const double scale = std::abs(fp) + std::abs(fm);
  if (scale > 0.0 && std::abs(fp - fm) <= 32.0 * 2.2e-16 * scale) {
    const double h = 1e-3;
    return (4.0 * central(F, p, dir, h / 2) - central(F, p, dir, h)) / 3.0;
  }
  return d;
}

double hderiv2(const ScalarField& F, const Point& p, Direction d1, Direction d2,
               const QuadratureConfig& cfg) {
  // Outer step is taken coarser than the inner one so the nested noise
  // eps/h1/h2 stays well under the h^2 truncation floor.
  const double h1 = std::max(cfg.fd_step, 1e-4) * 8.0;
  auto inner = [&](const Point& q) { return hderiv(F, q, d2, cfg); };
  const double a = inner(subgroup_step(p, d1, h1));
  const double b = inner(subgroup_step(p, d1, -h1));
  return (a - b) / (2.0 * h1);
}

Point ball_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Point p(u(rng), u(rng), u(rng));
    if (gauge4(p) < 1.0) return p;
  }
}

Point sphere_point(std::mt19937_64& rng) {
  for (;;) {
    const Point p = ball_point(rng);
    const double g = gauge(p);
    if (g > 1e-3) return dilate(1.0 / g, p);
  }
}

Point stratified_ball_point(std::mt19937_64& rng, int stratum, int strata) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Point q = sphere_point(rng);
  // Equal-volume shells: the ball-uniform radial law is r^3 dr, so the
  // stratum boundaries are fourth roots.
  const double r = std::pow((stratum + u(rng)) / strata, 0.25);
  return dilate(r, q);
}

double unit_ball_volume() {
  // pi^2/2; the test suite re-derives this by the 1-D radial reduction
  // and checks the Monte Carlo estimator against it.
  return M_PI * M_PI / 2.0;
}

double sphere_measure() {
  // Integrating r^3 against the surface measure over [0,1] gives a
  // quarter of it, so the sphere carries 4 |B(0,1)|.
  return 4.0 * unit_ball_volume();
}

Box ball_box(const Point& center, double r) {
  // B(c, r) = c * delta_r B(0,1); the group shear tilts the t extent by
  // 2 r (|cx| + |cy|).
  const double th = r * r + 2.0 * r * (std::abs(center.x()) + std::abs(center.y()));
  return Box{Point(center.x() - r, center.y() - r, center.z() - th),
             Point(center.x() + r, center.y() + r, center.z() + th)};
}

double ball_volume(const Point& center, double r, const QuadratureConfig& cfg) {
  if (!(r > 0.0)) throw EvaluationError("ball_volume: radius must be positive");
  auto rng = make_rng(cfg, 0x62616c6cULL);
  const Box box = ball_box(center, r);
  std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
  std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
  std::uniform_real_distribution<double> ut(box.lo.z(), box.hi.z());
  const double r4 = r * r * r * r;
  const Point ic = inv(center);
  long hits = 0;
  const long n = std::max(1, cfg.mc_samples);
  for (long i = 0; i < n; ++i) {
    const Point q(ux(rng), uy(rng), ut(rng));
    if (gauge4(mul(ic, q)) < r4) ++hits;
  }
  return box.volume() * static_cast<double>(hits) / static_cast<double>(n);
}

namespace {

// Composite Simpson of g over [a, b] with n panels (n even).
double simpson(const std::function<double(double)>& g, double a, double b, int n) {
  n += n % 2;
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

double polar_integrate(const ScalarField& f, const QuadratureConfig& cfg,
                       RadialRange range) {
  auto rng = make_rng(cfg, 0x706f6c61ULL);
  const int n_sphere = std::max(16, cfg.mc_samples);
  std::vector<Point> dirs(n_sphere);
  for (auto& q : dirs) q = sphere_point(rng);

  const int panels = std::max(64, 16 * cfg.grid_resolution);
  auto shell = [&](double a, double b) {
    double acc = 0.0;
    for (const Point& q : dirs) {
      acc += simpson(
          [&](double r) {
            const double v = f(dilate(r, q));
            if (!std::isfinite(v))
              throw EvaluationError("polar_integrate: non-finite integrand");
            return v * r * r * r;
          },
          a, b, panels);
    }
    return sphere_measure() * acc / n_sphere;
  };

  if (std::isfinite(range.r_max)) return shell(0.0, range.r_max);

  double total = shell(0.0, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int k = 0; k < 60; ++k) {
    const double s = shell(std::ldexp(1.0, k), std::ldexp(1.0, k + 1));
    total += s;
    if (std::abs(s) <= 1e-9 * std::max(1.0, std::abs(total)) &&
        std::abs(prev) <= 1e-9 * std::max(1.0, std::abs(total)))
      return total;
    stall = (k > 6 && std::abs(s) >= std::abs(prev)) ? stall + 1 : 0;
    if (stall >= 4)
      throw IntegrabilityError("polar_integrate: radial shell sums do not decay");
    prev = s;
  }
  throw IntegrabilityError("polar_integrate: radial tail did not converge");
}

double cartesian_integrate(const ScalarField& f, const Box& box,
                           const QuadratureConfig& cfg) {
  auto rng = make_rng(cfg, 0x63617274ULL);
  std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
  std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
  std::uniform_real_distribution<double> ut(box.lo.z(), box.hi.z());
  double acc = 0.0;
  const long n = std::max(1, cfg.mc_samples);
  for (long i = 0; i < n; ++i) {
    const double v = f(Point(ux(rng), uy(rng), ut(rng)));
    if (!std::isfinite(v))
      throw EvaluationError("cartesian_integrate: non-finite integrand");
    acc += v;
  }
  return box.volume() * acc / static_cast<double>(n);
}

namespace {

double adaptive(const std::function<double(double)>& f, double a, double b,
                double fa, double fm, double fb, double whole, double tol,
                int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth >= 48 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, tol / 2, depth + 1) +
         adaptive(f, m, b, fm, frm, fb, right, tol / 2, depth + 1);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace heis
