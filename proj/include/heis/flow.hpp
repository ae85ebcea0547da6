#pragma once

// Flows of contact fields and the maps assembled from them.  A flow is
// integrated by fixed-step RK4; the horizontal differential rides along
// via  (D_H f_s)' = D_H v(f_s) D_H f_s.  Maps built from flows, dilations
// and left translations compose as words of letters with exact inverses,
// and carry three independent Jacobian routes: det(D_H f)^2, the
// divergence integral exp(2 int T phi), and a Monte Carlo volume
// derivative.

#include "heis/contact_field.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace heis {

struct FlowOptions {
  double step = 0.0;            // 0 means |time|/256
  double escape_radius = 1e9;   // gauge bound; beyond it the flow errors out
};

double flow_step(double time, const FlowOptions& opt);

struct FlowResult {
  std::vector<double> times;
  std::vector<Point> points;
  const Point& end() const { return points.back(); }
};

FlowResult integrate(const ContactField& v, const Point& p, double time,
                     const FlowOptions& opt = {});

struct FlowWithDifferential {
  FlowResult path;
  std::vector<Eigen::Matrix2d> differentials;
  const Eigen::Matrix2d& end_differential() const { return differentials.back(); }
};

FlowWithDifferential flow_with_differential(const ContactField& v, const Point& p,
                                            double time, const FlowOptions& opt = {});

// log J along the flow by the divergence route: 2 int_0^s T phi(f_sigma).
double flow_log_jacobian(const ContactField& v, const Point& p, double time,
                         const FlowOptions& opt = {});

struct FlowLetter {
  std::shared_ptr<const ContactField> field;
  double time = 0.0;
  FlowOptions opt;
};
struct DilationLetter {
  double r = 1.0;
};
struct TranslationLetter {
  Point u = Point::Zero();
};
using Letter = std::variant<FlowLetter, DilationLetter, TranslationLetter>;

struct ComposedMap {
  std::vector<Letter> word;  // applied left to right

  Point operator()(const Point& p) const;
  // Exact inverse: reversed word with flow times negated, dilations and
  // translations inverted.
  ComposedMap inverse() const;
  double log_jacobian(const Point& p) const;
  double jacobian(const Point& p) const;
  // Chain-rule product of per-letter horizontal differentials.
  Eigen::Matrix2d horizontal_differential(const Point& p) const;

  static ComposedMap identity();
  static ComposedMap dilation(double r);
  static ComposedMap translation(const Point& u);
  static ComposedMap flow(std::shared_ptr<const ContactField> field, double time,
                          FlowOptions opt = {});
  // outer after inner.
  static ComposedMap compose(const ComposedMap& outer, const ComposedMap& inner);
};

// Volume-derivative Jacobian estimate |F B(p,r)| / |B(p,r)| over a radius
// ladder, via membership tests q in F B <=> F^{-1}(q) in B.  value is the
// Richardson combination of the two smallest radii.
struct VolumeJacobianReport {
  std::vector<double> radii;
  std::vector<double> ratios;
  double value = 0.0;
  bool converged = false;
};

VolumeJacobianReport jacobian_volume(const ComposedMap& F, const Point& p,
                                     std::vector<double> radii,
                                     const QuadratureConfig& cfg);

// Metric distortion max/min of d(F p, F q) over gauge spheres q in
// S(p, r); H is the limsup proxy (worst of the two smallest radii).
struct DilatationReport {
  std::vector<double> radii;
  std::vector<double> ratios;
  double H = 0.0;
};

DilatationReport dilatation(const ComposedMap& F, const Point& p,
                            std::vector<double> radii, int sphere_samples,
                            const QuadratureConfig& cfg);

// Quasiconformality cross-checks on a batch of base points:
//  - image-ball volume^(1/4) against boundary distances,
//  - the growth envelope ||F(p)|| <= C (1 + ||p||^{K^{2/3}}) for
//    normalized maps,
//  - reverse Holder quotients of J on balls at the given exponents,
//  - the change-of-variables residual for a bump test function.
struct QsReport {
  double bdist_min = 0.0, bdist_max = 0.0;
  double growth_envelope_C = 0.0;
  std::vector<double> rh_exponents;
  std::vector<double> rh_quotients;
  double cov_residual = 0.0;
};

QsReport qs_checks(const ComposedMap& F, double K,
                   const std::vector<Point>& batch, double radius,
                   const QuadratureConfig& cfg);

}  // namespace heis
