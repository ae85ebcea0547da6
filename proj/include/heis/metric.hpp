#pragma once

// Path metrics: Carnot-Caratheodory distance by direct minimization over
// lifted planar polylines, weighted lengths int omega^{1/4} |gamma'|, and
// the measure deformation distance nu^{1/4}(B(p,d) u B(q,d)).
//
// Planar polylines lift exactly (each segment is a group translation with
// zero vertical component), and a closed planar loop of signed area A
// lifts to a vertical rise of -4A.  The residual vertical gap of a
// candidate path is therefore closed exactly by a regular polygon of the
// right area, and the minimization only ever sees admissible curves.

#include "heis/flow.hpp"
#include "heis/measure.hpp"

namespace heis {

using WeightField = std::function<double(const Point&)>;

struct HorizontalPath {
  std::vector<Point> points;  // lifted polyline, gap polygon included
  double length = 0.0;        // horizontal = planar length
};

struct PathSpec {
  Point start = Point::Zero();
  Point end = Point::Zero();
  std::vector<Eigen::Vector2d> waypoints;  // interior planar control points
  int gap_sides = 16;
};

// Lift start -> waypoints -> end in the plane, then append the gap
// polygon so the path ends exactly at `end`.
HorizontalPath realize(const PathSpec& spec);

// int omega^{1/4} |gamma'|_H ds by fixed Gauss-Legendre nodes per segment.
double weighted_length(const HorizontalPath& path, const WeightField& omega);

struct GeodesicOptions {
  int waypoints = 6;      // interior control points of the first round
  int refinements = 2;    // midpoint-doubling rounds after the first
  int iterations = 40;    // pattern-search sweeps per round
  int restarts = 2;       // jittered restarts, best result kept
  double tol = 1e-5;      // relative improvement cutoff per sweep
  int gap_sides = 16;
};

struct GeodesicResult {
  double length = 0.0;
  HorizontalPath path;
  long evaluations = 0;
};

GeodesicResult weighted_distance(const Point& p, const Point& q,
                                 const WeightField& omega,
                                 const GeodesicOptions& opt,
                                 const QuadratureConfig& cfg);
GeodesicResult cc_distance(const Point& p, const Point& q,
                           const GeodesicOptions& opt = {},
                           const QuadratureConfig& cfg = {});

// nu^{1/4}(B(p,d) u B(q,d)) with d = d(p,q) and dnu = omega dvol, by
// rejection sampling over the union's bounding box.
double david_semmes_distance(const Point& p, const Point& q,
                             const WeightField& omega,
                             const QuadratureConfig& cfg);

// Side-by-side comparison of the pushforward metric d(F p, F q), the
// omega-weighted path metric, and the David-Semmes distance on a random
// pair cloud.
struct MetricPair {
  Point p = Point::Zero(), q = Point::Zero();
  double rho_f = 0.0;  // d(F p, F q)
  double rho_w = 0.0;  // weighted path distance
  double d_w = 0.0;    // David-Semmes distance
};

struct MetricSuite {
  std::vector<MetricPair> pairs;
  double pushforward_spread = 0.0;  // max/min of rho_f / rho_w
  double deformation_spread = 0.0;  // max/min of rho_w / d_w
};

struct SuiteConfig {
  int pairs = 200;
  double cloud_radius = 1.5;
  double min_separation = 0.05;
  GeodesicOptions geo{4, 1, 25, 1, 1e-4, 16};
  QuadratureConfig quad;
};

MetricSuite comparability_suite(const ComposedMap& F, const WeightField& omega,
                                const SuiteConfig& cfg);

// nu-masses of concentric balls B(center, r0 2^k) and their consecutive
// quotients.
struct DoublingReport {
  std::vector<double> radii;
  std::vector<double> masses;
  std::vector<double> quotients;
  double max_quotient = 0.0;
};

DoublingReport doubling_ladder(const WeightField& omega, const Point& center,
                               double r0, int rungs, const QuadratureConfig& cfg);

// Sums of David-Semmes distances over m-fold subdivisions of a vertical
// segment; for bounded omega the sums grow like sqrt(m).
struct LengthScalingReport {
  std::vector<int> subdivisions;
  std::vector<double> sums;
  double slope = 0.0;  // log-log least-squares slope
};

LengthScalingReport vertical_length_scaling(const WeightField& omega,
                                            const Point& base, double height,
                                            const std::vector<int>& subdivisions,
                                            const QuadratureConfig& cfg);

}  // namespace heis
