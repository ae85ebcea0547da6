#pragma once

// The iterative scheme: starting from the identity, each level rebuilds
// the contact potential adapted to g composed with the current inverse
// map, flows it for time 1/m, and renormalizes by a dilation so the
// marker point stays on the unit sphere.  After m levels the accumulated
// Jacobian should be comparable to exp(2 Lambda_psi) up to the constant
// exp(c_m) collected from the dilations.
//
// Per level the working fields are tabulated on a box grid (both log J of
// the current word and the freshly constructed potential), which keeps
// the cost of level j independent of the depth of the word built so far.

#include "heis/construct.hpp"

#include <vector>

namespace heis {

struct IterationConfig {
  std::vector<int> m_values{2, 4, 8};
  Measure psi;                      // smooth density (or atoms) driving the scheme
  ComposedMap g;                    // precomposition target; empty word = identity
  Point p0 = Point(1.0, 0.0, 0.0);  // unit-gauge marker kept on the sphere

  // Comparability grid: low-discrepancy points of B(0, grid_radius) with
  // holes cut around the listed centers.
  std::vector<Point> exclusions;
  double exclusion_radius = 0.05;
  double grid_radius = 2.0;
  int grid_points = 1000;

  // Tabulation ranges and sizes.
  Box domain{Point(-5.0, -5.0, -25.0), Point(5.0, 5.0, 25.0)};
  Eigen::Vector3i phi_dims{17, 17, 33};
  Eigen::Vector3i jac_dims{17, 17, 33};
  int steps_per_level = 16;  // RK4 steps inside each time-(1/m) flow

  QuadratureConfig quad{20170118ULL, 32, 5, 1e-4};
};

struct IterationRun {
  int m = 0;
  double c_m = 0.0;                  // -4 sum log rho_j
  std::vector<double> rho;           // per-level sphere normalizers
  std::vector<double> K_steps;       // dilatation estimate of each level flow
  double normalization_error = 0.0;  // | gauge(f_m(p0)) - 1 |
  std::vector<Point> grid;
  std::vector<double> ratios;        // J_{f_m} e^{-c_m} / e^{2 Lambda}
  double spread = 0.0;               // max ratio / min ratio
  double elapsed_seconds = 0.0;
  ComposedMap map;
};

struct IterationReport {
  std::vector<IterationRun> runs;
};

IterationRun iterate_once(const IterationConfig& cfg, int m);
IterationReport iterate(const IterationConfig& cfg);

// Halton-sequence fill of the gauge ball with spherical holes removed.
std::vector<Point> halton_ball_grid(double radius, int count,
                                    const std::vector<Point>& holes,
                                    double hole_radius);

struct ComparabilityResult {
  std::vector<double> ratios;
  double spread = 0.0;
};

// ratios[i] = J_F(grid[i]) e^{-c_shift} / e^{2 Lambda(grid[i])}.
ComparabilityResult comparability(const ComposedMap& F, double c_shift,
                                  const LogPotential& pot,
                                  const std::vector<Point>& grid);

// Weak form of the Jacobian: int test(p) J_F(p) dp over the box, with a
// deterministic sample set so runs at different depths are comparable.
double weak_jacobian_integral(const ComposedMap& F, const ScalarField& test,
                              const Box& box, const QuadratureConfig& cfg);

// Total dilatation budget of the composed flow: Phi' = eps' G(Phi),
// G(r) = A1 exp(A2 K^{2/3} exp(2r/3)), integrated over [0, 1]; returns
// exp(Phi(1)).  Throws DivergenceError when eps' >= eps(K), the exact
// escape threshold.
double budget_epsilon(double K, double A1 = 1.0, double A2 = 1.0);
double dilatation_budget(double K, double eps_prime, double A1 = 1.0,
                         double A2 = 1.0);

// Conjugate g by a translation and dilation so the origin is fixed and
// the marker direction lands on the unit sphere: h(p) = g(a delta_c p)
// with a = g^{-1}(0) and c solved by bisection.
struct NormalizedMap {
  ComposedMap map;
  Point p0 = Point::Zero();
  double scale = 1.0;
  Point shift = Point::Zero();
};

NormalizedMap normalize_to_unit(const ComposedMap& g,
                                const Point& direction = Point(1.0, 0.0, 0.0));

}  // namespace heis
