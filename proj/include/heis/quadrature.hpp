#pragma once

// Sampling, finite differences along the group frame, and the volume /
// polar integration machinery.  All randomness is funneled through
// mt19937_64 streams seeded from QuadratureConfig::seed so identical
// configs reproduce identical numbers.

#include "heis/heisenberg.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace heis {

struct QuadratureConfig {
  std::uint64_t seed = 20170118;
  int mc_samples = 4096;       // default Monte Carlo budget per estimate
  int grid_resolution = 16;    // default nodes per axis for grid sweeps
  double fd_step = 1e-4;       // central difference step along subgroups
};

// Independent deterministic stream: the key separates consumers so adding
// a draw in one place never shifts another's sequence.
std::mt19937_64 make_rng(const QuadratureConfig& cfg, std::uint64_t key);

using ScalarField = std::function<double(const Point&)>;

// Central difference of F along the X/Y/T subgroup through p.  Falls back
// to a Richardson-extrapolated stencil at a coarser step when the two
// function values cancel to roundoff.
double hderiv(const ScalarField& F, const Point& p, Direction dir,
              const QuadratureConfig& cfg);

// Second difference D1(D2 F) with independent steps, used by strain checks.
double hderiv2(const ScalarField& F, const Point& p, Direction d1, Direction d2,
               const QuadratureConfig& cfg);

// Uniform draw from the open unit gauge ball (rejection from its box).
Point ball_point(std::mt19937_64& rng);

// Gauge-sphere draw with the polar surface law: a ball-uniform point is
// projected along dilations, which is exactly the measure the polar
// integration formula integrates against.
Point sphere_point(std::mt19937_64& rng);

// Uniform point of the gauge ball with the radial coordinate stratified
// over `strata` equal-volume shells; i indexes the stratum of this draw.
Point stratified_ball_point(std::mt19937_64& rng, int stratum, int strata);

// Unit-ball volume |B(0,1)| = pi^2/2, and the total polar surface measure
// of the unit gauge sphere = 4 |B(0,1)|.  These are the calibration
// constants making polar and Cartesian quadrature agree on indicators.
double unit_ball_volume();
double sphere_measure();

// Monte Carlo volume of the metric ball B(p, r) by rejection from a
// Cartesian bounding box; honest in the sense that translation invariance
// and r^4 homogeneity hold only up to sampling error.
double ball_volume(const Point& center, double r, const QuadratureConfig& cfg);

struct RadialRange {
  double r_max = std::numeric_limits<double>::infinity();
};

// Polar integration: sphere_measure() times the sphere average of the
// radial integrals  int f(delta_r q) r^3 dr.  Infinite ranges are summed
// over dyadic shells; failure of the shell sums to decay raises
// IntegrabilityError.
double polar_integrate(const ScalarField& f, const QuadratureConfig& cfg,
                       RadialRange range = {});

struct Box {
  Point lo, hi;
  double volume() const {
    return (hi.x() - lo.x()) * (hi.y() - lo.y()) * (hi.z() - lo.z());
  }
};

// Bounding box of the metric ball B(center, r).
Box ball_box(const Point& center, double r);

// Plain Monte Carlo box quadrature; the Cartesian cross-check partner of
// polar_integrate.
double cartesian_integrate(const ScalarField& f, const Box& box,
                           const QuadratureConfig& cfg);

// Adaptive Simpson on [a, b]; small utility shared by 1-D reductions.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol = 1e-10);

}  // namespace heis
