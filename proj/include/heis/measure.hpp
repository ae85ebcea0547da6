#pragma once

// Signed measures (finite atoms plus an optional gridded density) and
// their logarithmic potentials  Lambda(p) = -int log d(p, q) dmu(q),
// with the mollification and truncation helpers used to regularize a
// measure before feeding it to the flow construction.

#include "heis/heisenberg.hpp"
#include "heis/quadrature.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace heis {

struct Atom {
  Point location = Point::Zero();
  double mass = 0.0;
};

// Cell-centered density samples on a regular box grid; origin is the
// center of cell (0,0,0).
struct DensityGrid {
  Point origin = Point::Zero();
  Point spacing = Point::Ones();
  Eigen::Vector3i dims = Eigen::Vector3i::Zero();
  std::vector<double> values;

  double cell_volume() const { return spacing.x() * spacing.y() * spacing.z(); }
  Point center(int ix, int iy, int it) const {
    return origin + Point(ix * spacing.x(), iy * spacing.y(), it * spacing.z());
  }
  std::size_t index(int ix, int iy, int it) const {
    return (static_cast<std::size_t>(it) * dims.y() + iy) * dims.x() + ix;
  }
};

struct Measure {
  std::vector<Atom> atoms;
  std::optional<DensityGrid> density;
};

double total_variation(const Measure& mu);
double signed_mass(const Measure& mu);

// Admissibility = finite total variation and finite log-moment
// int log^+ ||q|| d|mu|; per-dyadic-shell partial moments are reported so
// a diverging tail is visible in the diagnostics.
struct AdmissibilityReport {
  bool admissible = false;
  double total_variation = 0.0;
  double log_moment = 0.0;
  std::vector<double> shell_moments;
};

AdmissibilityReport is_admissible(const Measure& mu);

// Drop everything outside the closed gauge ball B(0, k).
Measure restrict_measure(const Measure& mu, double k);

// Mollification  psi_k(p) = int Psi_k(q^{-1} p) dmu(q)  with the bump
// Psi_k(p) = k^4 Psi(delta_k p); returns a density-only measure whose grid
// resolution comes from cfg.grid_resolution.  Mass is preserved up to the
// grid quadrature error.
Measure regularize(const Measure& mu, double k, const QuadratureConfig& cfg);

// The normalized smooth bump behind regularize: supported in the
// Euclidean (hence gauge) unit ball, integral one.
double mollifier(const Point& p);

// Tagged potential value: inf_sign = +1/-1 marks +inf/-inf at atoms so
// downstream exponentials can map to inf/0 explicitly.
struct PotentialValue {
  double value = 0.0;
  int inf_sign = 0;
  bool finite() const { return inf_sign == 0; }
};

// exp(beta * Lambda) honoring the infinity tag.
double exp_scaled(const PotentialValue& v, double beta);

struct LogPotential {
  Measure measure;
  // Optional precomposition g; the evaluation point is g(p).
  std::function<Point(const Point&)> precompose;
};

PotentialValue eval_potential(const LogPotential& pot, const Point& p);

// JSON round trip for the external measure schema
// {atoms:[{location:[x,y,t],mass}], density:{origin,spacing,dims,values}}.
std::string measure_to_json(const Measure& mu);
Measure measure_from_json(const std::string& text);

}  // namespace heis
