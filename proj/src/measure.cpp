#include "heis/measure.hpp"

#include "heis/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace heis {

double total_variation(const Measure& mu) {
  double tv = 0.0;
  for (const auto& a : mu.atoms) tv += std::abs(a.mass);
  if (mu.density) {
    const double cv = mu.density->cell_volume();
    for (double v : mu.density->values) tv += std::abs(v) * cv;
  }
  return tv;
}

double signed_mass(const Measure& mu) {
  double m = 0.0;
  for (const auto& a : mu.atoms) m += a.mass;
  if (mu.density) {
    const double cv = mu.density->cell_volume();
    for (double v : mu.density->values) m += v * cv;
  }
  return m;
}

namespace {

void shell_accumulate(std::vector<double>& shells, const Point& q, double w) {
  const double g = gauge(q);
  const double lp = std::log(std::max(1.0, g));
  if (lp <= 0.0 || w == 0.0) return;
  const int j = std::max(0, static_cast<int>(std::floor(std::log2(g))));
  if (shells.size() < static_cast<std::size_t>(j + 1)) shells.resize(j + 1, 0.0);
  shells[j] += std::abs(w) * lp;
}

}  // namespace

AdmissibilityReport is_admissible(const Measure& mu) {
  AdmissibilityReport rep;
  rep.total_variation = total_variation(mu);
  for (const auto& a : mu.atoms) shell_accumulate(rep.shell_moments, a.location, a.mass);
  if (mu.density) {
    const double cv = mu.density->cell_volume();
    const auto& d = *mu.density;
    for (int it = 0; it < d.dims.z(); ++it)
      for (int iy = 0; iy < d.dims.y(); ++iy)
        for (int ix = 0; ix < d.dims.x(); ++ix)
          shell_accumulate(rep.shell_moments, d.center(ix, iy, it),
                           d.values[d.index(ix, iy, it)] * cv);
  }
  for (double s : rep.shell_moments) rep.log_moment += s;
  rep.admissible = std::isfinite(rep.total_variation) && std::isfinite(rep.log_moment);
  return rep;
}

Measure restrict_measure(const Measure& mu, double k) {
  Measure out;
  for (const auto& a : mu.atoms)
    if (gauge(a.location) <= k) out.atoms.push_back(a);
  if (mu.density) {
    DensityGrid d = *mu.density;
    for (int it = 0; it < d.dims.z(); ++it)
      for (int iy = 0; iy < d.dims.y(); ++iy)
        for (int ix = 0; ix < d.dims.x(); ++ix)
          if (gauge(d.center(ix, iy, it)) > k) d.values[d.index(ix, iy, it)] = 0.0;
    out.density = std::move(d);
  }
  return out;
}

double mollifier(const Point& p) {
  static const double norm = [] {
    // Radial reduction of int exp(-1/(1-rho^2)) over the Euclidean ball.
    const double raw = 4.0 * M_PI *
                       integrate_1d(
                           [](double rho) {
                             const double s = 1.0 - rho * rho;
                             return s > 0.0 ? rho * rho * std::exp(-1.0 / s) : 0.0;
                           },
                           0.0, 1.0);
    return 1.0 / raw;
  }();
  const double e2 = p.squaredNorm();
  if (e2 >= 1.0) return 0.0;
  return norm * std::exp(-1.0 / (1.0 - e2));
}

namespace {

double mollifier_k(const Point& p, double k) {
  return k * k * k * k * mollifier(dilate(k, p));
}

struct Extent {
  Point lo = Point::Constant(std::numeric_limits<double>::infinity());
  Point hi = Point::Constant(-std::numeric_limits<double>::infinity());
  void grow(const Point& center, double k) {
    // Support of Psi_k(c^{-1} p): |w_x|,|w_y| <= 1/k, |w_t| <= 1/k^2,
    // sheared in t by 2(|c_x|+|c_y|)/k under left translation.
    const double hxy = 1.0 / k;
    const double ht = 1.0 / (k * k) +
                      2.0 * (std::abs(center.x()) + std::abs(center.y())) / k;
    lo = lo.cwiseMin(center - Point(hxy, hxy, ht));
    hi = hi.cwiseMax(center + Point(hxy, hxy, ht));
  }
};

}  // namespace

Measure regularize(const Measure& mu, double k, const QuadratureConfig& cfg) {
  if (!(k > 0.0)) throw ConfigError("regularize: k must be positive");
  Extent ext;
  for (const auto& a : mu.atoms) ext.grow(a.location, k);
  if (mu.density) {
    const auto& d = *mu.density;
    for (int it = 0; it < d.dims.z(); ++it)
      for (int iy = 0; iy < d.dims.y(); ++iy)
        for (int ix = 0; ix < d.dims.x(); ++ix)
          if (d.values[d.index(ix, iy, it)] != 0.0) ext.grow(d.center(ix, iy, it), k);
  }
  if (!(ext.lo.x() < ext.hi.x()))
    throw EvaluationError("regularize: measure has empty support");

  const int n = std::max(8, cfg.grid_resolution);
  DensityGrid out;
  out.dims = Eigen::Vector3i(n, n, n);
  out.spacing = (ext.hi - ext.lo) / n;
  out.origin = ext.lo + out.spacing / 2;
  out.values.assign(static_cast<std::size_t>(n) * n * n, 0.0);

  auto psi = [&](const Point& p) {
    double v = 0.0;
    for (const auto& a : mu.atoms) v += a.mass * mollifier_k(mul(inv(a.location), p), k);
    if (mu.density) {
      const auto& d = *mu.density;
      const double cv = d.cell_volume();
      for (int it = 0; it < d.dims.z(); ++it)
        for (int iy = 0; iy < d.dims.y(); ++iy)
          for (int ix = 0; ix < d.dims.x(); ++ix) {
            const double w = d.values[d.index(ix, iy, it)];
            if (w != 0.0)
              v += w * cv * mollifier_k(mul(inv(d.center(ix, iy, it)), p), k);
          }
    }
    return v;
  };

  for (int it = 0; it < n; ++it)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        out.values[out.index(ix, iy, it)] = psi(out.center(ix, iy, it));

  Measure res;
  res.density = std::move(out);
  return res;
}

double exp_scaled(const PotentialValue& v, double beta) {
  if (v.inf_sign != 0) {
    const int s = beta >= 0 ? v.inf_sign : -v.inf_sign;
    return s > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return std::exp(beta * v.value);
}

PotentialValue eval_potential(const LogPotential& pot, const Point& p) {
  const Point P = pot.precompose ? pot.precompose(p) : p;
  PotentialValue out;
  for (const auto& a : pot.measure.atoms) {
    const double g4 = gauge4(mul(inv(a.location), P));
    if (g4 < 1e-100) {
      // Sitting on an atom: -mass * log 0.
      out.inf_sign = a.mass > 0 ? +1 : -1;
      return out;
    }
    out.value -= a.mass * 0.25 * std::log(g4);
  }
  if (pot.measure.density) {
    const auto& d = *pot.measure.density;
    const double cv = d.cell_volume();
    double acc = 0.0;
    for (int it = 0; it < d.dims.z(); ++it)
      for (int iy = 0; iy < d.dims.y(); ++iy)
        for (int ix = 0; ix < d.dims.x(); ++ix) {
          const double w = d.values[d.index(ix, iy, it)];
          if (w == 0.0) continue;
          const double g4 = gauge4(mul(inv(d.center(ix, iy, it)), P));
          // Midpoint quadrature of an integrable log singularity; clamp
          // the cell where P coincides with a node to the cell scale.
          const double floor4 = std::pow(0.25 * d.spacing.minCoeff(), 4.0);
          acc -= w * cv * 0.25 * std::log(std::max(g4, floor4));
        }
    out.value += acc;
  }
  if (!std::isfinite(out.value))
    throw EvaluationError("eval_potential: non-finite potential value");
  return out;
}

std::string measure_to_json(const Measure& mu) {
  nlohmann::ordered_json j;
  j["atoms"] = nlohmann::ordered_json::array();
  for (const auto& a : mu.atoms)
    j["atoms"].push_back({{"location", {a.location.x(), a.location.y(), a.location.z()}},
                          {"mass", a.mass}});
  if (mu.density) {
    const auto& d = *mu.density;
    j["density"] = {{"origin", {d.origin.x(), d.origin.y(), d.origin.z()}},
                    {"spacing", {d.spacing.x(), d.spacing.y(), d.spacing.z()}},
                    {"dims", {d.dims.x(), d.dims.y(), d.dims.z()}},
                    {"values", d.values}};
  }
  return j.dump(2);
}

Measure measure_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("measure: bad JSON: ") + e.what());
  }
  Measure mu;
  try {
    for (const auto& ja : j.value("atoms", nlohmann::json::array())) {
      Atom a;
      a.location = Point(ja.at("location").at(0).get<double>(),
                         ja.at("location").at(1).get<double>(),
                         ja.at("location").at(2).get<double>());
      a.mass = ja.at("mass").get<double>();
      mu.atoms.push_back(a);
    }
    if (j.contains("density")) {
      const auto& jd = j.at("density");
      DensityGrid d;
      d.origin = Point(jd.at("origin").at(0).get<double>(),
                       jd.at("origin").at(1).get<double>(),
                       jd.at("origin").at(2).get<double>());
      d.spacing = Point(jd.at("spacing").at(0).get<double>(),
                        jd.at("spacing").at(1).get<double>(),
                        jd.at("spacing").at(2).get<double>());
      d.dims = Eigen::Vector3i(jd.at("dims").at(0).get<int>(),
                               jd.at("dims").at(1).get<int>(),
                               jd.at("dims").at(2).get<int>());
      d.values = jd.at("values").get<std::vector<double>>();
      if (d.values.size() != static_cast<std::size_t>(d.dims.prod()))
        throw ConfigError("measure: density values do not match dims");
      if (d.spacing.minCoeff() <= 0.0)
        throw ConfigError("measure: density spacing must be positive");
      mu.density = std::move(d);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("measure: schema violation: ") + e.what());
  }
  return mu;
}

}  // namespace heis
