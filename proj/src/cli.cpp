#include "heis/cli.hpp"

#include "heis/errors.hpp"
#include "heis/iterate.hpp"
#include "heis/metric.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>

namespace heis {

namespace {

Eigen::Vector3i jdims(const Json& j, const std::string& key,
                      const Eigen::Vector3i& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_array() || v.size() != 3)
    throw ConfigError("expected [nx, ny, nt] for '" + key + "'");
  Eigen::Vector3i out;
  for (int k = 0; k < 3; ++k) {
    if (!v[k].is_number_integer())
      throw ConfigError("expected [nx, ny, nt] for '" + key + "'");
    out[k] = v[k].get<int>();
  }
  return out;
}

PotentialField potential_from_json(const Json& spec, const QuadratureConfig& quad) {
  if (!spec.is_object()) throw ConfigError("potential spec must be an object");
  std::string kind = jstr(spec, "kind", "");
  if (kind == "constant") return constant_potential(jnum(spec, "value", 1.0));
  if (kind == "coordinate") {
    std::string axis = jstr(spec, "axis", "t");
    if (axis == "x") return coordinate_potential(Direction::X);
    if (axis == "y") return coordinate_potential(Direction::Y);
    if (axis == "t") return coordinate_potential(Direction::T);
    throw ConfigError("coordinate axis must be x, y or t");
  }
  if (kind == "affine")
    return affine_contact_potential(jnum(spec, "c1", 0.0), jnum(spec, "c2", 0.0),
                                    jnum(spec, "c3", 0.0));
  if (kind == "radial_stretch") return radial_stretch_potential();
  if (kind == "truncated_stretch")
    return truncate_potential(radial_stretch_potential(), jnum(spec, "level", 8.0),
                              quad);
  if (kind == "gauge_bump") return gauge_bump_potential(jnum(spec, "width", 2.0));
  if (kind == "constructed") {
    if (!spec.contains("measure"))
      throw ConfigError("constructed potential needs a measure");
    Measure mu = measure_from_json(spec["measure"].dump());
    double k = jnum(spec, "mollify_k", 0.0);
    if (k > 0.0) mu = regularize(mu, k, quad);
    return build_contact_potential(identity_bundle(), mu, quad).field;
  }
  throw ConfigError("unknown potential kind '" + kind + "'");
}

Json default_potential_spec() {
  Json j;
  j["kind"] = "affine";
  j["c1"] = 1.0;
  j["c2"] = 0.0;
  j["c3"] = 0.0;
  return j;
}

Point rand_box_point(std::mt19937_64& rng, double xy, double t) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Point(xy * u(rng), xy * u(rng), t * u(rng));
}

// ---------------------------------------------------------------- verify

struct Section {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  std::string detail;
};

Section check_group_ops(const QuadratureConfig& quad, int cases) {
  Section s{"group-ops", true, 0.0, ""};
  auto rng = make_rng(quad, 0x76657269ULL);
  for (int i = 0; i < cases; ++i) {
    Point p = rand_box_point(rng, 2.0, 4.0);
    Point q = rand_box_point(rng, 2.0, 4.0);
    Point r = rand_box_point(rng, 2.0, 4.0);
    double res = (mul(mul(p, q), r) - mul(p, mul(q, r))).cwiseAbs().maxCoeff();
    res = std::max(res, mul(p, inv(p)).cwiseAbs().maxCoeff());
    res = std::max(res, (mul(p, Point(Point::Zero())) - p).cwiseAbs().maxCoeff());
    res = std::max(res, std::abs(dist(mul(r, p), mul(r, q)) - dist(p, q)));
    double sc = 0.75;
    res = std::max(res, std::abs(gauge(dilate(sc, p)) - sc * gauge(p)));
    res = std::max(res, std::abs(dist(dilate(sc, p), dilate(sc, q)) - sc * dist(p, q)));
    s.worst = std::max(s.worst, res);
  }
  s.passed = s.worst < 1e-9;
  return s;
}

Section check_triangle(const QuadratureConfig& quad, int cases) {
  Section s{"gauge-triangle", true, 0.0, ""};
  auto rng = make_rng(quad, 0x74726961ULL);
  for (int i = 0; i < cases; ++i) {
    Point p = rand_box_point(rng, 2.0, 4.0);
    Point q = rand_box_point(rng, 2.0, 4.0);
    Point r = rand_box_point(rng, 2.0, 4.0);
    s.worst = std::max(s.worst, dist(p, q) - dist(p, r) - dist(r, q));
  }
  s.passed = s.worst < 1e-12;
  return s;
}

Section check_ball_volume(const QuadratureConfig& quad) {
  Section s{"ball-volume", true, 0.0, ""};
  QuadratureConfig cfg = quad;
  cfg.mc_samples = std::max(cfg.mc_samples, 200000);
  double v = ball_volume(Point::Zero(), 1.0, cfg);
  s.worst = std::abs(v / unit_ball_volume() - 1.0);
  s.passed = s.worst < 0.02;
  s.detail = "measured " + format_double(v);
  return s;
}

Section check_truncation(const QuadratureConfig&) {
  Section s{"truncation-profile", true, 0.0, ""};
  for (double l : {3.0, 6.0}) {
    double prev = 1.0;
    for (double lg = std::log(l) + 1e-4; lg < std::log(1e8); lg += 0.05) {
      double r = std::exp(lg);
      double g = truncation_profile(r, l);
      if (g < -1e-15 || g > 1.0 + 1e-15 || g > prev + 1e-12) s.passed = false;
      prev = g;
      double bound = 1.875 / (l * r * std::log(r));
      double d = truncation_profile_derivative(r, l);
      double excess = std::abs(d) - bound * (1.0 + 1e-9);
      s.worst = std::max(s.worst, excess);
      double h = r * 1e-6;
      double fd = (truncation_profile(r + h, l) - truncation_profile(r - h, l)) /
                  (2.0 * h);
      if (std::abs(fd - d) > 1e-6 * (1.0 + std::abs(d)) + 1e-12) s.passed = false;
    }
  }
  if (s.worst > 0.0) s.passed = false;
  return s;
}

Section check_strain_identity(const QuadratureConfig& quad) {
  Section s{"strain-identity", true, 0.0, ""};
  Box region{Point(-1.2, -1.2, -1.44), Point(1.2, 1.2, 1.44)};
  Eigen::Vector3i dims(5, 5, 5);
  PotentialField tests[] = {affine_contact_potential(0.3, -0.2, 0.5),
                            gauge_bump_potential(2.0),
                            coordinate_potential(Direction::T)};
  for (const auto& phi : tests) {
    StrainReport rep = strain_report(phi, region, dims, quad);
    s.worst = std::max(s.worst, rep.max_identity_residual);
  }
  s.passed = s.worst < 1e-3;
  return s;
}

Section check_flow_exactness(const QuadratureConfig& quad) {
  Section s{"flow-exactness", true, 0.0, ""};
  Point p(0.3, -0.4, 0.2);
  {
    ContactField v{constant_potential(1.0), quad};
    Point end = integrate(v, p, 0.7).end();
    s.worst = std::max(s.worst, dist(end, mul(p, Point(0.0, 0.0, 0.7))));
  }
  {
    double c1 = 0.4, c2 = -0.3, c3 = 0.2, time = 0.8;
    ContactField v{affine_contact_potential(c1, c2, c3), quad};
    Point end = integrate(v, p, time).end();
    Point expect = mul(Point(time * c2, time * c3, time * c1), p);
    s.worst = std::max(s.worst, dist(end, expect));
  }
  {
    ContactField v{gauge_bump_potential(2.0), quad};
    FlowOptions opt;
    opt.step = 1.0 / 128;
    Point mid = integrate(v, p, 0.5, opt).end();
    Point back = integrate(v, mid, -0.5, opt).end();
    s.worst = std::max(s.worst, dist(back, p));
  }
  s.passed = s.worst < 1e-6;
  return s;
}

Section check_polar_cartesian(const QuadratureConfig& quad) {
  Section s{"polar-cartesian", true, 0.0, ""};
  double exact = xi0_integral();
  double polar = polar_integrate(xi0, quad, RadialRange{0.75});
  Box box = ball_box(Point::Zero(), 0.5);
  QuadratureConfig cfg = quad;
  cfg.mc_samples = std::max(cfg.mc_samples, 100000);
  double cart = cartesian_integrate(xi0, box, cfg);
  s.worst = std::max(std::abs(polar / exact - 1.0), std::abs(cart / exact - 1.0));
  s.passed = s.worst < 0.05;
  s.detail = "polar " + format_double(polar) + ", cartesian " + format_double(cart) +
             ", radial " + format_double(exact);
  return s;
}

int cmd_verify(const Json& config, const std::string& out_dir) {
  QuadratureConfig quad = quad_from_json(config);
  int cases = jint(config, "cases", 5000);
  std::string filter = jstr(config, "filter", "");

  std::vector<std::pair<std::string, std::function<Section()>>> all;
  all.emplace_back("group-ops", [&] { return check_group_ops(quad, cases); });
  all.emplace_back("gauge-triangle", [&] { return check_triangle(quad, cases); });
  all.emplace_back("ball-volume", [&] { return check_ball_volume(quad); });
  all.emplace_back("truncation-profile", [&] { return check_truncation(quad); });
  all.emplace_back("strain-identity", [&] { return check_strain_identity(quad); });
  all.emplace_back("flow-exactness", [&] { return check_flow_exactness(quad); });
  all.emplace_back("polar-cartesian", [&] { return check_polar_cartesian(quad); });

  Json rep = report_envelope("verify", config);
  Json sections = Json::array();
  bool all_passed = true;
  int ran = 0;
  for (auto& [name, fn] : all) {
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    ++ran;
    Section s;
    try {
      s = fn();
    } catch (const std::exception& e) {
      s.name = name;
      s.passed = false;
      s.detail = e.what();
    }
    all_passed = all_passed && s.passed;
    std::cout << (s.passed ? "ok   " : "FAIL ") << s.name << "  worst "
              << format_double(s.worst) << "\n";
    Json js;
    js["name"] = s.name;
    js["passed"] = s.passed;
    js["worst"] = s.worst;
    if (!s.detail.empty()) js["detail"] = s.detail;
    sections.push_back(js);
  }
  if (ran == 0) throw ConfigError("filter matched no verify sections");
  rep["results"]["sections"] = sections;
  rep["results"]["passed"] = all_passed;
  write_json(rep, out_dir + "/verify_report.json");
  return all_passed ? 0 : 1;
}

// ------------------------------------------------------------------ flow

int cmd_flow(const Json& config, const std::string& out_dir) {
  QuadratureConfig quad = quad_from_json(config);
  Json pspec =
      config.contains("potential") ? config["potential"] : default_potential_spec();
  ContactField v{potential_from_json(pspec, quad), quad};
  Point start = jpoint(config, "start", Point(1.0, 0.0, 0.0));
  double time = jnum(config, "time", 1.0);
  FlowOptions opt;
  opt.step = jnum(config, "step", 0.0);
  opt.escape_radius = jnum(config, "escape_radius", 1e9);

  FlowWithDifferential fw = flow_with_differential(v, start, time, opt);
  double logj = flow_log_jacobian(v, start, time, opt);
  const Eigen::Matrix2d& M = fw.end_differential();

  CsvTable table;
  table.header = {"sigma", "x", "y", "t", "m11", "m12", "m21", "m22"};
  for (std::size_t i = 0; i < fw.path.points.size(); ++i) {
    const Point& p = fw.path.points[i];
    const Eigen::Matrix2d& D = fw.differentials[i];
    table.rows.push_back(
        {fw.path.times[i], p.x(), p.y(), p.z(), D(0, 0), D(0, 1), D(1, 0), D(1, 1)});
  }

  Json rep = report_envelope("flow", config);
  Json& res = rep["results"];
  res["end"] = point_json(fw.path.points.back());
  res["end_differential"] =
      Json::array({Json::array({M(0, 0), M(0, 1)}), Json::array({M(1, 0), M(1, 1)})});
  res["log_jacobian_divergence"] = logj;
  res["jacobian_divergence"] = std::exp(logj);
  double det = M.determinant();
  res["jacobian_determinant_route"] = det * det;
  res["steps"] = static_cast<int>(fw.path.points.size()) - 1;
  if (jbool(config, "volume_jacobian", false)) {
    auto field = std::make_shared<const ContactField>(v);
    VolumeJacobianReport vol =
        jacobian_volume(ComposedMap::flow(field, time, opt), start,
                        {0.1, 0.05, 0.025, 0.0125}, quad);
    Json jv;
    jv["radii"] = vol.radii;
    jv["ratios"] = vol.ratios;
    jv["value"] = vol.value;
    jv["converged"] = vol.converged;
    res["jacobian_volume_route"] = jv;
  }
  write_json(rep, out_dir + "/flow_report.json");
  write_csv(table, out_dir + "/trajectory.csv");
  return 0;
}

// -------------------------------------------------------------- potential

int cmd_potential(const Json& config, const std::string& out_dir) {
  QuadratureConfig quad = quad_from_json(config);
  Json pspec =
      config.contains("potential") ? config["potential"] : default_potential_spec();
  PotentialField phi = potential_from_json(pspec, quad);
  double extent = jnum(config, "extent", 1.5);
  int nodes = jint(config, "nodes", 9);
  if (nodes < 2 || !(extent > 0.0)) throw ConfigError("bad strain sweep region");
  Box region{Point(-extent, -extent, -extent * extent),
             Point(extent, extent, extent * extent)};
  Eigen::Vector3i dims(nodes, nodes, nodes);
  StrainReport srep = strain_report(phi, region, dims, quad);

  ContactField v{phi, quad};
  CsvTable table;
  table.header = {"x", "y", "t", "zz_re", "zz_im", "strain_fro", "residual"};
  for (int it = 0; it < nodes; ++it)
    for (int iy = 0; iy < nodes; ++iy)
      for (int ix = 0; ix < nodes; ++ix) {
        Point p(region.lo.x() + (region.hi.x() - region.lo.x()) * ix / (nodes - 1),
                region.lo.y() + (region.hi.y() - region.lo.y()) * iy / (nodes - 1),
                region.lo.z() + (region.hi.z() - region.lo.z()) * it / (nodes - 1));
        std::complex<double> z = zz(phi, p, quad);
        double fro = strain_matrix(v, p).norm();
        double resid = std::abs(std::sqrt(2.0) * std::abs(z) - 2.0 * fro);
        table.rows.push_back({p.x(), p.y(), p.z(), z.real(), z.imag(), fro, resid});
      }

  Json rep = report_envelope("potential", config);
  Json& res = rep["results"];
  res["dilatation_rate"] = srep.c;
  res["worst_point"] = point_json(srep.worst_point);
  res["max_identity_residual"] = srep.max_identity_residual;
  res["grid"] = Json::array({dims.x(), dims.y(), dims.z()});
  write_json(rep, out_dir + "/potential_report.json");
  write_csv(table, out_dir + "/strain_grid.csv");
  return 0;
}

// -------------------------------------------------------------- construct

int cmd_construct(const Json& config, const std::string& out_dir) {
  QuadratureConfig quad = quad_from_json(config);
  if (!config.contains("measure")) throw ConfigError("construct needs a measure");
  Measure raw = measure_from_json(config["measure"].dump());
  double k = jnum(config, "mollify_k", 0.0);
  Measure psi = k > 0.0 ? regularize(raw, k, quad) : raw;

  ConstructedPotential built = build_contact_potential(identity_bundle(), psi, quad);
  ContactField v{built.field, quad};
  double origin_norm = v.components(Point::Zero()).cwiseAbs().maxCoeff();

  Point center = raw.atoms.empty()
                     ? (raw.density ? raw.density->origin : Point(Point::Zero()))
                     : raw.atoms.front().location;
  center = jpoint(config, "lambda_center", center);
  int scan = jint(config, "scan_points", 24);
  double radius = jnum(config, "scan_radius", 1.5);

  ConstructSamples samples = make_construct_samples(quad);
  JacobianField ident = identity_jacobian();
  double c0 = std::pow(xi0_integral(), 0.25);
  double max_dev = 0.0;
  CsvTable table;
  table.header = {"px", "py", "pt", "d", "lambda", "ratio"};
  for (const Point& w : halton_ball_grid(radius, scan, {}, 0.0)) {
    if (gauge(w) < 1e-3) continue;
    Point p = mul(center, w);
    double d = dist(p, center);
    double lam = lambda_eval(ident, p, center, samples, false).value;
    double ratio = lam / d;
    max_dev = std::max(max_dev, std::abs(ratio / c0 - 1.0));
    table.rows.push_back({p.x(), p.y(), p.z(), d, lam, ratio});
  }

  Json rep = report_envelope("construct", config);
  Json& res = rep["results"];
  res["field_at_origin"] = point_json(v.components(Point::Zero()));
  res["field_origin_norm"] = origin_norm;
  res["phi1_origin_components"] = Json::array({built.c1, built.c2, built.c3});
  res["lambda_ratio_expected"] = c0;
  res["lambda_ratio_max_rel_dev"] = max_dev;
  res["psi_total_variation"] = total_variation(psi);
  write_json(rep, out_dir + "/construct_report.json");
  write_csv(table, out_dir + "/construct_scan.csv");
  return 0;
}

// ---------------------------------------------------------------- iterate

int cmd_iterate(const Json& config, const std::string& out_dir) {
  IterationConfig icfg;
  icfg.quad.seed = juint(config, "seed", icfg.quad.seed);
  icfg.quad.mc_samples = jint(config, "mc_samples", icfg.quad.mc_samples);
  icfg.quad.grid_resolution = jint(config, "grid_resolution", icfg.quad.grid_resolution);
  icfg.quad.fd_step = jnum(config, "fd_step", icfg.quad.fd_step);

  Measure raw;
  if (config.contains("measure")) {
    raw = measure_from_json(config["measure"].dump());
  } else {
    raw.atoms.push_back({Point(0.5, 0.0, 0.0), 0.1});
  }
  for (const Atom& a : raw.atoms) icfg.exclusions.push_back(a.location);
  double k = jnum(config, "mollify_k", 2.0);
  icfg.psi = k > 0.0 ? regularize(raw, k, icfg.quad) : raw;

  if (config.contains("m_values")) {
    icfg.m_values.clear();
    for (const auto& el : config["m_values"]) {
      if (!el.is_number_integer()) throw ConfigError("m_values must be integers");
      icfg.m_values.push_back(el.get<int>());
    }
    if (icfg.m_values.empty()) throw ConfigError("m_values must be nonempty");
  }
  icfg.grid_points = jint(config, "grid_points", icfg.grid_points);
  icfg.grid_radius = jnum(config, "grid_radius", icfg.grid_radius);
  icfg.exclusion_radius = jnum(config, "exclusion_radius", icfg.exclusion_radius);
  icfg.steps_per_level = jint(config, "steps_per_level", icfg.steps_per_level);
  icfg.phi_dims = jdims(config, "phi_dims", icfg.phi_dims);
  icfg.jac_dims = jdims(config, "jac_dims", icfg.jac_dims);
  icfg.p0 = jpoint(config, "p0", icfg.p0);

  IterationReport report = iterate(icfg);

  QuadratureConfig wquad = icfg.quad;
  wquad.mc_samples = std::max(2048, wquad.mc_samples);
  Box wbox = ball_box(Point::Zero(), 0.5);

  Json rep = report_envelope("iterate", config);
  Json& res = rep["results"];
  Json runs = Json::array();
  CsvTable table;
  table.header = {"m", "px", "py", "pt", "ratio"};
  double k_max = 0.0;
  for (const IterationRun& run : report.runs) {
    Json jr;
    jr["m"] = run.m;
    jr["c_m"] = run.c_m;
    jr["rho"] = run.rho;
    jr["K_steps"] = run.K_steps;
    jr["normalization_error"] = run.normalization_error;
    jr["spread"] = run.spread;
    jr["grid_points"] = static_cast<int>(run.grid.size());
    jr["weak_jacobian_integral"] = weak_jacobian_integral(run.map, xi0, wbox, wquad);
    runs.push_back(jr);
    for (double ks : run.K_steps) k_max = std::max(k_max, ks);
    for (std::size_t i = 0; i < run.grid.size(); ++i)
      table.rows.push_back({static_cast<double>(run.m), run.grid[i].x(),
                            run.grid[i].y(), run.grid[i].z(), run.ratios[i]});
  }
  res["runs"] = runs;

  int rc = 0;
  Json budget;
  double K = jnum(config, "budget_K", std::max(k_max, 1.0));
  double eps = budget_epsilon(K);
  budget["K"] = K;
  budget["epsilon"] = eps;
  double eps_prime = jnum(config, "eps_prime", 0.5 * eps);
  budget["eps_prime"] = eps_prime;
  try {
    budget["bound"] = dilatation_budget(K, eps_prime);
    budget["diverged"] = false;
  } catch (const DivergenceError& e) {
    budget["diverged"] = true;
    budget["detail"] = e.what();
    rc = 1;
  }
  res["budget"] = budget;

  write_json(rep, out_dir + "/iterate_report.json");
  write_csv(table, out_dir + "/iterate_ratios.csv");
  return rc;
}

// ----------------------------------------------------------------- metric

int cmd_metric(const Json& config, const std::string& out_dir) {
  QuadratureConfig quad = quad_from_json(config);
  ComposedMap F = ComposedMap::identity();
  WeightField omega;

  Json wspec = config.contains("weight") ? config["weight"]
                                         : Json{{"kind", "constant"}, {"value", 1.0}};
  std::string kind = jstr(wspec, "kind", "constant");
  if (kind == "constant") {
    double val = jnum(wspec, "value", 1.0);
    if (!(val >= 0.0)) throw ConfigError("constant weight must be nonnegative");
    omega = [val](const Point&) { return val; };
  } else if (kind == "flow_jacobian") {
    Json pspec =
        wspec.contains("potential") ? wspec["potential"] : default_potential_spec();
    auto field = std::make_shared<const ContactField>(
        ContactField{potential_from_json(pspec, quad), quad});
    double time = jnum(wspec, "time", 0.5);
    FlowOptions opt;
    opt.step = std::abs(time) / std::max(1, jint(wspec, "flow_steps", 16));
    F = ComposedMap::flow(field, time, opt);
    double R = jnum(wspec, "table_radius", 4.0);
    Box box{Point(-R, -R, -R * R), Point(R, R, R * R)};
    auto logj = tabulate_log_jacobian(F, box, jdims(wspec, "dims", {17, 17, 33}));
    omega = [logj](const Point& p) { return std::exp(logj->value(p)); };
  } else {
    throw ConfigError("unknown weight kind '" + kind + "'");
  }

  SuiteConfig scfg;
  scfg.quad = quad;
  scfg.pairs = jint(config, "pairs", 50);
  scfg.cloud_radius = jnum(config, "cloud_radius", 1.5);
  scfg.min_separation = jnum(config, "min_separation", 0.05);
  MetricSuite suite = comparability_suite(F, omega, scfg);

  DoublingReport doubling =
      doubling_ladder(omega, jpoint(config, "doubling_center", Point::Zero()),
                      jnum(config, "doubling_r0", 0.25),
                      jint(config, "doubling_rungs", 4), quad);

  std::vector<int> subs{2, 4, 8, 16, 32};
  if (config.contains("subdivisions")) {
    subs.clear();
    for (const auto& el : config["subdivisions"]) {
      if (!el.is_number_integer()) throw ConfigError("subdivisions must be integers");
      subs.push_back(el.get<int>());
    }
  }
  LengthScalingReport scaling = vertical_length_scaling(
      omega, jpoint(config, "vertical_base", Point::Zero()),
      jnum(config, "vertical_height", 1.0), subs, quad);

  GeodesicResult vertical = cc_distance(Point::Zero(), Point(0.0, 0.0, 1.0), {}, quad);

  CsvTable table;
  table.header = {"px", "py", "pt", "qx", "qy", "qt", "rho_f", "rho_w", "d_w"};
  for (const MetricPair& pr : suite.pairs)
    table.rows.push_back({pr.p.x(), pr.p.y(), pr.p.z(), pr.q.x(), pr.q.y(), pr.q.z(),
                          pr.rho_f, pr.rho_w, pr.d_w});

  Json rep = report_envelope("metric", config);
  Json& res = rep["results"];
  res["pairs"] = static_cast<int>(suite.pairs.size());
  res["pushforward_spread"] = suite.pushforward_spread;
  res["deformation_spread"] = suite.deformation_spread;
  Json jd;
  jd["radii"] = doubling.radii;
  jd["masses"] = doubling.masses;
  jd["quotients"] = doubling.quotients;
  jd["max_quotient"] = doubling.max_quotient;
  res["doubling"] = jd;
  Json js;
  js["subdivisions"] = scaling.subdivisions;
  js["sums"] = scaling.sums;
  js["slope"] = scaling.slope;
  res["vertical_scaling"] = js;
  res["cc_vertical"] = vertical.length;
  res["cc_vertical_expected"] = std::sqrt(M_PI);
  write_json(rep, out_dir + "/metric_report.json");
  write_csv(table, out_dir + "/metric_pairs.csv");
  return 0;
}

}  // namespace

int run_command(const std::string& kind, Json config, const std::string& out_dir) {
  if (!config.is_object()) throw ConfigError("config root must be an object");
  if (kind == "verify") return cmd_verify(config, out_dir);
  if (kind == "flow") return cmd_flow(config, out_dir);
  if (kind == "potential") return cmd_potential(config, out_dir);
  if (kind == "construct") return cmd_construct(config, out_dir);
  if (kind == "iterate") return cmd_iterate(config, out_dir);
  if (kind == "metric") return cmd_metric(config, out_dir);
  throw ConfigError("unknown command '" + kind + "'");
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Quasiconformal flow toolkit for the sub-Riemannian Heisenberg group"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", filter;
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> kinds[] = {
      {"verify", "run the built-in invariant checks"},
      {"flow", "integrate a contact flow and its differential"},
      {"potential", "sweep strain and dilatation rate of a potential"},
      {"construct", "build the adapted contact potential of a measure"},
      {"iterate", "run the comparability iteration"},
      {"metric", "compare path, weighted and deformation metrics"}};
  for (const auto& [name, desc] : kinds) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "override the RNG seed");
    sub->add_option("--out", out_dir, "output directory for artifacts");
    sub->add_option("--filter", filter, "restrict verify sections by substring");
  }

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string kind = app.get_subcommands().front()->get_name();
  bool seed_set = false;
  for (CLI::App* sub : app.get_subcommands())
    if (sub->count("--seed") > 0) seed_set = true;

  try {
    Json config = config_path.empty() ? Json::object() : load_config(config_path);
    if (!config.is_object()) throw ConfigError("config root must be an object");
    if (seed_set) config["seed"] = seed;
    if (!filter.empty()) config["filter"] = filter;
    std::filesystem::create_directories(out_dir);
    return run_command(kind, std::move(config), out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace heis
