#include "heis/reports.hpp"

#include "heis/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace heis {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_fingerprint(const Json& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

Json module_versions() {
  Json v;
  v["group-core"] = "1.0.0";
  v["quadrature"] = "1.0.0";
  v["potential"] = "1.0.0";
  v["contact-field"] = "1.0.0";
  v["flow-engine"] = "1.0.0";
  v["construct"] = "1.0.0";
  v["iterate"] = "1.0.0";
  v["metric-lab"] = "1.0.0";
  v["cli"] = "1.0.0";
  return v;
}

Json report_envelope(const std::string& kind, const Json& config) {
  Json r;
  r["schema"] = "heisflow/" + kind + "-report/1";
  r["config_fingerprint"] = config_fingerprint(config);
  r["modules"] = module_versions();
  r["config"] = config;
  r["results"] = Json::object();
  return r;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json point_json(const Point& p) { return Json::array({p.x(), p.y(), p.z()}); }

std::string csv_to_string(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw EvaluationError("csv row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f << text;
  if (!f) throw ConfigError("write failed: " + path);
}

void write_csv(const CsvTable& table, const std::string& path) {
  write_text(path, csv_to_string(table));
}

void write_json(const Json& j, const std::string& path) {
  write_text(path, j.dump(2) + "\n");
}

Json parse_json(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("malformed JSON");
  return j;
}

Json load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_json(ss.str());
  } catch (const ConfigError&) {
    throw ConfigError("malformed JSON in " + path);
  }
}

namespace {

const Json* find(const Json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError("config node is not an object");
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

}  // namespace

double jnum(const Json& j, const std::string& key, double fallback) {
  const Json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError("expected number for '" + key + "'");
  return v->get<double>();
}

int jint(const Json& j, const std::string& key, int fallback) {
  const Json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError("expected integer for '" + key + "'");
  return v->get<int>();
}

std::uint64_t juint(const Json& j, const std::string& key, std::uint64_t fallback) {
  const Json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number_unsigned() && !v->is_number_integer())
    throw ConfigError("expected unsigned integer for '" + key + "'");
  if (v->is_number_integer() && v->get<long long>() < 0)
    throw ConfigError("expected unsigned integer for '" + key + "'");
  return v->get<std::uint64_t>();
}

std::string jstr(const Json& j, const std::string& key, const std::string& fallback) {
  const Json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError("expected string for '" + key + "'");
  return v->get<std::string>();
}

bool jbool(const Json& j, const std::string& key, bool fallback) {
  const Json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError("expected boolean for '" + key + "'");
  return v->get<bool>();
}

Point jpoint(const Json& j, const std::string& key, const Point& fallback) {
  const Json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_array() || v->size() != 3 || !(*v)[0].is_number() ||
      !(*v)[1].is_number() || !(*v)[2].is_number())
    throw ConfigError("expected [x, y, t] for '" + key + "'");
  return Point((*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>());
}

QuadratureConfig quad_from_json(const Json& j) {
  QuadratureConfig cfg;
  cfg.seed = juint(j, "seed", cfg.seed);
  cfg.mc_samples = jint(j, "mc_samples", cfg.mc_samples);
  cfg.grid_resolution = jint(j, "grid_resolution", cfg.grid_resolution);
  cfg.fd_step = jnum(j, "fd_step", cfg.fd_step);
  if (cfg.mc_samples < 1 || cfg.grid_resolution < 2 || !(cfg.fd_step > 0.0))
    throw ConfigError("invalid quadrature settings");
  return cfg;
}

Json quad_to_json(const QuadratureConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  j["mc_samples"] = cfg.mc_samples;
  j["grid_resolution"] = cfg.grid_resolution;
  j["fd_step"] = cfg.fd_step;
  return j;
}

}  // namespace heis
