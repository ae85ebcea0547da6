#pragma once

// Run artifacts with stable bytes: JSON reports wrapped in a schema /
// fingerprint envelope and RFC-4180 CSV tables with %.17g numbers, so a
// repeated run with the same config reproduces files bit for bit.

#include "heis/heisenberg.hpp"
#include "heis/quadrature.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace heis {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& bytes);
// 16 hex digits of fnv1a over the compact dump of the config.
std::string config_fingerprint(const Json& config);

// Component version table embedded in every report.
Json module_versions();

// {schema, config_fingerprint, modules, config, results:{}}.
Json report_envelope(const std::string& kind, const Json& config);

std::string format_double(double v);  // %.17g
Json point_json(const Point& p);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string csv_to_string(const CsvTable& table);
void write_text(const std::string& path, const std::string& text);
void write_csv(const CsvTable& table, const std::string& path);
void write_json(const Json& j, const std::string& path);

Json load_config(const std::string& path);
Json parse_json(const std::string& text);

// Typed config lookups; wrong types raise ConfigError with the key name.
double jnum(const Json& j, const std::string& key, double fallback);
int jint(const Json& j, const std::string& key, int fallback);
std::uint64_t juint(const Json& j, const std::string& key, std::uint64_t fallback);
std::string jstr(const Json& j, const std::string& key, const std::string& fallback);
bool jbool(const Json& j, const std::string& key, bool fallback);
Point jpoint(const Json& j, const std::string& key, const Point& fallback);

QuadratureConfig quad_from_json(const Json& j);
Json quad_to_json(const QuadratureConfig& cfg);

}  // namespace heis
