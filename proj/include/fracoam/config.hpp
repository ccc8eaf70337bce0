#pragma once

// Run configuration for the command-line tool: an INI-style file with the
// sections [plate_s], [plate_i] (spiral phase plate keys), [fiber],
// [crystal], [grid] and [run]. Every key is optional; missing keys keep the
// defaults below, unknown sections or keys are rejected.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fracoam/analyzer.hpp"
#include "fracoam/error.hpp"
#include "fracoam/field.hpp"
#include "fracoam/spp.hpp"
#include "fracoam/twophoton.hpp"

namespace fracoam {

struct GridSettings {
  int n_radial = 128;
  int n_azimuthal = 1024;
  double r_max_factor = 8.0;  ///< r_max in units of the fiber waist
};

struct RunConfig {
  SppSpec plate_s = SppSpec::ideal(3.5);
  SppSpec plate_i = SppSpec::ideal(-3.5);
  double fiber_waist = 1e-3;
  CrystalParams crystal;
  GridSettings grid;
  std::filesystem::path output_dir = "out";
  bool emit_plots = false;
  PumpProfile pump = PumpProfile::flat;

  [[nodiscard]] AnalyzerSpec signal() const { return {plate_s, fiber_waist}; }
  [[nodiscard]] AnalyzerSpec idler() const { return {plate_i, fiber_waist}; }

  [[nodiscard]] GridPtr make_polar_grid(double min_r_max_factor = 0.0, int min_radial = 0) const {
    return std::make_shared<const PolarGrid>(make_grid(std::max(grid.n_radial, min_radial), grid.n_azimuthal,
                                                       std::max(grid.r_max_factor, min_r_max_factor) * fiber_waist));
  }

  void validate() const {
    try {
      signal().validate();
      idler().validate();
      crystal.validate();
      (void)make_grid(grid.n_radial, grid.n_azimuthal, grid.r_max_factor * fiber_waist);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

inline std::string to_string(PumpProfile p) { return p == PumpProfile::flat ? "flat" : "gaussian"; }

inline PumpProfile pump_profile_from_string(const std::string& s) {
  if (s == "flat") return PumpProfile::flat;
  if (s == "gaussian") return PumpProfile::gaussian;
  throw ConfigError("unknown pump profile '" + s + "' (expected flat or gaussian)");
}

namespace detail {

inline double parse_number(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("[{}] {}: '{}' is not a number", section, key, v));
  }
}

inline int parse_int(const std::string& section, const std::string& key, const std::string& v) {
  const double d = parse_number(section, key, v);
  if (d != std::floor(d)) throw ConfigError(fmt::format("[{}] {}: '{}' is not an integer", section, key, v));
  return static_cast<int>(d);
}

inline bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("[{}] {}: '{}' is not a boolean", section, key, v));
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  AnomalyModel anomaly = AnomalyModel::opaque;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' outside of a section");
    std::map<std::string, std::string> kv;
    for (const auto& [key, value] : body) kv[key] = value.get_value<std::string>();

    if (section == "plate_s") {
      cfg.plate_s = spp_from_keys(kv, cfg.plate_s);
    } else if (section == "plate_i") {
      cfg.plate_i = spp_from_keys(kv, cfg.plate_i);
    } else if (section == "fiber") {
      for (const auto& [k, v] : kv) {
        if (k == "waist_um") cfg.fiber_waist = detail::parse_number(section, k, v) * 1e-6;
        else throw ConfigError("[fiber] unknown key '" + k + "'");
      }
    } else if (section == "crystal") {
      for (const auto& [k, v] : kv) {
        const double d = detail::parse_number(section, k, v);
        if (k == "pump_waist_um") cfg.crystal.pump_waist = d * 1e-6;
        else if (k == "crystal_length_mm") cfg.crystal.crystal_length = d * 1e-3;
        else if (k == "pump_wavelength_nm") cfg.crystal.pump_wavelength = d * 1e-9;
        else if (k == "pump_index") cfg.crystal.pump_index = d;
        else throw ConfigError("[crystal] unknown key '" + k + "'");
      }
    } else if (section == "grid") {
      for (const auto& [k, v] : kv) {
        if (k == "n_radial") cfg.grid.n_radial = detail::parse_int(section, k, v);
        else if (k == "n_azimuthal") cfg.grid.n_azimuthal = detail::parse_int(section, k, v);
        else if (k == "r_max_factor") cfg.grid.r_max_factor = detail::parse_number(section, k, v);
        else throw ConfigError("[grid] unknown key '" + k + "'");
      }
    } else if (section == "run") {
      for (const auto& [k, v] : kv) {
        if (k == "output_dir") cfg.output_dir = v;
        else if (k == "emit_plots") cfg.emit_plots = detail::parse_bool(section, k, v);
        else if (k == "anomaly_model") anomaly = anomaly_model_from_string(v);
        else if (k == "pump_profile") cfg.pump = pump_profile_from_string(v);
        else throw ConfigError("[run] unknown key '" + k + "'");
      }
    } else {
      throw ConfigError("config: unknown section [" + section + "]");
    }
  }
  cfg.plate_s.anomaly_model = anomaly;
  cfg.plate_i.anomaly_model = anomaly;
  cfg.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(in);
}

/// Fully resolved configuration in the same format parse_run_config reads.
inline void write_run_config(std::ostream& os, const RunConfig& cfg) {
  os << "[plate_s]\n";
  write_spp_block(os, cfg.plate_s);
  os << "\n[plate_i]\n";
  write_spp_block(os, cfg.plate_i);
  os << "\n[fiber]\n";
  fmt::print(os, "waist_um = {:.15g}\n", cfg.fiber_waist * 1e6);
  os << "\n[crystal]\n";
  fmt::print(os, "pump_waist_um = {:.15g}\n", cfg.crystal.pump_waist * 1e6);
  fmt::print(os, "crystal_length_mm = {:.15g}\n", cfg.crystal.crystal_length * 1e3);
  fmt::print(os, "pump_wavelength_nm = {:.15g}\n", cfg.crystal.pump_wavelength * 1e9);
  fmt::print(os, "pump_index = {:.15g}\n", cfg.crystal.pump_index);
  os << "\n[grid]\n";
  fmt::print(os, "n_radial = {}\n", cfg.grid.n_radial);
  fmt::print(os, "n_azimuthal = {}\n", cfg.grid.n_azimuthal);
  fmt::print(os, "r_max_factor = {:.15g}\n", cfg.grid.r_max_factor);
  os << "\n[run]\n";
  fmt::print(os, "output_dir = {}\n", cfg.output_dir.string());
  fmt::print(os, "emit_plots = {}\n", cfg.emit_plots);
  fmt::print(os, "anomaly_model = {}\n", to_string(cfg.plate_s.anomaly_model));
  fmt::print(os, "pump_profile = {}\n", to_string(cfg.pump));
}

}  // namespace fracoam
