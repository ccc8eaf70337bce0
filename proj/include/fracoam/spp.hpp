#pragma once

// Spiral phase plate as a pointwise transmission function.
//
// Ideal plate: Phi(phi) = 2 pi l frac((phi - alpha) / 2 pi), a single radial
// step of height 2 pi l at azimuth alpha. Fabrication imperfections modelled:
//   * the step replaced by a linear ramp of azimuthal width W centred on alpha,
//   * a central anomaly of radius r_a (opaque disk, or scrambled phase),
//   * a smooth surface-height error screen with prescribed rms.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fracoam/error.hpp"
#include "fracoam/field.hpp"

namespace fracoam {

enum class AnomalyModel { opaque, scrambled_phase };

inline std::string to_string(AnomalyModel m) {
  return m == AnomalyModel::opaque ? "opaque" : "scrambled";
}

inline AnomalyModel anomaly_model_from_string(const std::string& s) {
  if (s == "opaque") return AnomalyModel::opaque;
  if (s == "scrambled" || s == "scrambled_phase") return AnomalyModel::scrambled_phase;
  throw ConfigError("unknown anomaly model '" + s + "' (expected opaque or scrambled)");
}

/// Refractive-index contrast n - n0 converting surface height error into
/// phase (moulded polymer in air).
inline constexpr double kIndexContrast = 0.5;
/// Radius of the plate region over which the height-error screen is defined
/// and its rms normalized.
inline constexpr double kScreenRadius = 2.5e-3;
/// Highest azimuthal and radial harmonic in the height-error screen.
inline constexpr int kScreenHarmonics = 16;

struct SppSpec {
  double step_index = 3.5;          ///< l, signed
  double orientation = 0.0;         ///< edge azimuth alpha [rad]
  double ramp_width = 0.0;          ///< azimuthal width of the step ramp [rad]
  double anomaly_radius = 0.0;      ///< [m]
  double surface_rms = 0.0;         ///< [m]
  double wavelength = 813e-9;       ///< [m]
  std::uint64_t roughness_seed = 0;
  AnomalyModel anomaly_model = AnomalyModel::opaque;

  [[nodiscard]] bool is_ideal() const noexcept {
    return ramp_width == 0.0 && anomaly_radius == 0.0 && surface_rms == 0.0;
  }

  void validate() const {
    if (!(ramp_width >= 0.0 && ramp_width < std::numbers::pi / 2))
      throw std::invalid_argument("SppSpec: ramp_width must lie in [0, pi/2)");
    if (!(anomaly_radius >= 0.0)) throw std::invalid_argument("SppSpec: anomaly_radius must be >= 0");
    if (!(surface_rms >= 0.0)) throw std::invalid_argument("SppSpec: surface_rms must be >= 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("SppSpec: wavelength must be positive");
    if (!std::isfinite(step_index) || !std::isfinite(orientation))
      throw std::invalid_argument("SppSpec: step_index and orientation must be finite");
  }

  static SppSpec ideal(double step, double alpha = 0.0) {
    SppSpec s;
    s.step_index = step;
    s.orientation = alpha;
    return s;
  }

  /// Moulded plates as characterized: 6 degree ramp, 300 um central
  /// anomaly, 15 nm rms height error, at 813 nm.
  static SppSpec measured_plate(double step, double alpha, std::uint64_t seed) {
    SppSpec s;
    s.step_index = step;
    s.orientation = alpha;
    s.ramp_width = std::numbers::pi / 30.0;
    s.anomaly_radius = 150e-6;
    s.surface_rms = 15e-9;
    s.wavelength = 813e-9;
    s.roughness_seed = seed;
    return s;
  }
};

/// l = h_s (n - n0) / lambda.
inline double step_index_from_plate(double step_height, double n, double n0, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("step_index_from_plate: wavelength must be positive");
  return step_height * (n - n0) / wavelength;
}

namespace detail {

inline double wrap_two_pi(double x) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double y = std::fmod(x, two_pi);
  if (y < 0.0) y += two_pi;
  if (y >= two_pi) y -= two_pi;
  return y;
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t bits_of(double v) noexcept {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  return u;
}

}  // namespace detail

/// Smooth random surface-height error in plate coordinates:
///   dh(r, psi) = s sum_{m,k <= 16} (A_mk cos m psi + B_mk sin m psi) cos(k pi r / R)
/// with A, B ~ N(0, 1) / (1 + m + k), no piston term, and s fixed so the rms
/// over the disk r < R equals the target.
class HeightScreen {
 public:
  HeightScreen() = default;
  HeightScreen(double rms, std::uint64_t seed) {
    if (rms == 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int m = 0; m <= kScreenHarmonics; ++m)
      for (int k = 0; k <= kScreenHarmonics; ++k) {
        const double amp = 1.0 / (1.0 + m + k);
        const double a = gauss(rng) * amp;
        const double b = gauss(rng) * amp;
        cos_coef_[idx(m, k)] = (m == 0 && k == 0) ? 0.0 : a;
        sin_coef_[idx(m, k)] = (m == 0) ? 0.0 : b;
      }
    active_ = true;
    // rms of the unit-scale screen on a fixed reference quadrature of the disk
    constexpr int nr = 64;
    constexpr int nphi = 128;
    auto [x, w] = gauss_legendre(nr);
    double acc = 0.0;
    double area = 0.0;
    for (int i = 0; i < nr; ++i) {
      const double r = 0.5 * kScreenRadius * (x[i] + 1.0);
      const double wr = 0.5 * kScreenRadius * w[i] * r;
      for (int j = 0; j < nphi; ++j) {
        const double h = raw(r, (j + 0.5) * 2.0 * std::numbers::pi / nphi);
        acc += wr * h * h;
        area += wr;
      }
    }
    scale_ = rms / std::sqrt(acc / area);
  }

  [[nodiscard]] double height(double r, double psi) const noexcept {
    return active_ ? scale_ * raw(r, psi) : 0.0;
  }

 private:
  static constexpr int kN = kScreenHarmonics + 1;
  static constexpr std::size_t idx(int m, int k) { return static_cast<std::size_t>(m * kN + k); }

  [[nodiscard]] double raw(double r, double psi) const noexcept {
    std::array<double, kN> cr{};
    const double u = std::numbers::pi * r / kScreenRadius;
    for (int k = 0; k < kN; ++k) cr[static_cast<std::size_t>(k)] = std::cos(k * u);
    double h = 0.0;
    for (int m = 0; m < kN; ++m) {
      const double cm = std::cos(m * psi);
      const double sm = std::sin(m * psi);
      for (int k = 0; k < kN; ++k)
        h += (cos_coef_[idx(m, k)] * cm + sin_coef_[idx(m, k)] * sm) * cr[static_cast<std::size_t>(k)];
    }
    return h;
  }

  bool active_ = false;
  double scale_ = 0.0;
  std::array<double, kN * kN> cos_coef_{};
  std::array<double, kN * kN> sin_coef_{};
};

/// Precomputed plate (the height screen is built once per spec).
class SppModel {
 public:
  explicit SppModel(SppSpec spec) : spec_(spec), screen_(spec.surface_rms, spec.roughness_seed) { spec_.validate(); }

  [[nodiscard]] const SppSpec& spec() const noexcept { return spec_; }

  /// Phase retardation imprinted at (r, phi), excluding the anomaly.
  [[nodiscard]] double ramp_phase(double phi) const noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double psi = detail::wrap_two_pi(phi - spec_.orientation);
    const double l = spec_.step_index;
    const double half = 0.5 * spec_.ramp_width;
    if (half > 0.0) {
      // ramp spans psi in [2pi - W/2, 2pi) U [0, W/2), descending linearly
      // from l (2pi - W/2) to l W/2
      double t = -1.0;
      if (psi >= two_pi - half) t = psi - (two_pi - half);
      else if (psi < half) t = psi + half;
      if (t >= 0.0) {
        const double start = l * (two_pi - half);
        const double end = l * half;
        return start + (end - start) * (t / spec_.ramp_width);
      }
    }
    return l * psi;
  }

  [[nodiscard]] double phase(double r, double phi) const noexcept {
    double ph = ramp_phase(phi);
    if (spec_.surface_rms > 0.0) {
      const double psi = detail::wrap_two_pi(phi - spec_.orientation);
      ph += 2.0 * std::numbers::pi * screen_.height(r, psi) * kIndexContrast / spec_.wavelength;
    }
    if (r < spec_.anomaly_radius) {
      if (spec_.anomaly_model == AnomalyModel::scrambled_phase) {
        const auto h = detail::splitmix64(detail::bits_of(r) ^ detail::splitmix64(
                                                   detail::bits_of(phi - spec_.orientation) ^
                                                   detail::splitmix64(spec_.roughness_seed)));
        return 2.0 * std::numbers::pi * static_cast<double>(h >> 11) * 0x1.0p-53;
      }
      return 0.0;
    }
    return ph;
  }

  [[nodiscard]] cplx transmission(double r, double phi) const noexcept {
    if (r < spec_.anomaly_radius && spec_.anomaly_model == AnomalyModel::opaque) return {0.0, 0.0};
    return std::polar(1.0, phase(r, phi));
  }

  [[nodiscard]] SampledField apply(const SampledField& f) const {
    const auto& g = f.grid();
    SampledField out(f.grid_ptr());
    const int nphi = g.n_azimuthal;
    parallel_for(static_cast<std::size_t>(g.n_radial), [&](std::size_t i) {
      const double r = g.radial_nodes[i];
      for (int j = 0; j < nphi; ++j)
        out.at(static_cast<int>(i), j) = transmission(r, g.azimuth(j)) * f.at(static_cast<int>(i), j);
    });
    return out;
  }

 private:
  SppSpec spec_;
  HeightScreen screen_;
};

inline double phase_profile(const SppSpec& spec, double r, double phi) { return SppModel(spec).phase(r, phi); }

inline SampledField apply(const SppSpec& spec, const SampledField& f) { return SppModel(spec).apply(f); }

// Configuration block: one `key = value` per line with the keys
// step_index, orientation_deg, ramp_width_deg, anomaly_radius_um,
// surface_rms_nm, wavelength_nm, roughness_seed.

inline void write_spp_block(std::ostream& os, const SppSpec& s) {
  constexpr double deg = 180.0 / std::numbers::pi;
  os << fmt::format("step_index = {:.15g}\n", s.step_index);
  os << fmt::format("orientation_deg = {:.15g}\n", s.orientation * deg);
  os << fmt::format("ramp_width_deg = {:.15g}\n", s.ramp_width * deg);
  os << fmt::format("anomaly_radius_um = {:.15g}\n", s.anomaly_radius * 1e6);
  os << fmt::format("surface_rms_nm = {:.15g}\n", s.surface_rms * 1e9);
  os << fmt::format("wavelength_nm = {:.15g}\n", s.wavelength * 1e9);
  os << fmt::format("roughness_seed = {}\n", s.roughness_seed);
}

/// Applies key/value pairs onto `base`; unknown keys and malformed numbers
/// raise ConfigError.
inline SppSpec spp_from_keys(const std::map<std::string, std::string>& kv, SppSpec base = {}) {
  constexpr double rad = std::numbers::pi / 180.0;
  auto num = [](const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
    }
  };
  for (const auto& [key, v] : kv) {
    if (key == "step_index") base.step_index = num(key, v);
    else if (key == "orientation_deg") base.orientation = num(key, v) * rad;
    else if (key == "ramp_width_deg") base.ramp_width = num(key, v) * rad;
    else if (key == "anomaly_radius_um") base.anomaly_radius = num(key, v) * 1e-6;
    else if (key == "surface_rms_nm") base.surface_rms = num(key, v) * 1e-9;
    else if (key == "wavelength_nm") base.wavelength = num(key, v) * 1e-9;
    else if (key == "roughness_seed") {
      try {
        std::size_t pos = 0;
        if (v.empty() || v.front() < '0' || v.front() > '9') throw std::invalid_argument(v);
        base.roughness_seed = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("roughness_seed: '{}' is not a non-negative integer", v));
      }
    } else {
      throw ConfigError("unknown plate key '" + key + "'");
    }
  }
  try {
    base.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return base;
}

inline SppSpec read_spp_block(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    line = trim(line.substr(0, line.find_first_of("#;")));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return spp_from_keys(kv);
}

}  // namespace fracoam
