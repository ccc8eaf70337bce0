#pragma once

// Laguerre-Gaussian modes evaluated at the waist plane (flat wavefront).
//
//   u_{l,p}(r, phi) = R_{|l|,p}(r) exp(i l phi) / sqrt(2 pi)
//   R_{a,p}(r) = (2/w) sqrt(p!/(p+a)!) t^{a/2} L_p^a(t) exp(-t/2),  t = 2 r^2 / w^2
//
// so that the integral of |u|^2 r dr dphi is 1. Curvature and Gouy phases are
// omitted; every overlap in this library is taken in a single transverse plane.

#include <cmath>
#include <compare>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fracoam {

/// Azimuthal index l (OAM in units of hbar) and radial index p >= 0.
struct LGIndex {
  int l = 0;
  int p = 0;

  /// Mode order |l| + 2p.
  [[nodiscard]] constexpr int order() const noexcept { return (l < 0 ? -l : l) + 2 * p; }

  friend constexpr auto operator<=>(const LGIndex&, const LGIndex&) = default;
};

/// Index pair (n, m) of the Hermite-like labelling used for mode diagrams:
/// l = n - m, p = min(n, m), order n + m.
[[nodiscard]] constexpr LGIndex lg_index_from_nm(int n, int m) noexcept {
  return {n - m, n < m ? n : m};
}

struct BasisParams {
  double waist = 1.0;
  double wavelength = 813e-9;

  void validate() const {
    if (!(waist > 0.0)) throw std::invalid_argument("BasisParams: waist must be positive");
    if (!(wavelength > 0.0)) throw std::invalid_argument("BasisParams: wavelength must be positive");
  }
};

/// Generalized Laguerre value returned as mantissa * exp(log_scale).
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  [[nodiscard]] double value() const noexcept { return mantissa * std::exp(log_scale); }
};

/// L_p^a(x) by the three-term forward recurrence
///   (k+1) L_{k+1} = (2k+1+a-x) L_k - (k+a) L_{k-1}.
/// The pair is rescaled whenever it exceeds 1e150 so that no intermediate
/// overflows; the accumulated scale is returned separately.
[[nodiscard]] inline ScaledValue assoc_laguerre_scaled(int p, int a, double x) noexcept {
  if (p == 0) return {1.0, 0.0};
  double prev = 1.0;
  double cur = 1.0 + a - x;
  double log_scale = 0.0;
  for (int k = 1; k < p; ++k) {
    const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
  }
  return {cur, log_scale};
}

/// L_p^a(x). Finite for p <= 300, a <= 300, x <= 200; larger arguments may
/// return +-inf, use assoc_laguerre_scaled there.
[[nodiscard]] inline double assoc_laguerre(int p, int a, double x) noexcept {
  return assoc_laguerre_scaled(p, a, x).value();
}

/// Radial profile R_{a,p}(r) with a = |l|. Normalization uses log-gamma so
/// orders far beyond the factorial overflow point stay finite.
[[nodiscard]] inline double lg_radial(int abs_l, int p, double waist, double r) noexcept {
  const double t = 2.0 * r * r / (waist * waist);
  const double log_norm =
      std::log(2.0 / waist) + 0.5 * (std::lgamma(p + 1.0) - std::lgamma(p + abs_l + 1.0));
  if (t == 0.0) {
    if (abs_l != 0) return 0.0;
    // L_p^0(0) = 1
    return std::exp(log_norm);
  }
  const ScaledValue lag = assoc_laguerre_scaled(p, abs_l, t);
  if (lag.mantissa == 0.0) return 0.0;
  const double log_mag =
      log_norm + 0.5 * abs_l * std::log(t) - 0.5 * t + lag.log_scale + std::log(std::abs(lag.mantissa));
  return std::copysign(std::exp(log_mag), lag.mantissa);
}

/// Normalized LG mode at the waist plane.
[[nodiscard]] inline std::complex<double> lg_eval(LGIndex idx, const BasisParams& params, double r,
                                                  double phi) {
  if (idx.p < 0) throw std::invalid_argument("lg_eval: radial index must be non-negative");
  if (r < 0.0) throw std::invalid_argument("lg_eval: r must be non-negative");
  const int abs_l = idx.l < 0 ? -idx.l : idx.l;
  const double radial = lg_radial(abs_l, idx.p, params.waist, r) / std::sqrt(2.0 * std::numbers::pi);
  return std::polar(radial, idx.l * phi);
}

/// Number of LG modes with |l| + 2p <= max_order.
[[nodiscard]] constexpr long long mode_count(long long max_order) noexcept {
  return max_order < 0 ? 0 : (max_order + 1) * (max_order + 2) / 2;
}

/// All modes with |l| + 2p <= max_order, sorted by ascending order, then
/// ascending l, then ascending p. Within one order p is fixed by l, so the
/// listing is a strict prefix of the listing for any larger max_order.
[[nodiscard]] inline std::vector<LGIndex> modes_up_to_order(int max_order) {
  std::vector<LGIndex> modes;
  if (max_order < 0) return modes;
  modes.reserve(static_cast<std::size_t>(mode_count(max_order)));
  for (int m = 0; m <= max_order; ++m) {
    for (int l = -m; l <= m; l += 2) modes.push_back({l, (m - (l < 0 ? -l : l)) / 2});
  }
  return modes;
}

}  // namespace fracoam
