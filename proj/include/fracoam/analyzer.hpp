#pragma once

// Fractional-OAM analyzer: a spiral phase plate followed by a single-mode
// fiber. The analyzer mode is the plate acting on the fiber's fundamental
// Gaussian; its LG spectrum, the fidelity of truncated spectra, the modal
// bandwidth extrapolated from them, and the conversion efficiency of two
// plates in series live here.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fracoam/error.hpp"
#include "fracoam/field.hpp"
#include "fracoam/lg_basis.hpp"
#include "fracoam/parallel.hpp"
#include "fracoam/spp.hpp"

namespace fracoam {

struct AnalyzerSpec {
  SppSpec spp;
  double fiber_waist = 1e-3;

  void validate() const {
    spp.validate();
    if (!(fiber_waist > 0.0)) throw std::invalid_argument("AnalyzerSpec: fiber_waist must be positive");
  }
};

/// Fundamental Gaussian LG^0_0 of the given waist, unit norm.
inline SampledField gaussian_field(GridPtr grid, double waist) {
  const double amp = std::sqrt(2.0 / std::numbers::pi) / waist;
  return SampledField::sample(std::move(grid), [&](double r, double) {
    return cplx{amp * std::exp(-r * r / (waist * waist)), 0.0};
  });
}

inline SampledField lg_field(GridPtr grid, LGIndex idx, double waist) {
  const BasisParams params{waist, 1.0};
  return SampledField::sample(std::move(grid), [&](double r, double phi) { return lg_eval(idx, params, r, phi); });
}

/// The plate's radial-ramp must span several azimuthal samples.
inline void require_ramp_resolved(const SppSpec& spp, const PolarGrid& grid) {
  if (spp.ramp_width > 0.0 && !(grid.azimuthal_step() < spp.ramp_width / 4.0))
    throw ConvergenceError(fmt::format("azimuthal step {:.3g} rad does not resolve a {:.3g} rad ramp (need < width/4)",
                                       grid.azimuthal_step(), spp.ramp_width));
}

/// SPP applied to the fiber Gaussian, renormalized to unit norm after any
/// anomaly loss.
inline SampledField analyzer_mode(const AnalyzerSpec& spec, GridPtr grid) {
  spec.validate();
  require_ramp_resolved(spec.spp, *grid);
  return normalized(apply(spec.spp, gaussian_field(std::move(grid), spec.fiber_waist)));
}

struct ModalCoefficient {
  LGIndex index;
  cplx value;
};

struct ModalSpectrum {
  double basis_waist = 0.0;
  int max_order = 0;
  /// In modes_up_to_order() order.
  std::vector<ModalCoefficient> coefficients;
  double captured_power = 0.0;

  [[nodiscard]] static std::size_t position(LGIndex idx) noexcept {
    const auto m = static_cast<std::size_t>(idx.order());
    return m * (m + 1) / 2 + static_cast<std::size_t>((idx.l + idx.order()) / 2);
  }

  [[nodiscard]] cplx coefficient(LGIndex idx) const {
    if (idx.p < 0 || idx.order() > max_order) throw std::out_of_range("ModalSpectrum: index outside truncation");
    return coefficients[position(idx)].value;
  }

  /// Captured power restricted to orders <= m, summed in listing order.
  [[nodiscard]] double captured_power_to_order(int m) const {
    const auto n = static_cast<std::size_t>(mode_count(std::min(m, max_order)));
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += std::norm(coefficients[k].value);
    return acc;
  }

  /// Share of the captured power in modes with p != 0.
  [[nodiscard]] double radial_share() const {
    double acc = 0.0;
    for (const auto& c : coefficients)
      if (c.index.p != 0) acc += std::norm(c.value);
    return captured_power > 0.0 ? acc / captured_power : 0.0;
  }
};

inline constexpr double kQuadratureTolerance = 1e-4;

/// Checks that LG modes of the highest requested order are still normalized
/// on this grid and that their azimuthal harmonics do not alias. Rule of
/// thumb: r_max >= basis_waist * (sqrt(max_order + 1) + 4) with enough radial
/// nodes to follow max_order / 2 radial oscillations.
inline void check_quadrature(const PolarGrid& grid, double basis_waist, int max_order) {
  if (grid.n_azimuthal <= 2 * max_order + 1)
    throw ConvergenceError(fmt::format("n_azimuthal={} aliases harmonics up to |l|={}", grid.n_azimuthal, max_order));
  const LGIndex probes[] = {{max_order, 0}, {max_order % 2, max_order / 2}, {max_order - 1 < 0 ? 0 : max_order - 1, 0}};
  for (const LGIndex& idx : probes) {
    double acc = 0.0;
    for (int i = 0; i < grid.n_radial; ++i) {
      const double rr = lg_radial(idx.l, idx.p, basis_waist, grid.radial_nodes[static_cast<std::size_t>(i)]);
      acc += grid.radial_weights[static_cast<std::size_t>(i)] * rr * rr;
    }
    if (std::abs(acc - 1.0) > kQuadratureTolerance)
      throw ConvergenceError(fmt::format(
          "grid (n_radial={}, r_max={:.4g}) does not resolve LG(l={}, p={}) at waist {:.4g}: norm error {:.2e}",
          grid.n_radial, grid.r_max, idx.l, idx.p, basis_waist, std::abs(acc - 1.0)));
  }
}

/// c_{l,p} = <LG^l_p | f> for every |l| + 2p <= max_order.
///
/// The overlap is evaluated as sqrt(2 pi) sum_i w_i R_{|l|p}(r_i) f_l(r_i)
/// from the azimuthal harmonics f_l of f, which is algebraically the same
/// quadrature as sampling each LG mode on the grid and taking the inner
/// product directly.
inline ModalSpectrum decompose(const SampledField& f, double basis_waist, int max_order) {
  if (!(basis_waist > 0.0)) throw std::invalid_argument("decompose: basis_waist must be positive");
  if (max_order < 0) throw std::invalid_argument("decompose: max_order must be non-negative");
  const auto& grid = f.grid();
  check_quadrature(grid, basis_waist, max_order);

  const auto harmonics = azimuthal_harmonics(f);
  const auto modes = modes_up_to_order(max_order);
  ModalSpectrum out;
  out.basis_waist = basis_waist;
  out.max_order = max_order;
  out.coefficients.resize(modes.size());
  const double root_two_pi = std::sqrt(2.0 * std::numbers::pi);
  parallel_for(modes.size(), [&](std::size_t k) {
    const LGIndex idx = modes[k];
    const int abs_l = idx.l < 0 ? -idx.l : idx.l;
    cplx acc{};
    for (int i = 0; i < grid.n_radial; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      acc += grid.radial_weights[ui] * lg_radial(abs_l, idx.p, basis_waist, grid.radial_nodes[ui]) * harmonics(i, idx.l);
    }
    out.coefficients[k] = {idx, root_two_pi * acc};
  });
  out.captured_power = out.captured_power_to_order(max_order);
  return out;
}

/// Field synthesized from a spectrum: sum c_{l,p} LG^l_p.
inline SampledField reconstruct(const ModalSpectrum& s, GridPtr grid) {
  SampledField out(grid);
  const auto& g = *grid;
  const int nphi = g.n_azimuthal;
  parallel_for(static_cast<std::size_t>(g.n_radial), [&](std::size_t i) {
    const double r = g.radial_nodes[i];
    std::vector<double> radial(s.coefficients.size());
    for (std::size_t k = 0; k < s.coefficients.size(); ++k) {
      const LGIndex idx = s.coefficients[k].index;
      radial[k] = lg_radial(idx.l < 0 ? -idx.l : idx.l, idx.p, s.basis_waist, r) / std::sqrt(2.0 * std::numbers::pi);
    }
    for (int j = 0; j < nphi; ++j) {
      const double phi = g.azimuth(j);
      cplx acc{};
      for (std::size_t k = 0; k < s.coefficients.size(); ++k)
        acc += s.coefficients[k].value * radial[k] * std::polar(1.0, s.coefficients[k].index.l * phi);
      out.at(static_cast<int>(i), j) = acc;
    }
  });
  return out;
}

struct FidelityPoint {
  int order = 0;
  long long modes = 0;
  double fidelity = 0.0;
};

using FidelityCurve = std::vector<FidelityPoint>;

/// Captured power of the analyzer mode versus truncation order. One
/// decomposition at the largest order is taken; each point is the prefix sum
/// over modes_up_to_order(order), identical to decompose() at that order.
inline FidelityCurve fidelity_curve(const AnalyzerSpec& spec, double basis_waist, std::span<const int> orders,
                                    GridPtr grid) {
  if (orders.empty()) return {};
  if (!std::is_sorted(orders.begin(), orders.end()) || orders.front() < 0)
    throw std::invalid_argument("fidelity_curve: orders must be non-negative and ascending");
  const auto mode = analyzer_mode(spec, grid);
  const auto spectrum = decompose(mode, basis_waist, orders.back());
  FidelityCurve curve;
  curve.reserve(orders.size());
  for (int m : orders) curve.push_back({m, mode_count(m), spectrum.captured_power_to_order(m)});
  return curve;
}

/// Result of fitting 1 - F(M) = A (M + 1)^(-gamma) to the curve tail.
struct BandwidthEstimate {
  double modes = 0.0;        ///< (M* + 1)(M* + 2) / 2
  double order = 0.0;        ///< M*
  double amplitude = 0.0;    ///< A
  double exponent = 0.0;     ///< gamma
  double fit_residual = 0.0; ///< rms of log residuals over the fit window
  int fit_points = 0;
  bool extrapolated = true;  ///< false when the target lies inside the curve
};

inline constexpr int kDefaultFitMinOrder = 8;

inline BandwidthEstimate extrapolate_bandwidth(std::span<const FidelityPoint> curve, double target_fidelity,
                                               int fit_min_order = kDefaultFitMinOrder) {
  if (curve.size() < 6) throw std::invalid_argument("extrapolate_bandwidth: need at least 6 curve points");
  if (!(target_fidelity > 0.0 && target_fidelity < 1.0))
    throw std::invalid_argument("extrapolate_bandwidth: target fidelity must lie in (0, 1)");
  for (std::size_t k = 1; k < curve.size(); ++k)
    if (curve[k].order <= curve[k - 1].order || curve[k].fidelity < curve[k - 1].fidelity)
      throw ConvergenceError("extrapolate_bandwidth: curve is not monotone in order and fidelity");

  BandwidthEstimate est;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& pt : curve)
    if (pt.order >= fit_min_order && pt.fidelity < 1.0) {
      xs.push_back(std::log(pt.order + 1.0));
      ys.push_back(std::log(1.0 - pt.fidelity));
    }
  const auto n = static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    const double mx = ordered_sum<double>(xs) / n;
    const double my = ordered_sum<double>(ys) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxy += (xs[k] - mx) * (ys[k] - my);
      sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    est.exponent = -slope;
    est.amplitude = std::exp(intercept);
    double ss = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double e = ys[k] - (intercept + slope * xs[k]);
      ss += e * e;
    }
    est.fit_residual = std::sqrt(ss / n);
    est.fit_points = static_cast<int>(xs.size());
  }

  const auto& last = curve.back();
  if (target_fidelity <= last.fidelity) {
    // inside the sampled range: linear interpolation in order
    est.extrapolated = false;
    double m_star = curve.front().order;
    for (std::size_t k = 0; k < curve.size(); ++k) {
      if (curve[k].fidelity >= target_fidelity) {
        if (k == 0 || curve[k].fidelity == target_fidelity) {
          m_star = curve[k].order;
        } else {
          const auto& a = curve[k - 1];
          const auto& b = curve[k];
          m_star = a.order + (b.order - a.order) * (target_fidelity - a.fidelity) / (b.fidelity - a.fidelity);
        }
        break;
      }
    }
    est.order = m_star;
    est.modes = (m_star + 1.0) * (m_star + 2.0) / 2.0;
    return est;
  }

  if (est.fit_points < 3)
    throw ConvergenceError(fmt::format("extrapolate_bandwidth: only {} points with order >= {}", est.fit_points,
                                       fit_min_order));
  if (!(est.exponent > 0.0)) throw ConvergenceError("extrapolate_bandwidth: fitted tail does not decay");
  est.order = std::pow((1.0 - target_fidelity) / est.amplitude, -1.0 / est.exponent) - 1.0;
  est.modes = (est.order + 1.0) * (est.order + 2.0) / 2.0;
  return est;
}

/// True when the plates are complementary (l_a = -l_b), the configuration in
/// which the train converts the Gaussian back into itself.
inline bool complementary_plates(const AnalyzerSpec& a, const AnalyzerSpec& b, double tol = 1e-6) {
  return std::abs(a.spp.step_index + b.spp.step_index) <= tol;
}

struct TrainResult {
  /// |<mode_b|mode_a>|^2 between the two unit-norm analyzer modes.
  double efficiency = 0.0;
  /// |<G_b| T_b T_a G_a>|^2 including any absorption in the plates.
  double coupled_fraction = 0.0;
  /// ||T_b T_a G_a||^2.
  double transmitted = 0.0;
};

/// Two analyzers in series: plate a converts the fiber Gaussian of analyzer
/// a, plate b converts it back and the fiber of analyzer b detects it. The
/// efficiency is the fidelity of analyzer mode a as measured by analyzer b,
///   |<G_b| T_b T_a G_a>|^2 / (||T_a G_a||^2 ||T_b G_b||^2),
/// i.e. the overlap of the two unit-norm analyzer modes. For lossless plates
/// both norms are 1 and this equals the coupled fraction.
inline TrainResult train(const AnalyzerSpec& a, const AnalyzerSpec& b, GridPtr grid) {
  a.validate();
  b.validate();
  require_ramp_resolved(a.spp, *grid);
  require_ramp_resolved(b.spp, *grid);
  const SppModel plate_a(a.spp);
  const SppModel plate_b(b.spp);
  const auto input = gaussian_field(grid, a.fiber_waist);
  const auto detect = gaussian_field(grid, b.fiber_waist);
  const auto converted = plate_a.apply(input);
  const auto through = plate_b.apply(converted);
  TrainResult res;
  res.transmitted = norm2(through);
  res.coupled_fraction = std::norm(inner_product(detect, through));
  const double norm_a = norm2(converted);
  const double norm_b = norm2(plate_b.apply(detect));
  if (norm_a > 0.0 && norm_b > 0.0) res.efficiency = res.coupled_fraction / (norm_a * norm_b);
  return res;
}

inline double train_efficiency(const AnalyzerSpec& a, const AnalyzerSpec& b, GridPtr grid) {
  return train(a, b, std::move(grid)).efficiency;
}

inline void write_spectrum_csv(std::ostream& os, const ModalSpectrum& s) {
  os << "l,p,order,re,im,power\n";
  for (const auto& c : s.coefficients)
    fmt::print(os, "{},{},{},{:.17g},{:.17g},{:.17g}\n", c.index.l, c.index.p, c.index.order(), c.value.real(),
               c.value.imag(), std::norm(c.value));
}

inline void write_fidelity_csv(std::ostream& os, std::span<const FidelityPoint> curve) {
  os << "order,modes,fidelity\n";
  for (const auto& pt : curve) fmt::print(os, "{},{},{:.17g}\n", pt.order, pt.modes, pt.fidelity);
}

}  // namespace fracoam
