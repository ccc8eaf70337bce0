#pragma once

// Twin-photon coincidence detection with two fractional-OAM analyzers, and
// the Schmidt-number / dimensionality bookkeeping for the SPDC source.
//
// Coincidence model (thin crystal, near field imaged onto the plates): the
// coincidence amplitude is the overlap of both back-projected analyzer modes
// with the pump envelope,
//   A = int conj(u_s) conj(u_i) E_p d^2rho,
// reported as |A|^2 / |A_0|^2 where A_0 is the same overlap with the plate
// phases removed. For ideal half-integer plates this is (1 - |a_s - a_i|/pi)^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <lapacke.h>

#include "fracoam/analyzer.hpp"
#include "fracoam/error.hpp"
#include "fracoam/field.hpp"
#include "fracoam/parallel.hpp"

namespace fracoam {

struct CrystalParams {
  double pump_waist = 0.78e-3;       ///< w0 [m]
  double crystal_length = 1.0e-3;    ///< L [m]
  double pump_wavelength = 406.7e-9; ///< [m]
  double pump_index = 1.0;           ///< n in k_p = 2 pi n / lambda_p; 1 = vacuum wavenumber

  [[nodiscard]] double pump_wavenumber() const noexcept {
    return 2.0 * std::numbers::pi * pump_index / pump_wavelength;
  }

  void validate() const {
    if (!(pump_waist > 0.0 && crystal_length > 0.0 && pump_wavelength > 0.0))
      throw std::invalid_argument("CrystalParams: lengths must be positive");
    if (!(pump_index >= 1.0)) throw std::invalid_argument("CrystalParams: pump_index must be >= 1");
  }
};

enum class TwoPhotonModel { ideal_entangled, separable };
enum class PumpProfile { flat, gaussian };

inline std::string to_string(TwoPhotonModel m) {
  return m == TwoPhotonModel::ideal_entangled ? "entangled" : "separable";
}

/// Closed-form fringe for ideal plates with step indices +-l:
/// |(1 - x) + x exp(-2 pi i l)|^2, x = delta / 2 pi. Already symmetric under
/// delta -> 2 pi - delta; equals (1 - delta/pi)^2 on [0, pi] for
/// half-integer l.
inline double analytic_fringe(double step_index, double delta) {
  const double x = detail::wrap_two_pi(delta) / (2.0 * std::numbers::pi);
  const cplx a = (1.0 - x) + x * std::polar(1.0, -2.0 * std::numbers::pi * step_index);
  return std::norm(a);
}

namespace detail {

inline std::vector<double> pump_envelope(const PolarGrid& grid, const CrystalParams& crystal, PumpProfile pump) {
  std::vector<double> e(static_cast<std::size_t>(grid.n_radial), 1.0);
  if (pump == PumpProfile::gaussian)
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double r = grid.radial_nodes[i];
      e[i] = std::exp(-r * r / (crystal.pump_waist * crystal.pump_waist));
    }
  return e;
}

inline double coincidence_from_modes(TwoPhotonModel model, const SampledField& us, const SampledField& ui,
                                     std::span<const double> pump) {
  require_same_grid(us, ui);
  const auto& g = us.grid();
  const int n = g.n_azimuthal;
  const double dphi = g.azimuthal_step();

  std::vector<double> ref_rows(static_cast<std::size_t>(g.n_radial));
  for (int i = 0; i < g.n_radial; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += std::abs(us.at(i, j)) * std::abs(ui.at(i, j));
    ref_rows[static_cast<std::size_t>(i)] = acc * g.radial_weights[static_cast<std::size_t>(i)] * dphi * pump[static_cast<std::size_t>(i)];
  }
  const double ref = ordered_sum<double>(ref_rows);
  if (!(ref > 0.0)) throw std::invalid_argument("coincidence: analyzer modes do not overlap");

  if (model == TwoPhotonModel::ideal_entangled) {
    std::vector<cplx> rows(static_cast<std::size_t>(g.n_radial));
    for (int i = 0; i < g.n_radial; ++i) {
      cplx acc{};
      for (int j = 0; j < n; ++j) acc += std::conj(us.at(i, j) * ui.at(i, j));
      rows[static_cast<std::size_t>(i)] = acc * (g.radial_weights[static_cast<std::size_t>(i)] * dphi * pump[static_cast<std::size_t>(i)]);
    }
    return std::norm(ordered_sum<cplx>(rows)) / (ref * ref);
  }

  // Separable: the entangled amplitude splits exactly into per-harmonic
  // pieces A = sum_m A_m (signal harmonic m paired with idler harmonic -m);
  // an OAM-conserving mixture drops the cross terms, P = sum_m |A_m|^2.
  const auto hs = azimuthal_harmonics(us);
  const auto hi = azimuthal_harmonics(ui);
  std::vector<double> parts;
  parts.reserve(static_cast<std::size_t>(n));
  for (int m = hs.min_harmonic(); m <= hs.max_harmonic(); ++m) {
    // the Nyquist harmonic pairs with itself and picks up a sign from the
    // half-sample azimuthal offset
    const double sign = (n % 2 == 0 && m == -(n / 2)) ? -1.0 : 1.0;
    cplx am{};
    for (int i = 0; i < g.n_radial; ++i)
      am += g.radial_weights[static_cast<std::size_t>(i)] * pump[static_cast<std::size_t>(i)] *
            std::conj(hs(i, m) * hi(i, -m));
    parts.push_back(std::norm(sign * 2.0 * std::numbers::pi * am));
  }
  return ordered_sum<double>(parts) / (ref * ref);
}

}  // namespace detail

/// Normalized coincidence probability for one pair of analyzer settings.
inline double coincidence_prob(TwoPhotonModel model, const AnalyzerSpec& spec_s, const AnalyzerSpec& spec_i,
                               const CrystalParams& crystal, GridPtr grid, PumpProfile pump = PumpProfile::flat) {
  crystal.validate();
  const auto us = analyzer_mode(spec_s, grid);
  const auto ui = analyzer_mode(spec_i, grid);
  const auto env = detail::pump_envelope(*grid, crystal, pump);
  return detail::coincidence_from_modes(model, us, ui, env);
}

struct FringeSample {
  double alpha_s = 0.0;
  double probability = 0.0;
};

struct FringeCurve {
  double alpha_i = 0.0;
  std::vector<FringeSample> samples;
  std::string model_tag;
};

/// Coincidence probability swept over the signal plate orientation with the
/// idler plate fixed at alpha_i. The orientations stored in spec_s and spec_i
/// are overridden.
inline FringeCurve fringe(TwoPhotonModel model, AnalyzerSpec spec_s, AnalyzerSpec spec_i, const CrystalParams& crystal,
                          double alpha_i, std::span<const double> alpha_s_samples, GridPtr grid,
                          PumpProfile pump = PumpProfile::flat) {
  if (alpha_s_samples.empty()) throw std::invalid_argument("fringe: no alpha_s samples");
  crystal.validate();
  spec_i.spp.orientation = alpha_i;
  const auto ui = analyzer_mode(spec_i, grid);
  const auto env = detail::pump_envelope(*grid, crystal, pump);
  FringeCurve curve;
  curve.alpha_i = alpha_i;
  curve.model_tag = to_string(model);
  curve.samples.resize(alpha_s_samples.size());
  for (std::size_t k = 0; k < alpha_s_samples.size(); ++k) {
    spec_s.spp.orientation = alpha_s_samples[k];
    const auto us = analyzer_mode(spec_s, grid);
    curve.samples[k] = {alpha_s_samples[k], detail::coincidence_from_modes(model, us, ui, env)};
  }
  std::stable_sort(curve.samples.begin(), curve.samples.end(),
                   [](const FringeSample& a, const FringeSample& b) { return a.alpha_s < b.alpha_s; });
  return curve;
}

/// (max - min) / (max + min). The sweep must reach relative orientations 0
/// and pi to within its own sample spacing.
inline double visibility(const FringeCurve& curve) {
  if (curve.samples.size() < 2) throw std::invalid_argument("visibility: need at least two samples");
  double pmax = curve.samples.front().probability;
  double pmin = pmax;
  double dmin = 10.0;
  double dmax = -1.0;
  double gap = 0.0;
  for (std::size_t k = 0; k < curve.samples.size(); ++k) {
    const auto& s = curve.samples[k];
    pmax = std::max(pmax, s.probability);
    pmin = std::min(pmin, s.probability);
    const double d = detail::wrap_two_pi(s.alpha_s - curve.alpha_i);
    const double folded = std::min(d, 2.0 * std::numbers::pi - d);
    dmin = std::min(dmin, folded);
    dmax = std::max(dmax, folded);
    if (k > 0) gap = std::max(gap, s.alpha_s - curve.samples[k - 1].alpha_s);
  }
  const double tol = gap + 1e-12;
  if (dmin > tol || dmax < std::numbers::pi - tol)
    throw std::invalid_argument("visibility: sweep does not cover relative orientations 0..pi");
  if (!(pmax + pmin > 0.0)) throw Error("visibility: fringe is identically zero");
  return (pmax - pmin) / (pmax + pmin);
}

inline void write_fringe_csv(std::ostream& os, const FringeCurve& curve, std::optional<double> analytic_step = {}) {
  constexpr double deg = 180.0 / std::numbers::pi;
  const bool with_analytic = analytic_step.has_value();
  const double step = analytic_step.value_or(0.0);
  os << (with_analytic ? "alpha_s_deg,probability,analytic\n" : "alpha_s_deg,probability\n");
  for (const auto& s : curve.samples) {
    if (with_analytic)
      fmt::print(os, "{:.17g},{:.17g},{:.17g}\n", s.alpha_s * deg, s.probability,
                 analytic_fringe(step, s.alpha_s - curve.alpha_i));
    else
      fmt::print(os, "{:.17g},{:.17g}\n", s.alpha_s * deg, s.probability);
  }
}

// ---------------------------------------------------------------------------
// Schmidt number

enum class SchmidtMethod { approximate, exact_svd };
enum class PhaseMatchingKernel { gaussian, sinc };

inline std::string to_string(SchmidtMethod m) { return m == SchmidtMethod::approximate ? "approximate" : "exact-svd"; }
inline std::string to_string(PhaseMatchingKernel k) { return k == PhaseMatchingKernel::gaussian ? "gaussian" : "sinc"; }

struct SchmidtResult {
  double k_number = 1.0;
  /// Per-axis Schmidt coefficients, descending, summing to 1. The full
  /// two-axis spectrum is their outer product, so
  /// k_number = (1 / sum lambda^2)^axes.
  std::vector<double> coefficients;
  SchmidtMethod method = SchmidtMethod::approximate;
  int axes = 2;
  int grid_size = 0;
  bool converged = true;
  /// K at half the grid size, used for the convergence flag.
  std::optional<double> k_half_grid;
  double pump_index = 1.0;
};

/// K >= (1/4) (sqrt(L / (w0^2 k_p)) + sqrt(w0^2 k_p / L))^2, the
/// double-Gaussian estimate with the phase-matching sinc replaced by a
/// Gaussian of the same curvature.
inline SchmidtResult schmidt_approx(const CrystalParams& crystal) {
  crystal.validate();
  const double ratio = crystal.pump_waist * crystal.pump_waist * crystal.pump_wavenumber() / crystal.crystal_length;
  const double s = std::sqrt(1.0 / ratio) + std::sqrt(ratio);
  SchmidtResult r;
  r.k_number = 0.25 * s * s;
  r.method = SchmidtMethod::approximate;
  r.pump_index = crystal.pump_index;
  return r;
}

namespace detail {

/// Singular values of a dense row-major matrix (LAPACK dgesdd).
inline std::vector<double> singular_values(std::vector<double> a, int rows, int cols) {
  std::vector<double> s(static_cast<std::size_t>(std::min(rows, cols)));
  double unused = 0.0;
  const lapack_int info = LAPACKE_dgesdd(LAPACK_ROW_MAJOR, 'N', rows, cols, a.data(), cols, s.data(), &unused,
                                         std::max(1, rows), &unused, std::max(1, cols));
  if (info != 0) throw ConvergenceError(fmt::format("dgesdd failed (info={})", info));
  return s;
}

/// Eigenvalues of a symmetric row-major matrix (LAPACK dsyevd).
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', n, a.data(), n, w.data());
  if (info != 0) throw ConvergenceError(fmt::format("dsyevd failed (info={})", info));
  return w;
}

inline std::vector<double> schmidt_weights(std::span<const double> singular) {
  std::vector<double> lam;
  lam.reserve(singular.size());
  for (double s : singular) lam.push_back(s * s);
  std::sort(lam.begin(), lam.end(), std::greater<>());
  const double total = ordered_sum<double>(lam);
  if (!(total > 0.0)) throw ConvergenceError("Schmidt decomposition of a zero kernel");
  for (double& l : lam) l /= total;
  return lam;
}

inline double inverse_purity(std::span<const double> lam) {
  std::vector<double> sq(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k) sq[k] = lam[k] * lam[k];
  return 1.0 / ordered_sum<double>(sq);
}

}  // namespace detail

/// Schmidt number of an arbitrary sampled two-party kernel psi(x_r, y_c),
/// uniform sampling on both axes, row-major.
inline SchmidtResult schmidt_from_kernel(std::span<const double> kernel, int rows, int cols) {
  if (kernel.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("schmidt_from_kernel: size mismatch");
  const auto sv = detail::singular_values(std::vector<double>(kernel.begin(), kernel.end()), rows, cols);
  SchmidtResult r;
  r.coefficients = detail::schmidt_weights(sv);
  r.k_number = detail::inverse_purity(r.coefficients);
  r.method = SchmidtMethod::exact_svd;
  r.axes = 1;
  r.grid_size = std::max(rows, cols);
  return r;
}

struct ExactSchmidtOptions {
  PhaseMatchingKernel kernel = PhaseMatchingKernel::gaussian;
  /// Gaussian stand-in for sinc(b q^2): exp(-alpha b q^2), alpha from
  /// matching the widths of the two functions.
  double gaussian_width_factor = 0.193;
  bool check_convergence = true;
  double convergence_tolerance = 0.01;
};

namespace detail {

/// One-axis Schmidt spectrum of
///   psi(q_s, q_i) = exp(-w0^2 (q_s + q_i)^2 / 4) * g(q_s - q_i)
/// on an n x n midpoint grid. psi is symmetric and invariant under
/// (q_s, q_i) -> (-q_s, -q_i), so the matrix block-diagonalizes into even
/// and odd halves whose eigenvalue magnitudes are the singular values.
inline std::vector<double> schmidt_axis_spectrum(const CrystalParams& c, int n, const ExactSchmidtOptions& opt) {
  const double kp = c.pump_wavenumber();
  const double a = 0.5 * c.pump_waist;                           // pump: exp(-a^2 u^2)
  const double b0 = std::sqrt(c.crystal_length / (4.0 * kp));    // phase matching: sinc(b0^2 v^2)
  const bool gauss = opt.kernel == PhaseMatchingKernel::gaussian;
  const double b = gauss ? b0 * std::sqrt(opt.gaussian_width_factor) : b0;
  // dimensionless q = x / sqrt(a b): pump exp(-r u^2), phase matching in v^2 / r
  const double r = a / b;
  const double half_range =
      gauss ? 2.5 * std::sqrt(std::max(r, 1.0 / r)) : std::max(std::sqrt(3.0 * std::numbers::pi * r), 2.5 / std::sqrt(r));
  const int half = n / 2;
  const double h = 2.0 * half_range / n;
  auto psi = [&](double x, double y) {
    const double u = x + y;
    const double v = x - y;
    const double pm = gauss ? std::exp(-v * v / r) : [&] {
      const double z = v * v / r;
      return z == 0.0 ? 1.0 : std::sin(z) / z;
    }();
    return std::exp(-r * u * u) * pm;
  };
  std::vector<double> even(static_cast<std::size_t>(half) * half);
  std::vector<double> odd(even.size());
  parallel_for(static_cast<std::size_t>(half), [&](std::size_t i) {
    const double x = (static_cast<double>(i) + 0.5) * h;
    for (int j = 0; j < half; ++j) {
      const double y = (j + 0.5) * h;
      const double p = psi(x, y);
      const double q = psi(x, -y);
      even[i * half + j] = p + q;
      odd[i * half + j] = p - q;
    }
  });
  auto ev = symmetric_eigenvalues(std::move(even), half);
  const auto od = symmetric_eigenvalues(std::move(odd), half);
  ev.insert(ev.end(), od.begin(), od.end());
  for (double& e : ev) e = std::abs(e);
  return schmidt_weights(ev);
}

}  // namespace detail

/// Schmidt number from the singular values of the discretized one-axis
/// two-photon amplitude, squared for two transverse axes. The Gaussian
/// kernel is exactly separable in x and y; for the sinc kernel squaring the
/// one-axis value is an approximation.
inline SchmidtResult schmidt_exact(const CrystalParams& crystal, int grid_size, const ExactSchmidtOptions& opt = {}) {
  crystal.validate();
  if (grid_size < 128 || grid_size % 2 != 0)
    throw std::invalid_argument("schmidt_exact: grid_size must be even and >= 128");
  SchmidtResult r;
  r.method = SchmidtMethod::exact_svd;
  r.axes = 2;
  r.grid_size = grid_size;
  r.pump_index = crystal.pump_index;
  r.coefficients = detail::schmidt_axis_spectrum(crystal, grid_size, opt);
  const double k1 = detail::inverse_purity(r.coefficients);
  r.k_number = k1 * k1;
  if (opt.check_convergence) {
    const int coarse = grid_size / 2 + (grid_size / 2) % 2;
    const auto lam = detail::schmidt_axis_spectrum(crystal, coarse, opt);
    const double kc = detail::inverse_purity(lam);
    r.k_half_grid = kc * kc;
    r.converged = std::abs(r.k_number - *r.k_half_grid) <= opt.convergence_tolerance * r.k_number;
  }
  return r;
}

/// Closed form for the double-Gaussian kernel: K = (1/4)(a/b + b/a)^2 with
/// a = w0 / 2 and b = sqrt(alpha L / 4 k_p).
inline double double_gaussian_schmidt(const CrystalParams& c, double width_factor) {
  const double a = 0.5 * c.pump_waist;
  const double b = std::sqrt(width_factor * c.crystal_length / (4.0 * c.pump_wavenumber()));
  const double s = a / b + b / a;
  return 0.25 * s * s;
}

// ---------------------------------------------------------------------------
// Dimensionality

struct DimensionalityReport {
  double schmidt_lower = 1.0;       ///< K
  double analyzer_bandwidth = 1.0;  ///< N
  double lower = 1.0;
  double upper = 1.0;
  std::string regime;               ///< schmidt-limited | analyzer-limited | product-state
  std::vector<std::string> warnings;

  [[nodiscard]] std::string interval() const { return fmt::format("({:.6g}, {:.6g})", lower, upper); }
};

/// The probed dimension is bounded below by the binding constraint
/// min(K, N) and above by the analyzer bandwidth N.
inline DimensionalityReport dimensionality_report(double k_number, double n_modes) {
  if (!(n_modes >= 1.0)) throw std::invalid_argument("dimensionality_report: N must be >= 1");
  if (!(k_number >= 1.0)) throw std::invalid_argument("dimensionality_report: K must be >= 1");
  DimensionalityReport d;
  d.schmidt_lower = k_number;
  d.analyzer_bandwidth = n_modes;
  d.upper = n_modes;
  d.lower = std::min(k_number, n_modes);
  if (n_modes < k_number) {
    d.regime = "analyzer-limited";
    d.warnings.push_back("analyzer bandwidth N is below the Schmidt number K; N binds the probed dimension");
  } else if (k_number <= 1.0) {
    d.regime = "product-state";
    d.warnings.push_back("K = 1: the source emits a product state, no spatial entanglement");
  } else {
    d.regime = "schmidt-limited";
  }
  return d;
}

inline DimensionalityReport dimensionality_report(const SchmidtResult& k, double n_modes) {
  return dimensionality_report(k.k_number, n_modes);
}

inline void write_schmidt_text(std::ostream& os, std::span<const SchmidtResult> results, const CrystalParams& crystal,
                               const std::optional<DimensionalityReport>& dim) {
  os << "Schmidt number report\n";
  os << "=====================\n";
  fmt::print(os, "pump waist        : {:.6g} mm\n", crystal.pump_waist * 1e3);
  fmt::print(os, "crystal length    : {:.6g} mm\n", crystal.crystal_length * 1e3);
  fmt::print(os, "pump wavelength   : {:.6g} nm\n", crystal.pump_wavelength * 1e9);
  os << "\n";
  for (const auto& r : results) {
    fmt::print(os, "method {:<12} pump_index {:<8.5g} K = {:.6g}", to_string(r.method), r.pump_index, r.k_number);
    if (r.method == SchmidtMethod::exact_svd) {
      fmt::print(os, "  (grid {}, {})", r.grid_size, r.converged ? "converged" : "NOT converged");
      if (r.k_half_grid) fmt::print(os, ", K at half grid {:.6g}", *r.k_half_grid);
    }
    os << "\n";
  }
  if (dim) {
    os << "\nDimensionality\n";
    fmt::print(os, "K (Schmidt lower bound) : {:.6g}\n", dim->schmidt_lower);
    fmt::print(os, "N (analyzer bandwidth)  : {:.6g}\n", dim->analyzer_bandwidth);
    fmt::print(os, "probed dimension D in {}  [{}]\n", dim->interval(), dim->regime);
    for (const auto& w : dim->warnings) fmt::print(os, "warning: {}\n", w);
  }
}

/// key=value lines, one result per prefix.
inline void write_schmidt_keyvalue(std::ostream& os, std::span<const SchmidtResult> results,
                                   const std::optional<DimensionalityReport>& dim) {
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    const std::string p = fmt::format("result{}.", k);
    fmt::print(os, "{}method={}\n", p, to_string(r.method));
    fmt::print(os, "{}pump_index={:.17g}\n", p, r.pump_index);
    fmt::print(os, "{}k_number={:.17g}\n", p, r.k_number);
    if (r.method == SchmidtMethod::exact_svd) {
      fmt::print(os, "{}grid_size={}\n", p, r.grid_size);
      fmt::print(os, "{}converged={}\n", p, r.converged);
      if (r.k_half_grid) fmt::print(os, "{}k_half_grid={:.17g}\n", p, *r.k_half_grid);
    }
  }
  if (dim) {
    fmt::print(os, "dimensionality.k={:.17g}\n", dim->schmidt_lower);
    fmt::print(os, "dimensionality.n={:.17g}\n", dim->analyzer_bandwidth);
    fmt::print(os, "dimensionality.lower={:.17g}\n", dim->lower);
    fmt::print(os, "dimensionality.upper={:.17g}\n", dim->upper);
    fmt::print(os, "dimensionality.regime={}\n", dim->regime);
  }
}

}  // namespace fracoam
