#pragma once

// Complex fields sampled on polar quadrature grids.
//
// Radial nodes are Gauss-Legendre points mapped to (0, r_max) with the r dr
// Jacobian folded into the weights; azimuthal samples sit at
// phi_j = (j + 1/2) * 2 pi / n_azimuthal so that a radial discontinuity placed at
// a multiple of the azimuthal step is never sampled on the edge itself.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fftw3.h>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fracoam/parallel.hpp"

namespace fracoam {

using cplx = std::complex<double>;

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
  return {std::move(x), std::move(w)};
}

struct PolarGrid {
  int n_radial = 0;
  int n_azimuthal = 0;
  double r_max = 0.0;
  std::vector<double> radial_nodes;
  /// Gauss-Legendre weight times r (area measure per unit azimuth).
  std::vector<double> radial_weights;

  [[nodiscard]] double azimuthal_step() const noexcept {
    return 2.0 * std::numbers::pi / n_azimuthal;
  }
  [[nodiscard]] double azimuth(int j) const noexcept { return (j + 0.5) * azimuthal_step(); }
  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_radial) * static_cast<std::size_t>(n_azimuthal);
  }
  /// Sum of all area weights; equals pi r_max^2 up to rounding.
  [[nodiscard]] double total_weight() const {
    return ordered_sum<double>(radial_weights) * n_azimuthal * azimuthal_step();
  }

  friend bool operator==(const PolarGrid& a, const PolarGrid& b) noexcept {
    return a.n_radial == b.n_radial && a.n_azimuthal == b.n_azimuthal && a.r_max == b.r_max;
  }
};

inline constexpr int kMinRadialNodes = 8;
inline constexpr int kMinAzimuthalSamples = 16;

/// Rejects grids too coarse to be a meaningful quadrature.
inline PolarGrid make_grid(int n_radial, int n_azimuthal, double r_max) {
  if (n_radial < kMinRadialNodes)
    throw std::invalid_argument(fmt::format("make_grid: n_radial={} below minimum {}", n_radial,
                                            kMinRadialNodes));
  if (n_azimuthal < kMinAzimuthalSamples)
    throw std::invalid_argument(fmt::format("make_grid: n_azimuthal={} below minimum {}",
                                            n_azimuthal, kMinAzimuthalSamples));
  if (!(r_max > 0.0)) throw std::invalid_argument("make_grid: r_max must be positive");
  PolarGrid g;
  g.n_radial = n_radial;
  g.n_azimuthal = n_azimuthal;
  g.r_max = r_max;
  auto [x, w] = gauss_legendre(n_radial);
  g.radial_nodes.resize(x.size());
  g.radial_weights.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = 0.5 * r_max * (x[i] + 1.0);
    g.radial_nodes[i] = r;
    g.radial_weights[i] = 0.5 * r_max * w[i] * r;
  }
  return g;
}

/// Default resolution: 128 x 1024 with r_max = 8 x the largest waist.
inline PolarGrid default_grid(double largest_waist) { return make_grid(128, 1024, 8.0 * largest_waist); }

using GridPtr = std::shared_ptr<const PolarGrid>;

class SampledField {
 public:
  SampledField() = default;
  explicit SampledField(GridPtr grid)
      : grid_(std::move(grid)), values_(grid_->size(), cplx{}) {}
  SampledField(GridPtr grid, std::vector<cplx> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size())
      throw std::invalid_argument("SampledField: value count does not match grid");
  }

  /// Samples fn(r, phi) at every node, rows in parallel.
  template <class Fn>
  static SampledField sample(GridPtr grid, Fn&& fn) {
    SampledField f(std::move(grid));
    const auto& g = *f.grid_;
    const int nphi = g.n_azimuthal;
    parallel_for(static_cast<std::size_t>(g.n_radial), [&](std::size_t i) {
      const double r = g.radial_nodes[i];
      for (int j = 0; j < nphi; ++j) f.values_[i * nphi + j] = fn(r, g.azimuth(j));
    });
    return f;
  }

  [[nodiscard]] const PolarGrid& grid() const noexcept { return *grid_; }
  [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
  [[nodiscard]] std::span<const cplx> values() const noexcept { return values_; }
  [[nodiscard]] std::span<cplx> values() noexcept { return values_; }
  [[nodiscard]] std::span<const cplx> row(int i) const noexcept {
    return std::span<const cplx>(values_).subspan(static_cast<std::size_t>(i) * grid_->n_azimuthal,
                                                   static_cast<std::size_t>(grid_->n_azimuthal));
  }
  [[nodiscard]] cplx at(int i, int j) const { return values_[static_cast<std::size_t>(i) * grid_->n_azimuthal + j]; }
  cplx& at(int i, int j) { return values_[static_cast<std::size_t>(i) * grid_->n_azimuthal + j]; }

  SampledField& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

inline void require_same_grid(const SampledField& f, const SampledField& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("fields are sampled on different grids");
}

/// <f|g> = sum of weight * conj(f) * g; conjugate-linear in f.
inline cplx inner_product(const SampledField& f, const SampledField& g) {
  require_same_grid(f, g);
  const auto& grid = f.grid();
  std::vector<cplx> rows(static_cast<std::size_t>(grid.n_radial));
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto fr = f.row(static_cast<int>(i));
    const auto gr = g.row(static_cast<int>(i));
    cplx acc{};
    for (std::size_t j = 0; j < fr.size(); ++j) acc += std::conj(fr[j]) * gr[j];
    rows[i] = acc * (grid.radial_weights[i] * grid.azimuthal_step());
  });
  return ordered_sum<cplx>(rows);
}

inline double norm2(const SampledField& f) {
  const auto& grid = f.grid();
  std::vector<double> rows(static_cast<std::size_t>(grid.n_radial));
  parallel_for(rows.size(), [&](std::size_t i) {
    double acc = 0.0;
    for (const cplx& v : f.row(static_cast<int>(i))) acc += std::norm(v);
    rows[i] = acc * grid.radial_weights[i] * grid.azimuthal_step();
  });
  return ordered_sum<double>(rows);
}

inline SampledField normalized(SampledField f) {
  const double n = norm2(f);
  if (!(n > 0.0)) throw std::invalid_argument("normalized: field has zero norm");
  f *= 1.0 / std::sqrt(n);
  return f;
}

/// Rotates the field by steps * azimuthal_step: g(phi) = f(phi - beta).
inline SampledField rotate(const SampledField& f, int steps) {
  const auto& grid = f.grid();
  const int n = grid.n_azimuthal;
  SampledField g(f.grid_ptr());
  const int s = ((steps % n) + n) % n;
  for (int i = 0; i < grid.n_radial; ++i)
    for (int j = 0; j < n; ++j) g.at(i, (j + s) % n) = f.at(i, j);
  return g;
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size(n) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  cplx* begin() noexcept { return reinterpret_cast<cplx*>(data); }

  fftw_complex* data;
  std::size_t size;
};

struct FftwPlan {
  fftw_plan plan = nullptr;
  ~FftwPlan() {
    if (plan != nullptr) {
      std::scoped_lock lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

/// In-place batched 1-D DFTs along rows of a rows x n buffer.
inline void batched_dft(FftwBuffer& buf, int rows, int n, int sign) {
  FftwPlan p;
  {
    std::scoped_lock lock(fftw_planner_mutex());
    p.plan = fftw_plan_many_dft(1, &n, rows, buf.data, nullptr, 1, n, buf.data, nullptr, 1, n, sign,
                                FFTW_ESTIMATE);
  }
  if (p.plan == nullptr) throw std::runtime_error("FFTW planning failed");
  fftw_execute(p.plan);
}

/// Canonical harmonic index for DFT bin k: m in [-n/2, n/2).
constexpr int harmonic_of_bin(int k, int n) noexcept { return k < (n + 1) / 2 ? k : k - n; }
constexpr int bin_of_harmonic(int m, int n) noexcept { return ((m % n) + n) % n; }

/// exp(-i pi m / 2) = (-i)^m, exact for integer m.
inline cplx minus_i_pow(int m) noexcept {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace detail

/// Azimuthal Fourier coefficients per radial node:
///   f(r_i, phi_j) = sum_m c_m(r_i) exp(i m phi_j),  m in [-N/2, N/2).
class AzimuthalHarmonics {
 public:
  AzimuthalHarmonics(GridPtr grid, std::vector<cplx> coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {}

  [[nodiscard]] const PolarGrid& grid() const noexcept { return *grid_; }
  [[nodiscard]] int min_harmonic() const noexcept { return -(grid_->n_azimuthal / 2); }
  [[nodiscard]] int max_harmonic() const noexcept { return (grid_->n_azimuthal - 1) / 2; }

  [[nodiscard]] cplx operator()(int i, int m) const {
    const int n = grid_->n_azimuthal;
    return coeffs_[static_cast<std::size_t>(i) * n + detail::bin_of_harmonic(m, n)];
  }

  /// Power 2 pi sum_i w_i |c_m(r_i)|^2 carried by harmonic m.
  [[nodiscard]] double power(int m) const {
    double acc = 0.0;
    for (int i = 0; i < grid_->n_radial; ++i) acc += grid_->radial_weights[i] * std::norm((*this)(i, m));
    return 2.0 * std::numbers::pi * acc;
  }

 private:
  GridPtr grid_;
  std::vector<cplx> coeffs_;
};

inline AzimuthalHarmonics azimuthal_harmonics(const SampledField& f) {
  const auto& grid = f.grid();
  const int n = grid.n_azimuthal;
  detail::FftwBuffer buf(grid.size());
  std::copy(f.values().begin(), f.values().end(), buf.begin());
  detail::batched_dft(buf, grid.n_radial, n, FFTW_FORWARD);
  std::vector<cplx> coeffs(grid.size());
  const double half_step = 0.5 * grid.azimuthal_step();
  for (int k = 0; k < n; ++k) {
    const int m = detail::harmonic_of_bin(k, n);
    const cplx shift = std::polar(1.0 / n, -m * half_step);
    for (int i = 0; i < grid.n_radial; ++i) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + k;
      coeffs[idx] = buf.begin()[idx] * shift;
    }
  }
  return {f.grid_ptr(), std::move(coeffs)};
}

/// Mean OAM sum_m m P_m / sum_m P_m. The harmonic window is the N harmonics
/// centred on the most powerful one, so a field whose spectrum is
/// concentrated near l0 is not biased by the asymmetric DFT index range.
inline double mean_oam(const SampledField& f) {
  const auto h = azimuthal_harmonics(f);
  const int n = f.grid().n_azimuthal;
  std::vector<double> power(static_cast<std::size_t>(n));
  int peak = 0;
  for (int m = h.min_harmonic(); m <= h.max_harmonic(); ++m) {
    power[static_cast<std::size_t>(detail::bin_of_harmonic(m, n))] = h.power(m);
    if (h.power(m) > h.power(peak)) peak = m;
  }
  double num = 0.0;
  double den = 0.0;
  const int lo = peak - n / 2 + 1;
  const int hi = peak + n / 2 - 1;
  for (int m = lo; m <= hi; ++m) {
    const double pm = power[static_cast<std::size_t>(detail::bin_of_harmonic(m, n))];
    num += m * pm;
    den += pm;
  }
  return num / den;
}

/// J_0(x) ... J_nmax(x) by Miller's downward recurrence, normalized with
/// J_0 + 2 sum_k J_2k = 1. Accurate for every order and argument, including
/// x > nmax.
inline void bessel_j_orders(int nmax, double x, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return;
  }
  const double ax = std::abs(x);
  const int top = std::max(nmax, static_cast<int>(std::ceil(ax)));
  int start = top + 20 + static_cast<int>(std::sqrt(40.0 * top));
  start += start % 2;
  double jp1 = 0.0;
  double j = 1e-30;
  double sum = 0.0;
  for (int k = start; k > 0; --k) {
    const double jm1 = (2.0 * k / ax) * j - jp1;
    jp1 = j;
    j = jm1;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      sum *= 1e-250;
      for (int q = k; q <= nmax; ++q) out[static_cast<std::size_t>(q)] *= 1e-250;
    }
    // j now holds J_{k-1}
    if (k - 1 <= nmax) out[static_cast<std::size_t>(k - 1)] = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) sum += 2.0 * j;
  }
  sum += j;  // J_0
  for (int q = 0; q <= nmax; ++q) out[static_cast<std::size_t>(q)] /= sum;
  if (x < 0.0)
    for (int q = 1; q <= nmax; q += 2) out[static_cast<std::size_t>(q)] = -out[static_cast<std::size_t>(q)];
}

/// Unitary 2-D Fourier transform F(k) = (1/2pi) int f(r) exp(-i k.r) d^2r,
/// evaluated on output_grid whose radial coordinate is the spatial frequency
/// |k| (rad per length unit). Computed as an azimuthal-harmonic Hankel
/// expansion: F_m(k) = (-i)^m int f_m(r) J_m(k r) r dr. Harmonics that do not
/// fit into the output azimuthal sampling are dropped.
inline SampledField far_field(const SampledField& f, GridPtr output_grid) {
  const auto& in = f.grid();
  const auto& out = *output_grid;
  const auto h = azimuthal_harmonics(f);
  const int m_lo = std::max(h.min_harmonic(), -(out.n_azimuthal / 2));
  const int m_hi = std::min(h.max_harmonic(), (out.n_azimuthal - 1) / 2);
  const int jmax = std::max(-m_lo, m_hi);
  const int nout = out.n_azimuthal;

  detail::FftwBuffer buf(out.size());
  std::fill(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(out.size()), cplx{});
  parallel_for(static_cast<std::size_t>(out.n_radial), [&](std::size_t ik) {
    const double k = out.radial_nodes[ik];
    std::vector<double> jn(static_cast<std::size_t>(jmax) + 1);
    std::vector<cplx> acc(static_cast<std::size_t>(m_hi - m_lo + 1));
    for (int i = 0; i < in.n_radial; ++i) {
      bessel_j_orders(jmax, k * in.radial_nodes[i], jn);
      const double w = in.radial_weights[i];
      for (int m = m_lo; m <= m_hi; ++m) {
        const int am = m < 0 ? -m : m;
        const double jm = (m < 0 && (am % 2 == 1)) ? -jn[static_cast<std::size_t>(am)] : jn[static_cast<std::size_t>(am)];
        acc[static_cast<std::size_t>(m - m_lo)] += w * jm * h(i, m);
      }
    }
    const double half_step = 0.5 * out.azimuthal_step();
    for (int m = m_lo; m <= m_hi; ++m) {
      const cplx fm = detail::minus_i_pow(m) * acc[static_cast<std::size_t>(m - m_lo)];
      buf.begin()[ik * nout + detail::bin_of_harmonic(m, nout)] = fm * std::polar(1.0, m * half_step);
    }
  });
  detail::batched_dft(buf, out.n_radial, nout, FFTW_BACKWARD);
  std::vector<cplx> values(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(out.size()));
  return {std::move(output_grid), std::move(values)};
}

/// Field dump: header `r,phi,re,im`, one row per node, radial-major.
inline void write_field_csv(std::ostream& os, const SampledField& f) {
  const auto& g = f.grid();
  os << "r,phi,re,im\n";
  for (int i = 0; i < g.n_radial; ++i)
    for (int j = 0; j < g.n_azimuthal; ++j) {
      const cplx v = f.at(i, j);
      fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g}\n", g.radial_nodes[static_cast<std::size_t>(i)],
                 g.azimuth(j), v.real(), v.imag());
    }
}

}  // namespace fracoam
