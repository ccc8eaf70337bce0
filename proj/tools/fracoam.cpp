#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fracoam/analyzer.hpp"
#include "fracoam/config.hpp"
#include "fracoam/error.hpp"
#include "fracoam/field.hpp"
#include "fracoam/parallel.hpp"
#include "fracoam/spp.hpp"
#include "fracoam/svg.hpp"
#include "fracoam/twophoton.hpp"

namespace fs = std::filesystem;
using namespace fracoam;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNotConverged = 3, kIoFailure = 4 };

struct Globals {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::optional<long long> seed;
  bool plots = false;
};

/// Options of the selected subcommand, echoed into the run manifest.
using OptionEcho = std::vector<std::pair<std::string, std::string>>;

RunConfig resolve_config(const Globals& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
  if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
  if (g.plots) cfg.emit_plots = true;
  if (g.seed) {
    if (*g.seed < 0) throw ConfigError("--seed must be non-negative");
    cfg.plate_s.roughness_seed = static_cast<std::uint64_t>(*g.seed);
    cfg.plate_i.roughness_seed = static_cast<std::uint64_t>(*g.seed) + 1;
  }
  return cfg;
}

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      throw IoError(fmt::format("cannot create output directory {}: {}", dir_.string(), ec.message()));
  }

  [[nodiscard]] const fs::path& dir() const { return dir_; }

  template <class Writer>
  fs::path write(const std::string& name, Writer&& writer) const {
    const fs::path path = dir_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    writer(os);
    os.flush();
    if (!os) throw IoError("failed writing " + path.string());
    return path;
  }

 private:
  fs::path dir_;
};

void write_manifest(const Output& out, const RunConfig& cfg, const std::string& command, const OptionEcho& opts) {
  out.write("run_manifest.ini", [&](std::ostream& os) {
    fmt::print(os, "; fracoam {}\n", command);
    for (const auto& [k, v] : opts) fmt::print(os, "; {} = {}\n", k, v);
    os << "\n";
    write_run_config(os, cfg);
  });
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + fmt::format("{}", xs[k]);
  return s;
}

// ---------------------------------------------------------------------------

struct DecomposeOpts {
  int max_order = 7;
  std::optional<double> step;
  std::optional<double> basis_waist_um;
};

int cmd_decompose(const RunConfig& base, const DecomposeOpts& o) {
  RunConfig cfg = base;
  if (o.step) cfg.plate_s.step_index = *o.step;
  const double basis_waist = o.basis_waist_um ? *o.basis_waist_um * 1e-6 : cfg.fiber_waist;
  const Output out(cfg.output_dir);
  write_manifest(out, cfg, "decompose",
                 {{"max_order", std::to_string(o.max_order)}, {"basis_waist_um", fmt::format("{}", basis_waist * 1e6)}});

  const auto grid = cfg.make_polar_grid();
  const auto mode = analyzer_mode(cfg.signal(), grid);
  const auto spectrum = decompose(mode, basis_waist, o.max_order);
  out.write("spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, spectrum); });
  if (cfg.emit_plots) {
    std::vector<std::string> labels;
    std::vector<double> power;
    for (const auto& c : spectrum.coefficients) {
      labels.push_back(fmt::format("l={} p={}", c.index.l, c.index.p));
      power.push_back(std::norm(c.value));
    }
    out.write("spectrum.svg", [&](std::ostream& os) {
      svg::bar_chart(os, labels, power,
                     {fmt::format("LG power spectrum, step {} (order <= {})", cfg.plate_s.step_index, o.max_order),
                      "mode (ascending order, l, p)", "power", false});
    });
  }
  fmt::print("modes: {}\n", spectrum.coefficients.size());
  fmt::print("captured power (order <= {}): {:.6f}\n", o.max_order, spectrum.captured_power);
  fmt::print("radial (p != 0) share: {:.6f}\n", spectrum.radial_share());
  return kOk;
}

// ---------------------------------------------------------------------------

struct CurveOpts {
  int max_order = 20;
  int order_step = 1;
};

std::vector<int> order_list(int lo, int hi, int step) {
  if (step < 1 || lo < 0 || hi < lo) throw ConfigError("invalid order range");
  std::vector<int> orders;
  for (int m = lo; m <= hi; m += step) orders.push_back(m);
  if (orders.back() != hi) orders.push_back(hi);
  return orders;
}

void plot_curve(const Output& out, const std::string& name, const FidelityCurve& curve, const std::string& title) {
  svg::Series s{"F(M)", {}, {}, true};
  for (const auto& p : curve) {
    s.x.push_back(p.order);
    s.y.push_back(p.fidelity);
  }
  out.write(name, [&](std::ostream& os) { svg::line_plot(os, {s}, {title, "mode order M", "fidelity", false}); });
}

int cmd_fidelity_curve(const RunConfig& cfg, const CurveOpts& o) {
  const Output out(cfg.output_dir);
  write_manifest(out, cfg, "fidelity-curve",
                 {{"max_order", std::to_string(o.max_order)}, {"order_step", std::to_string(o.order_step)}});
  const auto orders = order_list(0, o.max_order, o.order_step);
  const auto curve = fidelity_curve(cfg.signal(), cfg.fiber_waist, orders, cfg.make_polar_grid());
  out.write("fidelity.csv", [&](std::ostream& os) { write_fidelity_csv(os, curve); });
  if (cfg.emit_plots) plot_curve(out, "fidelity.svg", curve, "Captured power vs mode order");
  fmt::print("{:>6} {:>8} {:>10}\n", "order", "modes", "fidelity");
  for (const auto& p : curve) fmt::print("{:>6} {:>8} {:>10.6f}\n", p.order, p.modes, p.fidelity);
  return kOk;
}

// ---------------------------------------------------------------------------

struct BandwidthOpts {
  double target = 0.98;
  int min_order = 2;
  int max_order = 60;
  int order_step = 2;
  int fit_min_order = kDefaultFitMinOrder;
};

int cmd_bandwidth(const RunConfig& cfg, const BandwidthOpts& o) {
  const Output out(cfg.output_dir);
  // high-order LG modes reach out to about sqrt(M+1) waists
  const double r_factor = std::max(cfg.grid.r_max_factor, std::sqrt(o.max_order + 1.0) + 4.0);
  const auto grid = cfg.make_polar_grid(r_factor, 160);
  write_manifest(out, cfg, "bandwidth",
                 {{"target", fmt::format("{}", o.target)},
                  {"orders", fmt::format("{}..{} step {}", o.min_order, o.max_order, o.order_step)},
                  {"fit_min_order", std::to_string(o.fit_min_order)},
                  {"effective_grid", fmt::format("{} x {}, r_max_factor {}", grid->n_radial, grid->n_azimuthal,
                                                 r_factor)}});
  const auto orders = order_list(o.min_order, o.max_order, o.order_step);
  const auto curve = fidelity_curve(cfg.signal(), cfg.fiber_waist, orders, grid);
  const auto est = extrapolate_bandwidth(curve, o.target, o.fit_min_order);
  out.write("bandwidth.csv", [&](std::ostream& os) { write_fidelity_csv(os, curve); });
  out.write("bandwidth.txt", [&](std::ostream& os) {
    fmt::print(os, "target={:.17g}\n", o.target);
    fmt::print(os, "modes={:.17g}\n", est.modes);
    fmt::print(os, "order={:.17g}\n", est.order);
    fmt::print(os, "amplitude={:.17g}\n", est.amplitude);
    fmt::print(os, "exponent={:.17g}\n", est.exponent);
    fmt::print(os, "fit_residual={:.17g}\n", est.fit_residual);
    fmt::print(os, "fit_points={}\n", est.fit_points);
    fmt::print(os, "extrapolated={}\n", est.extrapolated);
  });
  if (cfg.emit_plots) {
    svg::Series data{"1 - F (computed)", {}, {}, true};
    svg::Series fit{"power-law fit", {}, {}, false};
    for (const auto& p : curve) {
      data.x.push_back(p.order);
      data.y.push_back(1.0 - p.fidelity);
      fit.x.push_back(p.order);
      fit.y.push_back(est.amplitude * std::pow(p.order + 1.0, -est.exponent));
    }
    out.write("bandwidth.svg", [&](std::ostream& os) {
      svg::line_plot(os, {data, fit}, {"Infidelity tail", "mode order M", "1 - F", true});
    });
  }
  fmt::print("fidelity at order {}: {:.6f}\n", curve.back().order, curve.back().fidelity);
  if (est.fit_points > 0)
    fmt::print("tail fit: 1 - F = {:.4g} (M+1)^-{:.4f}  ({} points, rms log residual {:.3g})\n", est.amplitude,
               est.exponent, est.fit_points, est.fit_residual);
  fmt::print("target fidelity {}: order {:.1f}, N = {:.0f} modes{}\n", o.target, est.order, est.modes,
             est.extrapolated ? " (extrapolated)" : "");
  return kOk;
}

// ---------------------------------------------------------------------------

struct FringeOpts {
  std::vector<double> alpha_i_deg{0.0, 90.0, 180.0, 270.0};
  int samples = 64;
  std::string model = "entangled";
  std::optional<std::string> pump;
};

TwoPhotonModel model_from_string(const std::string& s) {
  if (s == "entangled" || s == "ideal") return TwoPhotonModel::ideal_entangled;
  if (s == "separable") return TwoPhotonModel::separable;
  throw ConfigError("unknown model '" + s + "' (expected entangled or separable)");
}

int cmd_fringe(const RunConfig& base, const FringeOpts& o) {
  RunConfig cfg = base;
  if (o.samples < 8) throw ConfigError("--samples must be at least 8");
  if (o.pump) cfg.pump = pump_profile_from_string(*o.pump);
  const auto model = model_from_string(o.model);
  const Output out(cfg.output_dir);
  write_manifest(out, cfg, "fringe",
                 {{"alpha_i_deg", join(o.alpha_i_deg)}, {"samples", std::to_string(o.samples)}, {"model", o.model}});

  const auto grid = cfg.make_polar_grid();
  std::vector<double> alpha_s(static_cast<std::size_t>(o.samples));
  for (int k = 0; k < o.samples; ++k) alpha_s[k] = 2.0 * std::numbers::pi * k / o.samples;
  std::optional<double> analytic;
  if (complementary_plates(cfg.signal(), cfg.idler())) analytic.emplace(cfg.plate_s.step_index);

  std::vector<svg::Series> series;
  for (double a_deg : o.alpha_i_deg) {
    const auto curve = fringe(model, cfg.signal(), cfg.idler(), cfg.crystal, a_deg * kDeg, alpha_s, grid, cfg.pump);
    out.write(fmt::format("fringe_alpha_i_{}.csv", a_deg),
              [&](std::ostream& os) { write_fringe_csv(os, curve, analytic); });
    svg::Series s{fmt::format("alpha_i = {} deg", a_deg), {}, {}, false};
    for (const auto& p : curve.samples) {
      s.x.push_back(p.alpha_s / kDeg);
      s.y.push_back(p.probability);
    }
    series.push_back(std::move(s));
    double pmax = 0.0;
    double pmin = INFINITY;
    for (const auto& p : curve.samples) {
      pmax = std::max(pmax, p.probability);
      pmin = std::min(pmin, p.probability);
    }
    fmt::print("alpha_i = {:>6} deg: visibility {:.6f}  (max {:.6f}, min {:.3e})\n", a_deg, visibility(curve), pmax,
               pmin);
  }
  if (!analytic) fmt::print("note: plates are not complementary, analytic column omitted\n");
  if (cfg.emit_plots)
    out.write("fringe.svg", [&](std::ostream& os) {
      svg::line_plot(os, series, {fmt::format("Coincidence fringes ({})", to_string(model)), "alpha_s [deg]",
                                  "coincidence probability", false});
    });
  return kOk;
}

// ---------------------------------------------------------------------------

struct SchmidtOpts {
  std::string method = "both";
  int grid_size = 4096;
  std::string kernel = "gaussian";
  double width_factor = 0.193;
  std::vector<double> sweep;  // lo, hi, step
  std::optional<double> bandwidth;
  std::optional<double> k_lower;
};

std::optional<double> read_bandwidth_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("modes=", 0) == 0) return std::stod(line.substr(6));
  return std::nullopt;
}

int cmd_schmidt(const RunConfig& cfg, const SchmidtOpts& o) {
  if (o.method != "approx" && o.method != "exact" && o.method != "both")
    throw ConfigError("--method must be approx, exact or both");
  if (o.kernel != "gaussian" && o.kernel != "sinc") throw ConfigError("--kernel must be gaussian or sinc");
  if (!o.sweep.empty() && (o.sweep.size() != 3 || !(o.sweep[2] > 0.0) || o.sweep[1] < o.sweep[0]))
    throw ConfigError("--pump-index-sweep expects LO HI STEP with LO <= HI and STEP > 0");
  const Output out(cfg.output_dir);
  write_manifest(out, cfg, "schmidt",
                 {{"method", o.method},
                  {"grid_size", std::to_string(o.grid_size)},
                  {"kernel", o.kernel},
                  {"gaussian_width_factor", fmt::format("{}", o.width_factor)},
                  {"pump_index_sweep", join(o.sweep)}});

  std::vector<SchmidtResult> results;
  std::optional<SchmidtResult> approx;
  std::optional<SchmidtResult> exact;
  if (o.method != "exact") {
    approx = schmidt_approx(cfg.crystal);
    results.push_back(*approx);
    fmt::print("approximate K (pump_index {}): {:.6g}\n", cfg.crystal.pump_index, approx->k_number);
    if (cfg.crystal.pump_index == 1.0)
      fmt::print("  note: vacuum pump wavenumber; the in-crystal convention scales k_p by the refractive index\n");
  }
  if (o.method != "approx") {
    ExactSchmidtOptions opt;
    opt.kernel = o.kernel == "gaussian" ? PhaseMatchingKernel::gaussian : PhaseMatchingKernel::sinc;
    opt.gaussian_width_factor = o.width_factor;
    const auto t0 = std::chrono::steady_clock::now();
    exact = schmidt_exact(cfg.crystal, o.grid_size, opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(*exact);
    fmt::print("exact K ({} kernel, grid {}): {:.6g}  [{:.2f} s]\n", o.kernel, o.grid_size, exact->k_number, secs);
    if (exact->k_half_grid)
      fmt::print("  K at half grid: {:.6g} -> {}\n", *exact->k_half_grid,
                 exact->converged ? "converged" : "NOT converged, increase --grid-size");
    if (opt.kernel == PhaseMatchingKernel::gaussian)
      fmt::print("  closed form for this kernel: {:.6g}\n", double_gaussian_schmidt(cfg.crystal, o.width_factor));
  }
  if (approx && exact)
    fmt::print("K_exact {} K_approx ({:.3g} x)\n", exact->k_number >= approx->k_number ? ">=" : "<",
               exact->k_number / approx->k_number);

  if (!o.sweep.empty()) {
    fmt::print("\n{:>10} {:>12}\n", "pump_index", "K_approx");
    const int steps = static_cast<int>(std::floor((o.sweep[1] - o.sweep[0]) / o.sweep[2] + 1e-9));
    for (int k = 0; k <= steps; ++k) {
      CrystalParams c = cfg.crystal;
      c.pump_index = o.sweep[0] + k * o.sweep[2];
      const auto r = schmidt_approx(c);
      results.push_back(r);
      const bool band = std::abs(r.k_number - 3700.0) <= 100.0;
      fmt::print("{:>10.4f} {:>12.1f}{}\n", c.pump_index, r.k_number, band ? "  in 3600..3800" : "");
    }
  }

  std::optional<double> n_modes = o.bandwidth;
  if (!n_modes) n_modes = read_bandwidth_file(out.dir() / "bandwidth.txt");
  std::optional<DimensionalityReport> dim;
  if (n_modes) {
    double k = o.k_lower ? *o.k_lower : exact ? exact->k_number : approx ? approx->k_number : 1.0;
    dim = dimensionality_report(k, *n_modes);
    fmt::print("\ndimensionality: K = {:.6g}, N = {:.6g} -> D in {} [{}]\n", dim->schmidt_lower, dim->analyzer_bandwidth,
               dim->interval(), dim->regime);
    for (const auto& w : dim->warnings) fmt::print("warning: {}\n", w);
  } else {
    fmt::print("\nno analyzer bandwidth given (run `bandwidth` first or pass --bandwidth)\n");
  }
  out.write("schmidt_report.txt", [&](std::ostream& os) { write_schmidt_text(os, results, cfg.crystal, dim); });
  out.write("schmidt.kv", [&](std::ostream& os) { write_schmidt_keyvalue(os, results, dim); });
  return exact && !exact->converged ? kNotConverged : kOk;
}

// ---------------------------------------------------------------------------

struct TrainOpts {
  double rotate_deg = 0.0;
};

int cmd_train(const RunConfig& base, const TrainOpts& o) {
  RunConfig cfg = base;
  cfg.plate_i.orientation += o.rotate_deg * kDeg;
  const Output out(cfg.output_dir);
  write_manifest(out, cfg, "train", {{"rotate_deg", fmt::format("{}", o.rotate_deg)}});
  if (!complementary_plates(cfg.signal(), cfg.idler()))
    fmt::print("warning: plates are not complementary (steps {} and {})\n", cfg.plate_s.step_index,
               cfg.plate_i.step_index);
  const auto res = train(cfg.signal(), cfg.idler(), cfg.make_polar_grid());
  out.write("train.txt", [&](std::ostream& os) {
    fmt::print(os, "efficiency={:.17g}\n", res.efficiency);
    fmt::print(os, "coupled_fraction={:.17g}\n", res.coupled_fraction);
    fmt::print(os, "transmitted={:.17g}\n", res.transmitted);
  });
  fmt::print("train efficiency: {:.6f}\n", res.efficiency);
  fmt::print("coupled fraction: {:.6f}\n", res.coupled_fraction);
  fmt::print("transmitted power: {:.6f}\n", res.transmitted);
  return kOk;
}

// ---------------------------------------------------------------------------

struct FarfieldOpts {
  double k_max_factor = 8.0;
};

int cmd_farfield(const RunConfig& cfg, const FarfieldOpts& o) {
  const Output out(cfg.output_dir);
  write_manifest(out, cfg, "farfield", {{"k_max_factor", fmt::format("{}", o.k_max_factor)}});
  const auto grid = cfg.make_polar_grid();
  const auto near = analyzer_mode(cfg.signal(), grid);
  // the Gaussian's spectrum has waist 2 / w in k
  const auto kgrid = std::make_shared<const PolarGrid>(
      make_grid(cfg.grid.n_radial, cfg.grid.n_azimuthal, o.k_max_factor * 2.0 / cfg.fiber_waist));
  const auto far = far_field(near, kgrid);
  out.write("nearfield.csv", [&](std::ostream& os) { write_field_csv(os, near); });
  out.write("farfield.csv", [&](std::ostream& os) { write_field_csv(os, far); });
  if (cfg.emit_plots) {
    out.write("nearfield.svg", [&](std::ostream& os) { svg::polar_heatmap(os, near, "Analyzer mode, near field"); });
    out.write("farfield.svg", [&](std::ostream& os) { svg::polar_heatmap(os, far, "Analyzer mode, far field"); });
  }
  fmt::print("near-field power: {:.8f}\n", norm2(near));
  fmt::print("far-field power within k_max: {:.8f}\n", norm2(far));
  fmt::print("mean OAM: {:.6f}\n", mean_oam(near));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional-OAM analyzer and two-photon entanglement simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "configuration file (INI)")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "output directory (overrides [run] output_dir)");
  app.add_option("--threads", g.threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "roughness seed; signal plate gets SEED, idler SEED+1");
  app.add_flag("--plots", g.plots, "also write SVG plots");

  DecomposeOpts dec;
  auto* c_dec = app.add_subcommand("decompose", "LG spectrum of the signal analyzer mode");
  c_dec->add_option("--max-order", dec.max_order, "truncation order")->check(CLI::NonNegativeNumber);
  c_dec->add_option("--step", dec.step, "override the signal plate step index");
  c_dec->add_option("--basis-waist-um", dec.basis_waist_um, "LG basis waist (default: fiber waist)");

  CurveOpts curve;
  auto* c_curve = app.add_subcommand("fidelity-curve", "captured power versus truncation order");
  c_curve->add_option("--max-order", curve.max_order)->check(CLI::NonNegativeNumber);
  c_curve->add_option("--order-step", curve.order_step)->check(CLI::PositiveNumber);

  BandwidthOpts bw;
  auto* c_bw = app.add_subcommand("bandwidth", "modes needed to reach a target fidelity");
  c_bw->add_option("--target", bw.target, "target fidelity");
  c_bw->add_option("--min-order", bw.min_order);
  c_bw->add_option("--max-order", bw.max_order);
  c_bw->add_option("--order-step", bw.order_step);
  c_bw->add_option("--fit-min-order", bw.fit_min_order, "smallest order used in the tail fit");

  FringeOpts fr;
  auto* c_fr = app.add_subcommand("fringe", "coincidence probability versus signal plate orientation");
  c_fr->add_option("--alpha-i", fr.alpha_i_deg, "idler orientations [deg]")->delimiter(',');
  c_fr->add_option("--samples", fr.samples, "signal orientations over 360 deg");
  c_fr->add_option("--model", fr.model, "entangled | separable");
  c_fr->add_option("--pump", fr.pump, "flat | gaussian");

  SchmidtOpts sch;
  auto* c_sch = app.add_subcommand("schmidt", "Schmidt number and dimensionality report");
  c_sch->add_option("--method", sch.method, "approx | exact | both");
  c_sch->add_option("--grid-size", sch.grid_size, "points per axis for the exact decomposition");
  c_sch->add_option("--kernel", sch.kernel, "gaussian | sinc phase matching");
  c_sch->add_option("--width-factor", sch.width_factor, "Gaussian phase-matching width factor");
  c_sch->add_option("--pump-index-sweep", sch.sweep, "LO HI STEP")->expected(3);
  c_sch->add_option("--bandwidth", sch.bandwidth, "analyzer bandwidth N (default: read bandwidth.txt)");
  c_sch->add_option("--k-lower", sch.k_lower, "K used in the dimensionality report");

  TrainOpts tr;
  auto* c_tr = app.add_subcommand("train", "conversion efficiency of two analyzers in series");
  c_tr->add_option("--rotate-deg", tr.rotate_deg, "extra rotation of the second plate [deg]");

  FarfieldOpts ff;
  auto* c_ff = app.add_subcommand("farfield", "near and far field of the signal analyzer mode");
  c_ff->add_option("--k-max-factor", ff.k_max_factor, "far-field extent in units of 2 / fiber waist");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (g.threads > 0) set_num_threads(g.threads);
    const RunConfig cfg = resolve_config(g);
    if (c_dec->parsed()) return cmd_decompose(cfg, dec);
    if (c_curve->parsed()) return cmd_fidelity_curve(cfg, curve);
    if (c_bw->parsed()) return cmd_bandwidth(cfg, bw);
    if (c_fr->parsed()) return cmd_fringe(cfg, fr);
    if (c_sch->parsed()) return cmd_schmidt(cfg, sch);
    if (c_tr->parsed()) return cmd_train(cfg, tr);
    if (c_ff->parsed()) return cmd_farfield(cfg, ff);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kConfigError;
  } catch (const ConvergenceError& e) {
    fmt::print(stderr, "not converged: {}\n", e.what());
    return kNotConverged;
  } catch (const IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kIoFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFailure;
  }
  return kFailure;
}
