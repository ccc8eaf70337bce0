#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fracoam/config.hpp"

using namespace fracoam;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_run_config(is);
}

}  // namespace

TEST(RunConfig, EmptyFileGivesDefaults) {
  const auto cfg = parse("");
  EXPECT_EQ(cfg.plate_s.step_index, 3.5);
  EXPECT_EQ(cfg.plate_i.step_index, -3.5);
  EXPECT_EQ(cfg.fiber_waist, 1e-3);
  EXPECT_EQ(cfg.grid.n_radial, 128);
  EXPECT_EQ(cfg.grid.n_azimuthal, 1024);
  EXPECT_EQ(cfg.pump, PumpProfile::flat);
  EXPECT_FALSE(cfg.emit_plots);
}

TEST(RunConfig, ParsesEverySection) {
  const auto cfg = parse(R"(
[plate_s]
step_index = 3.48
ramp_width_deg = 6
[plate_i]
step_index = -3.48
orientation_deg = 90
roughness_seed = 8
[fiber]
waist_um = 850
[crystal]
pump_waist_um = 500
crystal_length_mm = 2
pump_wavelength_nm = 405
pump_index = 1.66
[grid]
n_radial = 96
n_azimuthal = 512
r_max_factor = 10
[run]
output_dir = results
emit_plots = true
anomaly_model = scrambled
pump_profile = gaussian
)");
  EXPECT_EQ(cfg.plate_s.step_index, 3.48);
  EXPECT_NEAR(cfg.plate_s.ramp_width, 6 * std::numbers::pi / 180, 1e-15);
  EXPECT_NEAR(cfg.plate_i.orientation, std::numbers::pi / 2, 1e-15);
  EXPECT_EQ(cfg.plate_i.roughness_seed, 8u);
  EXPECT_NEAR(cfg.fiber_waist, 850e-6, 1e-18);
  EXPECT_NEAR(cfg.crystal.pump_waist, 500e-6, 1e-18);
  EXPECT_NEAR(cfg.crystal.crystal_length, 2e-3, 1e-18);
  EXPECT_NEAR(cfg.crystal.pump_wavelength, 405e-9, 1e-20);
  EXPECT_EQ(cfg.crystal.pump_index, 1.66);
  EXPECT_EQ(cfg.grid.n_radial, 96);
  EXPECT_EQ(cfg.grid.n_azimuthal, 512);
  EXPECT_EQ(cfg.grid.r_max_factor, 10.0);
  EXPECT_EQ(cfg.output_dir, "results");
  EXPECT_TRUE(cfg.emit_plots);
  EXPECT_EQ(cfg.plate_s.anomaly_model, AnomalyModel::scrambled_phase);
  EXPECT_EQ(cfg.plate_i.anomaly_model, AnomalyModel::scrambled_phase);
  EXPECT_EQ(cfg.pump, PumpProfile::gaussian);
  const auto grid = cfg.make_polar_grid();
  EXPECT_NEAR(grid->r_max, 8.5e-3, 1e-15);
  EXPECT_EQ(cfg.make_polar_grid(12.0, 200)->n_radial, 200);
}

TEST(RunConfig, WrittenConfigParsesBackIdentically) {
  RunConfig cfg;
  cfg.plate_s = SppSpec::measured_plate(3.48, 0.25, 4);
  cfg.plate_i = SppSpec::measured_plate(-3.48, 0.0, 5);
  cfg.crystal.pump_index = 1.57;
  cfg.grid.n_radial = 160;
  cfg.emit_plots = true;
  cfg.pump = PumpProfile::gaussian;
  std::ostringstream os;
  write_run_config(os, cfg);
  const auto back = parse(os.str());
  std::ostringstream again;
  write_run_config(again, back);
  EXPECT_EQ(os.str(), again.str());
  EXPECT_EQ(back.plate_s.roughness_seed, 4u);
  EXPECT_NEAR(back.plate_s.orientation, 0.25, 1e-15);
}

TEST(RunConfig, RejectsUnknownSectionsAndKeys) {
  EXPECT_THROW(parse("[lens]\nfocal = 1\n"), ConfigError);
  EXPECT_THROW(parse("[fiber]\nwaist = 3\n"), ConfigError);
  EXPECT_THROW(parse("[crystal]\nlength = 3\n"), ConfigError);
  EXPECT_THROW(parse("[grid]\nsize = 3\n"), ConfigError);
  EXPECT_THROW(parse("[run]\nverbose = 1\n"), ConfigError);
  EXPECT_THROW(parse("[plate_s]\ncolour = red\n"), ConfigError);
  EXPECT_THROW(parse("stray = 1\n"), ConfigError);
}

TEST(RunConfig, RejectsMalformedValues) {
  EXPECT_THROW(parse("[grid]\nn_radial = 12.5\n"), ConfigError);
  EXPECT_THROW(parse("[grid]\nn_radial = 4\n"), ConfigError);
  EXPECT_THROW(parse("[fiber]\nwaist_um = wide\n"), ConfigError);
  EXPECT_THROW(parse("[fiber]\nwaist_um = -1\n"), ConfigError);
  EXPECT_THROW(parse("[crystal]\npump_index = 0.9\n"), ConfigError);
  EXPECT_THROW(parse("[run]\nemit_plots = maybe\n"), ConfigError);
  EXPECT_THROW(parse("[run]\npump_profile = square\n"), ConfigError);
  EXPECT_THROW(parse("[run]\nanomaly_model = glass\n"), ConfigError);
  EXPECT_THROW(parse("[plate_s\nstep_index = 1\n"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/fracoam.ini"), ConfigError);
}
