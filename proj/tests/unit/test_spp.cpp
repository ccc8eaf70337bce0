#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "fracoam/analyzer.hpp"
#include "fracoam/spp.hpp"

using namespace fracoam;
using std::numbers::pi;

TEST(SppPhase, IdealPlateIsLinearInAzimuthFromTheEdge) {
  const auto spec = SppSpec::ideal(3.5, 0.4);
  for (double phi : {0.41, 1.0, 3.0, 6.0, 6.6, -2.0}) {
    double psi = std::fmod(phi - 0.4, 2 * pi);
    if (psi < 0) psi += 2 * pi;
    EXPECT_NEAR(phase_profile(spec, 1e-3, phi), 3.5 * psi, 1e-12) << phi;
  }
  // the full 2 pi l jump sits at the edge
  EXPECT_NEAR(phase_profile(spec, 1e-3, 0.4 - 1e-9) - phase_profile(spec, 1e-3, 0.4 + 1e-9), 7 * pi, 1e-6);
}

TEST(SppPhase, StepIndexFromPlateParameters) {
  EXPECT_NEAR(step_index_from_plate(5.6e-6, 1.5, 1.0, 800e-9), 3.5, 1e-12);
  EXPECT_THROW((void)step_index_from_plate(1e-6, 1.5, 1.0, 0.0), std::invalid_argument);
}

TEST(SppPhase, RampReplacesTheJumpContinuously) {
  SppSpec spec = SppSpec::ideal(3.5, 0.0);
  spec.ramp_width = 6.0 * pi / 180.0;
  const SppModel plate(spec);
  const double half = spec.ramp_width / 2;
  // ramp midpoint is at the nominal edge
  EXPECT_NEAR(plate.ramp_phase(0.0), 3.5 * pi, 1e-9);
  // continuous at both ramp ends
  EXPECT_NEAR(plate.ramp_phase(half - 1e-10), plate.ramp_phase(half + 1e-10), 1e-7);
  EXPECT_NEAR(plate.ramp_phase(-half - 1e-10), plate.ramp_phase(-half + 1e-10), 1e-7);
  // outside the ramp the ideal profile is unchanged
  EXPECT_NEAR(plate.ramp_phase(1.0), 3.5, 1e-12);
  // slope inside the ramp
  const double slope = (plate.ramp_phase(0.01) - plate.ramp_phase(-0.01)) / 0.02;
  EXPECT_NEAR(slope, -3.5 * (2 * pi - spec.ramp_width) / spec.ramp_width, 1e-6);
}

TEST(SppTransmission, OpaqueAnomalyBlocksTheCentre) {
  SppSpec spec = SppSpec::ideal(2.5);
  spec.anomaly_radius = 150e-6;
  const SppModel plate(spec);
  EXPECT_EQ(std::abs(plate.transmission(100e-6, 1.0)), 0.0);
  EXPECT_NEAR(std::abs(plate.transmission(200e-6, 1.0)), 1.0, 1e-15);
}

TEST(SppTransmission, ScrambledAnomalyIsPhaseOnlyAndDeterministic) {
  SppSpec spec = SppSpec::ideal(2.5);
  spec.anomaly_radius = 150e-6;
  spec.anomaly_model = AnomalyModel::scrambled_phase;
  spec.roughness_seed = 11;
  const SppModel plate(spec);
  const SppModel again(spec);
  double spread = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double r = 1e-6 * (1 + 2.9 * k);
    const auto t = plate.transmission(r, 0.1 * k);
    EXPECT_NEAR(std::abs(t), 1.0, 1e-15);
    EXPECT_EQ(t, again.transmission(r, 0.1 * k));
    spread += std::abs(t - plate.transmission(r, 0.1 * k + 0.05));
  }
  EXPECT_GT(spread, 10.0);
}

TEST(SppRoughness, ScreenHasRequestedRmsAndIsSeeded) {
  SppSpec spec = SppSpec::ideal(0.0);
  spec.surface_rms = 15e-9;
  spec.roughness_seed = 5;
  const double scale = 2 * pi * kIndexContrast / spec.wavelength;
  // independent midpoint-rule rms of the phase over the screen disk
  const int nr = 200, nphi = 256;
  double acc = 0.0, area = 0.0;
  const SppModel plate(spec);
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * kScreenRadius / nr;
    for (int j = 0; j < nphi; ++j) {
      const double h = plate.phase(r, (j + 0.5) * 2 * pi / nphi) / scale;
      acc += r * h * h;
      area += r;
    }
  }
  EXPECT_NEAR(std::sqrt(acc / area), 15e-9, 0.2e-9);

  SppSpec other = spec;
  other.roughness_seed = 6;
  EXPECT_NE(phase_profile(spec, 1e-3, 1.0), phase_profile(other, 1e-3, 1.0));
  EXPECT_EQ(phase_profile(spec, 1e-3, 1.0), SppModel(spec).phase(1e-3, 1.0));
}

TEST(SppRoughness, ScreenRotatesWithThePlate) {
  SppSpec a = SppSpec::measured_plate(3.48, 0.0, 3);
  SppSpec b = a;
  b.orientation = 1.2;
  for (double r : {3e-4, 1e-3, 2e-3})
    EXPECT_NEAR(phase_profile(a, r, 0.7), phase_profile(b, r, 0.7 + 1.2), 1e-9);
}

TEST(SppSpec, Validation) {
  SppSpec s;
  s.ramp_width = -0.1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.ramp_width = pi / 2;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.surface_rms = -1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.step_index = NAN;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.wavelength = 0;
  EXPECT_THROW(SppModel{s}, std::invalid_argument);
  EXPECT_TRUE(SppSpec::ideal(1.5).is_ideal());
  EXPECT_FALSE(SppSpec::measured_plate(1.5, 0, 1).is_ideal());
}

TEST(SppBlock, RoundTripsThroughText) {
  SppSpec s = SppSpec::measured_plate(-3.48, 0.3, 99);
  std::ostringstream os;
  write_spp_block(os, s);
  std::istringstream is(os.str());
  const auto back = read_spp_block(is);
  EXPECT_EQ(back.step_index, s.step_index);
  EXPECT_NEAR(back.orientation, s.orientation, 1e-15);
  EXPECT_NEAR(back.ramp_width, s.ramp_width, 1e-15);
  EXPECT_NEAR(back.anomaly_radius, s.anomaly_radius, 1e-18);
  EXPECT_NEAR(back.surface_rms, s.surface_rms, 1e-22);
  EXPECT_NEAR(back.wavelength, s.wavelength, 1e-20);
  EXPECT_EQ(back.roughness_seed, 99u);
}

TEST(SppBlock, RejectsUnknownKeysAndBadValues) {
  std::istringstream unknown("step_index = 1\ncolour = red\n");
  EXPECT_THROW(read_spp_block(unknown), ConfigError);
  std::istringstream bad("step_index = 1.5x\n");
  EXPECT_THROW(read_spp_block(bad), ConfigError);
  std::istringstream no_eq("step_index 1.5\n");
  EXPECT_THROW(read_spp_block(no_eq), ConfigError);
  std::istringstream neg_seed("roughness_seed = -4\n");
  EXPECT_THROW(read_spp_block(neg_seed), ConfigError);
  std::istringstream invalid("ramp_width_deg = 120\n");
  EXPECT_THROW(read_spp_block(invalid), ConfigError);
  std::istringstream comments("# plate\nstep_index = 2.5 ; half-integer\n\n");
  EXPECT_EQ(read_spp_block(comments).step_index, 2.5);
}

TEST(AnomalyModel, StringConversion) {
  EXPECT_EQ(anomaly_model_from_string(to_string(AnomalyModel::opaque)), AnomalyModel::opaque);
  EXPECT_EQ(anomaly_model_from_string(to_string(AnomalyModel::scrambled_phase)), AnomalyModel::scrambled_phase);
  EXPECT_THROW(anomaly_model_from_string("glass"), ConfigError);
}
