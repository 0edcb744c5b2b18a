#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "rel.hpp"
#include "toa/pulse_design.hpp"

using namespace toa;

namespace {
double from_db(double x) { return std::pow(10.0, x / 10.0); }

DesignConstraints fcc(double rho_db) {
  DesignConstraints c;
  c.rho0 = from_db(rho_db);
  return c;
}
}  // namespace

TEST_CASE("feasible region of the 3.1-10.6 GHz band") {
  const FeasibleGeometry g = feasible_geometry(fcc(20.0));
  CHECK(g.b_max == rel(7.5e9).epsilon(1e-15));
  CHECK(g.lambda_min == rel(0.5 + 3.1 / 7.5));
  CHECK(std::abs(g.lambda_min - 0.913) <= 1e-3);
  CHECK(g.corners.size() == 3);
  CHECK_FALSE(g.lambda_b_min.has_value());

  DesignConstraints fixed = fcc(20.0);
  fixed.fixed_bandwidth_hz = 1e9;
  const FeasibleGeometry f = feasible_geometry(fixed);
  CHECK(*f.lambda_b_min == rel(3.6));
  CHECK(*f.lambda_b_max == rel(10.1));
  CHECK(f.corners.size() == 2);
}

TEST_CASE("constraint validation") {
  DesignConstraints c = fcc(20.0);
  c.f_low_hz = 10e9;
  c.f_high_hz = 3e9;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = fcc(20.0);
  c.fixed_bandwidth_hz = 8e9;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = fcc(20.0);
  c.rho0 = 0.0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
}

TEST_CASE("closed-form bounds used by the design") {
  CHECK(carrier_crlb(1e9, 1.0) == rel(1.0 / (4.0 * M_PI * M_PI * 1e18)));
  CHECK(gaussian_ecrlb(1e9, 1.0) == rel(2.0 * std::log(10.0) / (M_PI * M_PI * 1e18)));
}

TEST_CASE("free-bandwidth design at 22 dB") {
  const DesignConstraints c = fcc(22.0);
  const DesignSolution s = design_pulse(c);
  CHECK(s.regime == DesignRegime::crlb_achieved);
  CHECK(s.satisfies(c));
  CHECK(s.lambda0 == rel(1.99326141475).epsilon(1e-6));
  CHECK(s.fc0_hz + s.b0_hz / 2 == rel(10.6e9));
  CHECK(std::abs(s.fc0_hz - 8.39e9) <= 0.15e9);
  REQUIRE(s.mse.has_value());
  CHECK(*s.mse * 1e24 == rel(2.27).epsilon(0.05));
}

TEST_CASE("fixed-bandwidth designs move the carrier with the SNR") {
  DesignConstraints c = fcc(27.5);
  c.fixed_bandwidth_hz = 1e9;
  const DesignSolution low = design_pulse(c);
  // Closed-form lambda0 = 3.704; the lower band edge allows 3.6.
  CHECK(low.fc0_hz == rel(3.70387100543e9).epsilon(1e-8));
  CHECK(std::abs(low.fc0_hz - 3.6e9) <= 0.15e9);
  CHECK(low.b0_hz == 1e9);
  c.rho0 = from_db(35.0);
  const DesignSolution high = design_pulse(c);
  CHECK(high.fc0_hz > 7.5e9);
  CHECK(high.satisfies(c));
}

TEST_CASE("carrier gain at a fixed bandwidth") {
  DesignConstraints c = fcc(30.0);
  c.fixed_bandwidth_hz = 1e9;
  CHECK(fixed_bandwidth_rmse_gain(c) == rel(2.675).epsilon(0.05));
  CHECK(fixed_bandwidth_rmse_gain(c) == rel(10.1 / 3.6 / std::sqrt(1.1)));
  CHECK_THROWS_AS(fixed_bandwidth_rmse_gain(fcc(30.0)), std::domain_error);
}

TEST_CASE("begin-ambiguity case uses the full band") {
  const DesignSolution s = design_pulse(fcc(14.8032176624));
  CHECK(s.regime == DesignRegime::at_begin_ambiguity);
  CHECK(s.b0_hz == 7.5e9);
  CHECK(s.fc0_hz == rel(6.85e9));
  // 2 ln10 / (pi^2 B0^2 rho0) at rho0 = 14 dB is 330.24 ps^2.
  CHECK(*design_pulse(fcc(14.0)).mse * 1e24 == rel(330.24).epsilon(1e-4));
}

TEST_CASE("exhaustive reference at 22 dB") {
  const DesignConstraints c = fcc(22.0);
  const SearchResult r = exhaustive_search_reference(c);
  CHECK(std::abs(r.lambda1 - 1.8) <= 0.2);
  CHECK(r.lambda1 <= design_pulse(c).lambda0);
  CHECK(r.fc1_hz + r.b1_hz / 2 <= 10.6e9 + 1.0);
  CHECK(r.fc1_hz - r.b1_hz / 2 >= 3.1e9 - 1.0);
  CHECK(r.evaluated <= r.grid_points);
}

TEST_CASE("low SNR gives an interval or nothing") {
  const DesignSolution s = design_pulse(fcc(5.0));
  CHECK(s.regime == DesignRegime::below_begin_ambiguity);
  CHECK_FALSE(s.mse.has_value());
  const nlohmann::json j = to_json(s);
  CHECK(j.contains("regime"));
  CHECK(j["rmse_ps"].is_null());
}

TEST_CASE("JSON layout") {
  const nlohmann::json j = to_json(design_pulse(fcc(22.0)));
  for (const char* key : {"B0_GHz", "fc0_GHz", "lambda0", "regime", "mse_ps2", "rmse_ps"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["rmse_ps"].get<double>() == rel(std::sqrt(j["mse_ps2"].get<double>())));
  CHECK(j["regime"] == "crlb_achieved");
}

TEST_CASE("design point geometry") {
  const PulsePreset p = design_point(2e9, 6e9);
  CHECK(p.pulse.kind == PulseKind::passband_gaussian);
  CHECK(gaussian_bandwidth(p.pulse.width_s) == rel(2e9));
  CHECK(p.setup.lower_s == rel(-2.0 * p.pulse.width_s));
  CHECK(p.setup.upper_s == rel(1.5 * p.pulse.width_s));
}
