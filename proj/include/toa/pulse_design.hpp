#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "toa/mse_models.hpp"
#include "toa/thresholds.hpp"

namespace toa {

/// Band [f_l, f_h] the pulse spectrum must occupy, optional fixed bandwidth,
/// available SNR (linear).
struct DesignConstraints {
  double f_low_hz = 3.1e9;
  double f_high_hz = 10.6e9;
  std::optional<double> fixed_bandwidth_hz;
  double rho0 = 0.0;
  ThresholdAlphas alphas;

  /// Throws std::domain_error on an empty band, a bandwidth that does not fit,
  /// or a non-positive SNR.
  void validate() const;
};

struct FeasibleGeometry {
  double b_max = 0.0;       // f_h - f_l
  double lambda_min = 0.0;  // 1/2 + f_l / B_max, the IFBW at (B_max, midband)
  std::optional<double> lambda_b_min;  // f_l/b + 1/2
  std::optional<double> lambda_b_max;  // f_h/b - 1/2
  /// Vertices (B, f_c) of the feasible region: the triangle for a free
  /// bandwidth, the two ends of the segment B = b otherwise.
  std::vector<std::pair<double, double>> corners;
};

FeasibleGeometry feasible_geometry(const DesignConstraints& c);

enum class DesignRegime {
  below_begin_ambiguity,
  at_begin_ambiguity,
  crlb_achieved,
  between_ecrlb_and_crlb,
  clamped_lambda_max,
};

std::string to_string(DesignRegime regime);

struct DesignSolution {
  double b0_hz = 0.0;
  double fc0_hz = 0.0;
  double lambda0 = 0.0;  // f_c0 / B0
  DesignRegime regime = DesignRegime::crlb_achieved;
  /// Point prediction, s^2. Absent when only an interval (or nothing) is known.
  std::optional<double> mse;
  /// (lower, upper) bracket, s^2.
  std::optional<std::pair<double, double>> mse_interval;

  /// Band edges respected within tol (Hz); B0 equals a fixed bandwidth.
  bool satisfies(const DesignConstraints& c, double tol_hz = 1.0) const;
};

/// {B0_GHz, fc0_GHz, lambda0, regime, mse_ps2 | mse_interval_ps2, rmse_ps}.
nlohmann::json to_json(const DesignSolution& s);

struct DesignOptions {
  AnalyticOptions analytic;
  /// Half-width of the "close to the begin-ambiguity threshold" case.
  double delta_db = 1.0;
  double lambda_ceiling = 50.0;
};

/// c for a Gaussian envelope at carrier f_c, ignoring beta_e: 1/(4 pi^2 f_c^2 rho).
double carrier_crlb(double fc_hz, double rho);
/// c_e of the Gaussian pulse with -10 dB bandwidth B: 2 ln10 / (pi^2 B^2 rho).
double gaussian_ecrlb(double b_hz, double rho);

/// Largest RMSE gain from the carrier choice at a fixed bandwidth, i.e. the ratio
/// of the designs at the two band extremes: sqrt(c(f_l + b/2) / (alpha_as c(f_h - b/2))).
/// Independent of the SNR. Requires c.fixed_bandwidth_hz.
double fixed_bandwidth_rmse_gain(const DesignConstraints& c);

DesignSolution design_free_bandwidth(const DesignConstraints& c, const DesignOptions& options = {});
DesignSolution design_fixed_bandwidth(const DesignConstraints& c, const DesignOptions& options = {});
/// Dispatches on c.fixed_bandwidth_hz.
DesignSolution design_pulse(const DesignConstraints& c, const DesignOptions& options = {});

/// Gaussian passband pulse with -10 dB bandwidth B on carrier f_c, and its
/// domain [-2, 1.5] T_w around Theta = 0.
PulsePreset design_point(double b_hz, double fc_hz);

struct SearchOptions {
  double b_step_hz = 0.2e9;
  double fc_step_hz = 0.1e9;
  MseNumOptions mse;
  std::uint64_t seed = 1;
};

struct SearchResult {
  double b1_hz = 0.0;
  double fc1_hz = 0.0;
  double lambda1 = 0.0;
  double mse = 0.0;  // e1, s^2
  std::size_t grid_points = 0;
  std::size_t evaluated = 0;
};

/// Grid argmin of mse_num over the feasible region. Points are visited in
/// increasing order of a lower bound on mse_num and the scan stops once the
/// bound exceeds the best value found. Ties go to the smaller B, then f_c.
SearchResult exhaustive_search_reference(const DesignConstraints& c, const SearchOptions& options = {});

}  // namespace toa
