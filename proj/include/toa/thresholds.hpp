#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "toa/mse_models.hpp"
#include "toa/pulse_model.hpp"

namespace toa {

struct ThresholdAlphas {
  double pr = 0.5;    // e <= pr * e_U
  double am1 = 2.0;   // e <= am1 * c_e
  double am2 = 0.5;   // e <= am2 * c_e
  double as = 1.1;    // e <= as * c
};

/// SNR thresholds, linear. Missing entries were not observed (numeric) or
/// are undefined for the ACR (analytic).
struct ThresholdSet {
  std::optional<double> rho_pr;
  std::optional<double> rho_am1;
  std::optional<double> rho_am2;
  std::optional<double> rho_as;
  ThresholdAlphas alphas;
  /// "numeric:<curve label>" or "analytic".
  std::string provenance;

  /// rho_pr <= rho_am1 <= rho_am2 <= rho_as over the entries present.
  bool ordered() const;
};

std::optional<double> to_db(const std::optional<double>& rho);

/// Crossing rule shared by both numeric extractors: the smallest grid SNR after
/// which e(rho) <= alpha * target(rho) holds at every larger grid point.
/// Sampled curve: the bracketing cell is refined on the log-log interpolant.
ThresholdSet thresholds_numeric(const MseCurve& curve, const AcrModel& acr,
                                const EstimationSetup& setup, const ThresholdAlphas& alphas = {});

/// Evaluator form: the bracketing cell is refined by bisection to 0.01 dB.
/// The grid is in dB, strictly increasing.
ThresholdSet thresholds_numeric(const std::function<double(double)>& mse, std::span<const double> snr_db,
                                const AcrModel& acr, const EstimationSetup& setup,
                                const ThresholdAlphas& alphas = {}, CurveLabel label = CurveLabel::e_num);

/// Constant of the Lambert-W equation H e^H = H_x.
enum class LambertConstant {
  /// -pi G^2 [1 - R]^2 / 2: the Q-tail approximation solved exactly.
  derived,
  /// -pi G^2 [1 - R] / 2, one factor of [1 - R] short.
  as_printed,
};

struct AnalyticOptions {
  ThresholdAlphas alphas;
  LambertConstant constant = LambertConstant::derived;
};

/// -2 W_{-1}(H_as) / (1 - R(Delta)); Delta = pi/(4 beta_s) without carrier,
/// 1/f_c with one (using e_R(Delta)). Throws std::domain_error when H_as < -1/e.
double rho_as_analytic(const AcrModel& acr, const AnalyticOptions& options = {});
/// Oscillating only: Delta = 1/f_c, G = alpha_am2 / (2 Delta^2 beta_e^2).
double rho_am2_analytic(const AcrModel& acr, const AnalyticOptions& options = {});
/// Oscillating only: Delta = pi/(4 beta_e), envelope ACR. Depends on the envelope shape only.
double rho_am1_analytic(const AcrModel& acr, const AnalyticOptions& options = {});

/// All closed forms that apply; formulas outside their domain leave the entry
/// empty, and so do rho_am1/rho_am2 when the two cross (small lambda).
ThresholdSet thresholds_analytic(const AcrModel& acr, const AnalyticOptions& options = {});

/// Passband ACR built on `envelope` with carrier lambda * B.
AcrModel acr_at_lambda(const std::shared_ptr<const EnvelopeShape>& envelope, double lambda);

enum class LambdaStatus { found, below_minimum, ceiling };

struct LambdaSearch {
  LambdaStatus status = LambdaStatus::found;
  double lambda = 0.0;  // the floor or ceiling when not found
};

struct LambdaSearchOptions {
  AnalyticOptions analytic;
  double floor = 0.1;
  double ceiling = 50.0;
};

/// lambda0 with rho_as_analytic(lambda0) = rho0, by bisection (the threshold
/// grows with lambda).
LambdaSearch lambda_at_asymptotic_threshold(const std::shared_ptr<const EnvelopeShape>& envelope,
                                            double rho0, const LambdaSearchOptions& options = {});

}  // namespace toa
