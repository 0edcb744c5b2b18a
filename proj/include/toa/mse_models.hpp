#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "toa/mvn_prob.hpp"
#include "toa/pulse_model.hpp"

namespace toa {

/// CRLB 1 / (rho beta_s^2), s^2.
double crlb(const AcrModel& acr, double rho);
/// Envelope CRLB 1 / (rho beta_e^2), s^2.
double ecrlb(const AcrModel& acr, double rho);
/// MSE of an estimate uniform on the a priori domain: T^2/12 + (Theta - mid)^2.
double max_mse(const EstimationSetup& setup);

/// Variance assigned to a sidelobe interval around testpoint n (oscillating mode).
enum class IntervalVariance {
  squared_curvature_ratio,  // c * R''_0^2 / R''_n^2
  curvature_ratio,          // c * |R''_0 / R''_n|
};

struct MseNumOptions {
  MvnOptions mvn;
  IntervalVariance variance = IntervalVariance::squared_curvature_ratio;
  /// Intervals whose pairwise win probability against the centre is below this
  /// get P_n = 0 without integration.
  double skip_tol = 1e-15;
};

struct MseNumResult {
  double mse = 0.0;
  double std_error = 0.0;
  double probability_sum = 0.0;
  double probability_std_error = 0.0;
  std::vector<double> probabilities;
  /// Some R''_n vanished; those intervals used the uniform variance.
  bool curvature_fallback = false;
  bool regularized = false;
};

/// Interval-estimation MSE approximation sum_n P_n [(Theta - mu_n)^2 + sigma_n^2]
/// with P_n from the Gaussian law of the cross-correlation at the testpoints.
MseNumResult mse_num(const AcrModel& acr, const EstimationSetup& setup,
                     const IntervalSet& intervals, double rho, const MseNumOptions& options = {});

/// How the McAulay term Q(.) is evaluated.
enum class TailModel {
  exact,       // Q via erfc
  asymptotic,  // phi(x)/x, the form the closed-form thresholds invert exactly
};

/// Offset to the competing peaks: 1/f_c for oscillating ACRs, pi/(4 beta_s) otherwise.
double sidelobe_offset(const AcrModel& acr);
/// pi / (4 beta_e).
double envelope_offset(const AcrModel& acr);

/// c + 2 Delta^2 Q(sqrt(rho/2 [1 - R(Delta)])).
double mse_ana(const AcrModel& acr, double rho, TailModel tail = TailModel::exact);
/// c_e + 2 Delta^2 Q(sqrt(rho/2 [1 - e_R(Delta)])), Delta = pi/(4 beta_e). Passband only.
double mse_ana_env(const AcrModel& acr, double rho, TailModel tail = TailModel::exact);

enum class CurveLabel { e_num, e_ana, e_ana_env, z1, z2, b1, b2, monte_carlo, crlb, ecrlb, e_u };

std::string to_string(CurveLabel label);

/// Sampled MSE versus linear SNR.
struct MseCurve {
  CurveLabel label = CurveLabel::e_num;
  std::vector<double> snr;  // linear, strictly increasing
  std::vector<double> mse;  // s^2

  void validate() const;
};

/// Evaluates mse_num on each grid SNR; grid point k uses seed mix_seed(seed, k).
MseCurve mse_num_curve(const AcrModel& acr, const EstimationSetup& setup,
                       const IntervalSet& intervals, std::span<const double> snr_db,
                       const MseNumOptions& options = {}, std::uint64_t seed = 1);

/// Columns snr_db,mse_s2,rmse_s,label.
void write_mse_csv(std::ostream& out, std::span<const MseCurve> curves);

/// Locale-independent shortest round-trip formatting.
std::string format_number(double value);

}  // namespace toa
