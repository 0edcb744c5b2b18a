#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "toa/mse_models.hpp"
#include "toa/thresholds.hpp"

namespace toa {

/// Threshold sets of one sweep point, one per source curve.
struct SweepRow {
  std::string variable;  // "gamma" or "lambda"
  double value = 0.0;
  std::vector<ThresholdSet> sets;
};

struct SweepOptions {
  std::vector<double> snr_db;  // defaults to -10:1:45 when empty
  MseNumOptions mse;
  AnalyticOptions analytic;
  /// Also extract thresholds from z_1 and b_1.
  bool bounds = true;
  std::uint64_t seed = 1;
};

/// Baseband Gaussian pulses of the given widths on the fixed domain [-2, 2] ns;
/// e_num uses the centred lobe-width partition.
std::vector<SweepRow> gamma_sweep(std::span<const double> widths_s, const SweepOptions& options = {});

/// Gaussian passband pulses with f_c = 6.85 GHz and T_w set by lambda, domain
/// [-2, 1.5] T_w.
std::vector<SweepRow> lambda_sweep(std::span<const double> lambdas, const SweepOptions& options = {});

/// The baseband / passband sweep geometry, exposed for tests.
PulsePreset gamma_sweep_point(double width_s);
PulsePreset lambda_sweep_point(double lambda);

/// Columns sweep_var,value,rho_pr_db,rho_am1_db,rho_am2_db,rho_as_db,provenance;
/// missing thresholds are empty fields.
void write_threshold_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace toa
