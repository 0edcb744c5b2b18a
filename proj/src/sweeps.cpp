#include "toa/sweeps.hpp"

#include <cmath>
#include <ostream>

#include "toa/lower_bounds.hpp"
#include "toa/mvn_prob.hpp"
#include "toa/units.hpp"

namespace toa {

namespace {

constexpr double kSweepCarrier = 6.85e9;

std::vector<double> grid_or_default(const SweepOptions& options) {
  if (!options.snr_db.empty()) return options.snr_db;
  return db_grid(-10.0, 45.0, 1.0);
}

SweepRow sweep_point(const std::string& variable, double value, const PulsePreset& p,
                     const PartitionOptions& partition, const SweepOptions& options,
                     std::uint64_t seed) {
  const AcrModel acr = AcrModel::from_pulse(p.pulse);
  const IntervalSet iv = partition_domain(acr, p.setup, partition);
  const auto grid = grid_or_default(options);
  SweepRow row;
  row.variable = variable;
  row.value = value;
  // Seeds depend on the SNR only, so bisection steps are reproducible.
  auto e_num = [&](double rho) {
    MseNumOptions mo = options.mse;
    mo.mvn.seed = mix_seed(seed, static_cast<std::uint64_t>(std::llround(linear_to_db(rho) * 1e4)));
    return mse_num(acr, p.setup, iv, rho, mo).mse;
  };
  row.sets.push_back(thresholds_numeric(e_num, grid, acr, p.setup, {}, CurveLabel::e_num));
  if (options.bounds) {
    auto z1 = [&](double rho) { return alb_z(acr, p.setup, rho, BoundVariant::left); };
    auto b1 = [&](double rho) { return alb_b(acr, p.setup, rho, BoundVariant::left); };
    row.sets.push_back(thresholds_numeric(z1, grid, acr, p.setup, {}, CurveLabel::z1));
    row.sets.push_back(thresholds_numeric(b1, grid, acr, p.setup, {}, CurveLabel::b1));
  }
  row.sets.push_back(thresholds_analytic(acr, options.analytic));
  return row;
}

void write_db(std::ostream& out, const std::optional<double>& rho) {
  out << ',';
  if (rho) out << format_number(std::round(linear_to_db(*rho) * 100.0) / 100.0);
}

}  // namespace

PulsePreset gamma_sweep_point(double width_s) {
  PulsePreset p;
  p.name = "gamma";
  p.pulse = {PulseKind::baseband_gaussian, width_s, 0.0};
  p.setup = {0.0, -2e-9, 2e-9};
  p.pulse.validate();
  return p;
}

PulsePreset lambda_sweep_point(double lambda) {
  PulsePreset p;
  p.name = "lambda";
  const double width = gaussian_width(kSweepCarrier / lambda);
  p.pulse = {PulseKind::passband_gaussian, width, kSweepCarrier};
  p.setup = {0.0, -2.0 * width, 1.5 * width};
  p.pulse.validate();
  return p;
}

std::vector<SweepRow> gamma_sweep(std::span<const double> widths_s, const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < widths_s.size(); ++k) {
    const PulsePreset p = gamma_sweep_point(widths_s[k]);
    const AcrModel acr = AcrModel::from_pulse(p.pulse);
    rows.push_back(sweep_point("gamma", p.setup.atbw(acr.bandwidth()), p, lobe_partition(acr), options,
                               mix_seed(options.seed, k)));
  }
  return rows;
}

std::vector<SweepRow> lambda_sweep(std::span<const double> lambdas, const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    rows.push_back(sweep_point("lambda", lambdas[k], lambda_sweep_point(lambdas[k]), {}, options,
                               mix_seed(options.seed, k)));
  }
  return rows;
}

void write_threshold_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "sweep_var,value,rho_pr_db,rho_am1_db,rho_am2_db,rho_as_db,provenance\n";
  for (const auto& row : rows) {
    for (const auto& set : row.sets) {
      out << row.variable << ',' << format_number(row.value);
      write_db(out, set.rho_pr);
      write_db(out, set.rho_am1);
      write_db(out, set.rho_am2);
      write_db(out, set.rho_as);
      out << ',' << set.provenance << '\n';
    }
  }
}

}  // namespace toa
