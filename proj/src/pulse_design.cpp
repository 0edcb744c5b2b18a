#include "toa/pulse_design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "toa/special_math.hpp"
#include "toa/units.hpp"

namespace toa {

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const EnvelopeShape> unit_gaussian() {
  static const auto shape = std::make_shared<const GaussianEnvelope>(1e-9);
  return shape;
}

DesignSolution at_band_edge(double b, double fc, DesignRegime regime) {
  DesignSolution s;
  s.b0_hz = b;
  s.fc0_hz = fc;
  s.lambda0 = fc / b;
  s.regime = regime;
  return s;
}

LambdaSearch find_lambda0(const DesignConstraints& c, const DesignOptions& options) {
  LambdaSearchOptions lo;
  lo.analytic = options.analytic;
  lo.analytic.alphas = c.alphas;
  lo.ceiling = options.lambda_ceiling;
  return lambda_at_asymptotic_threshold(unit_gaussian(), c.rho0, lo);
}

// Lower bound on mse_num used to prune the grid search: with q the largest
// pairwise probability that a sidelobe beats the centre, 1 - P_0 >= q.
double mse_lower_bound(const AcrModel& acr, const EstimationSetup& setup, const IntervalSet& iv,
                       double rho) {
  const double theta0 = setup.delay_s;
  const double w0 = iv.width(iv.center);
  const double s0 = std::min(crlb(acr, rho), w0 * w0 / 12.0);
  double d_min = INFINITY;
  double q = 0.0;
  for (std::size_t n = 0; n < iv.size(); ++n) {
    if (n == iv.center) continue;
    const double off = iv.testpoints[n] - theta0;
    d_min = std::min(d_min, off * off);
    q = std::max(q, q_function(std::sqrt(0.5 * rho * std::max(0.0, 1.0 - acr.acr(off)))));
  }
  if (!std::isfinite(d_min)) return s0;
  return d_min > s0 ? s0 + q * (d_min - s0) : d_min;
}

}  // namespace

void DesignConstraints::validate() const {
  if (!(f_low_hz > 0.0 && f_high_hz > f_low_hz) || !std::isfinite(f_high_hz)) {
    throw std::domain_error("design: band must satisfy 0 < f_l < f_h");
  }
  if (fixed_bandwidth_hz &&
      !(*fixed_bandwidth_hz > 0.0 && *fixed_bandwidth_hz <= f_high_hz - f_low_hz)) {
    throw std::domain_error("design: fixed bandwidth must lie in (0, f_h - f_l]");
  }
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
    throw std::domain_error("design: SNR must be positive");
  }
}

FeasibleGeometry feasible_geometry(const DesignConstraints& c) {
  c.validate();
  FeasibleGeometry g;
  g.b_max = c.f_high_hz - c.f_low_hz;
  g.lambda_min = 0.5 + c.f_low_hz / g.b_max;
  if (c.fixed_bandwidth_hz) {
    const double b = *c.fixed_bandwidth_hz;
    g.lambda_b_min = c.f_low_hz / b + 0.5;
    g.lambda_b_max = c.f_high_hz / b - 0.5;
    g.corners = {{b, c.f_low_hz + b / 2.0}, {b, c.f_high_hz - b / 2.0}};
  } else {
    g.corners = {{0.0, c.f_low_hz}, {0.0, c.f_high_hz}, {g.b_max, 0.5 * (c.f_low_hz + c.f_high_hz)}};
  }
  return g;
}

std::string to_string(DesignRegime regime) {
  switch (regime) {
    case DesignRegime::below_begin_ambiguity: return "below_begin_ambiguity";
    case DesignRegime::at_begin_ambiguity: return "at_begin_ambiguity";
    case DesignRegime::crlb_achieved: return "crlb_achieved";
    case DesignRegime::between_ecrlb_and_crlb: return "between_ecrlb_and_crlb";
    case DesignRegime::clamped_lambda_max: return "clamped_lambda_max";
  }
  return "unknown";
}

bool DesignSolution::satisfies(const DesignConstraints& c, double tol_hz) const {
  if (fc0_hz - b0_hz / 2.0 < c.f_low_hz - tol_hz) return false;
  if (fc0_hz + b0_hz / 2.0 > c.f_high_hz + tol_hz) return false;
  if (c.fixed_bandwidth_hz && std::abs(b0_hz - *c.fixed_bandwidth_hz) > tol_hz) return false;
  return b0_hz > 0.0;
}

nlohmann::json to_json(const DesignSolution& s) {
  nlohmann::json j;
  j["B0_GHz"] = s.b0_hz * 1e-9;
  j["fc0_GHz"] = s.fc0_hz * 1e-9;
  j["lambda0"] = s.lambda0;
  j["regime"] = to_string(s.regime);
  if (s.mse) {
    j["mse_ps2"] = *s.mse * 1e24;
    j["rmse_ps"] = std::sqrt(*s.mse) * 1e12;
  } else if (s.mse_interval) {
    j["mse_interval_ps2"] = {s.mse_interval->first * 1e24, s.mse_interval->second * 1e24};
    j["rmse_ps"] = {std::sqrt(s.mse_interval->first) * 1e12, std::sqrt(s.mse_interval->second) * 1e12};
  } else {
    j["mse_ps2"] = nullptr;
    j["rmse_ps"] = nullptr;
  }
  return j;
}

double carrier_crlb(double fc_hz, double rho) { return 1.0 / (4.0 * kPi * kPi * fc_hz * fc_hz * rho); }

double gaussian_ecrlb(double b_hz, double rho) {
  return 2.0 * std::log(10.0) / (kPi * kPi * b_hz * b_hz * rho);
}

double fixed_bandwidth_rmse_gain(const DesignConstraints& c) {
  if (!c.fixed_bandwidth_hz) {
    throw std::domain_error("fixed_bandwidth_rmse_gain: no fixed bandwidth");
  }
  c.validate();
  const double b = *c.fixed_bandwidth_hz;
  // Best case for the optimizer: the lowest carrier is deep in its asymptotic
  // region (MSE c) while the highest sits on its threshold (alpha_as c).
  // The SNR cancels.
  const double low = carrier_crlb(c.f_low_hz + b / 2.0, 1.0);
  const double high = c.alphas.as * carrier_crlb(c.f_high_hz - b / 2.0, 1.0);
  return std::sqrt(low / high);
}

DesignSolution design_free_bandwidth(const DesignConstraints& c, const DesignOptions& options) {
  const FeasibleGeometry g = feasible_geometry(c);
  if (c.fixed_bandwidth_hz) {
    throw std::invalid_argument("design_free_bandwidth: constraints carry a fixed bandwidth");
  }
  const double mid = 0.5 * (c.f_low_hz + c.f_high_hz);
  AnalyticOptions ao = options.analytic;
  ao.alphas = c.alphas;
  const double am1_db = linear_to_db(rho_am1_analytic(acr_at_lambda(unit_gaussian(), 1.0), ao));
  const double rho0_db = linear_to_db(c.rho0);

  if (rho0_db < am1_db - options.delta_db) {
    return at_band_edge(g.b_max, mid, DesignRegime::below_begin_ambiguity);
  }
  if (rho0_db <= am1_db + options.delta_db) {
    DesignSolution s = at_band_edge(g.b_max, mid, DesignRegime::at_begin_ambiguity);
    s.mse = gaussian_ecrlb(g.b_max, c.rho0);
    return s;
  }
  const LambdaSearch l0 = find_lambda0(c, options);
  if (l0.status == LambdaStatus::below_minimum || l0.lambda < g.lambda_min) {
    DesignSolution s = at_band_edge(g.b_max, mid, DesignRegime::between_ecrlb_and_crlb);
    s.mse_interval = std::make_pair(carrier_crlb(mid, c.rho0), gaussian_ecrlb(g.b_max, c.rho0));
    return s;
  }
  DesignSolution s;
  s.b0_hz = 2.0 * c.f_high_hz / (2.0 * l0.lambda + 1.0);
  s.fc0_hz = l0.lambda * s.b0_hz;
  s.lambda0 = l0.lambda;
  s.regime = DesignRegime::crlb_achieved;
  s.mse = carrier_crlb(s.fc0_hz, c.rho0);
  return s;
}

DesignSolution design_fixed_bandwidth(const DesignConstraints& c, const DesignOptions& options) {
  const FeasibleGeometry g = feasible_geometry(c);
  if (!c.fixed_bandwidth_hz) {
    throw std::invalid_argument("design_fixed_bandwidth: constraints lack a fixed bandwidth");
  }
  const double b = *c.fixed_bandwidth_hz;
  const LambdaSearch l0 = find_lambda0(c, options);
  if (l0.status == LambdaStatus::below_minimum || l0.lambda < *g.lambda_b_min) {
    DesignSolution s = at_band_edge(b, c.f_low_hz + b / 2.0, DesignRegime::between_ecrlb_and_crlb);
    s.mse_interval = std::make_pair(carrier_crlb(s.fc0_hz, c.rho0), gaussian_ecrlb(b, c.rho0));
    return s;
  }
  if (l0.lambda > *g.lambda_b_max) {
    DesignSolution s = at_band_edge(b, c.f_high_hz - b / 2.0, DesignRegime::clamped_lambda_max);
    s.mse = carrier_crlb(s.fc0_hz, c.rho0);
    return s;
  }
  DesignSolution s = at_band_edge(b, l0.lambda * b, DesignRegime::crlb_achieved);
  s.mse = carrier_crlb(s.fc0_hz, c.rho0);
  return s;
}

DesignSolution design_pulse(const DesignConstraints& c, const DesignOptions& options) {
  return c.fixed_bandwidth_hz ? design_fixed_bandwidth(c, options) : design_free_bandwidth(c, options);
}

PulsePreset design_point(double b_hz, double fc_hz) {
  PulsePreset p;
  p.name = "design";
  p.pulse = {PulseKind::passband_gaussian, gaussian_width(b_hz), fc_hz};
  p.setup = {0.0, -2.0 * p.pulse.width_s, 1.5 * p.pulse.width_s};
  return p;
}

SearchResult exhaustive_search_reference(const DesignConstraints& c, const SearchOptions& options) {
  const FeasibleGeometry g = feasible_geometry(c);
  if (!(options.b_step_hz > 0.0 && options.fc_step_hz > 0.0)) {
    throw std::invalid_argument("exhaustive search: grid steps must be positive");
  }
  struct Candidate {
    double b;
    double fc;
    double bound;
  };
  std::vector<Candidate> grid;
  const double eps_b = 1e-9 * options.b_step_hz;
  const double eps_f = 1e-9 * options.fc_step_hz;
  std::vector<double> widths;
  if (c.fixed_bandwidth_hz) {
    widths.push_back(*c.fixed_bandwidth_hz);
  } else {
    for (int k = 1; k * options.b_step_hz <= g.b_max + eps_b; ++k) widths.push_back(k * options.b_step_hz);
  }
  for (double b : widths) {
    const auto first = static_cast<long>(std::ceil((c.f_low_hz + b / 2.0 - eps_f) / options.fc_step_hz));
    for (long m = first; m * options.fc_step_hz <= c.f_high_hz - b / 2.0 + eps_f; ++m) {
      grid.push_back({b, static_cast<double>(m) * options.fc_step_hz, 0.0});
    }
  }
  if (grid.empty()) throw std::runtime_error("exhaustive search: empty feasible grid");
  for (auto& cand : grid) {
    const PulsePreset p = design_point(cand.b, cand.fc);
    const AcrModel acr = AcrModel::from_pulse(p.pulse);
    cand.bound = mse_lower_bound(acr, p.setup, partition_domain(acr, p.setup), c.rho0);
  }
  std::vector<std::size_t> order(grid.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid[a].bound < grid[b].bound; });

  SearchResult best;
  best.grid_points = grid.size();
  best.mse = INFINITY;
  std::size_t best_index = grid.size();
  for (std::size_t idx : order) {
    const Candidate& cand = grid[idx];
    if (cand.bound > best.mse) break;
    const PulsePreset p = design_point(cand.b, cand.fc);
    const AcrModel acr = AcrModel::from_pulse(p.pulse);
    MseNumOptions mo = options.mse;
    mo.mvn.seed = mix_seed(options.seed, idx);
    const double e = mse_num(acr, p.setup, partition_domain(acr, p.setup), c.rho0, mo).mse;
    ++best.evaluated;
    // Grid order (B, then f_c) breaks ties.
    if (e < best.mse || (e == best.mse && idx < best_index)) {
      best.mse = e;
      best.b1_hz = cand.b;
      best.fc1_hz = cand.fc;
      best_index = idx;
    }
  }
  best.lambda1 = best.fc1_hz / best.b1_hz;
  return best;
}

}  // namespace toa
