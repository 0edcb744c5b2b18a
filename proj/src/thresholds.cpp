#include "toa/thresholds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "toa/special_math.hpp"
#include "toa/units.hpp"

namespace toa {

namespace {

constexpr double kDbTol = 0.01;

struct Criterion {
  double alpha;
  std::function<double(double)> target;  // reference MSE at linear SNR
};

std::vector<std::optional<Criterion>> criteria(const AcrModel& acr, const EstimationSetup& setup,
                                               const ThresholdAlphas& a) {
  const double eu = max_mse(setup);
  std::vector<std::optional<Criterion>> out(4);
  out[0] = Criterion{a.pr, [eu](double) { return eu; }};
  if (acr.oscillating()) {
    out[1] = Criterion{a.am1, [&acr](double rho) { return ecrlb(acr, rho); }};
    out[2] = Criterion{a.am2, [&acr](double rho) { return ecrlb(acr, rho); }};
  }
  out[3] = Criterion{a.as, [&acr](double rho) { return crlb(acr, rho); }};
  return out;
}

void assign(ThresholdSet& set, std::size_t k, std::optional<double> rho) {
  switch (k) {
    case 0: set.rho_pr = rho; break;
    case 1: set.rho_am1 = rho; break;
    case 2: set.rho_am2 = rho; break;
    default: set.rho_as = rho; break;
  }
}

// Index of the first grid point from which the condition holds to the end;
// empty when it fails at the last point or already holds at the first.
std::optional<std::size_t> crossing_index(const std::vector<bool>& holds) {
  if (holds.empty() || !holds.back()) return std::nullopt;
  std::size_t k = holds.size() - 1;
  while (k > 0 && holds[k - 1]) --k;
  if (k == 0) return std::nullopt;
  return k;
}

void check_grid(std::span<const double> snr_db) {
  if (snr_db.size() < 2) throw std::invalid_argument("thresholds: need at least two grid points");
  for (std::size_t k = 1; k < snr_db.size(); ++k) {
    if (!(snr_db[k] > snr_db[k - 1])) {
      throw std::invalid_argument("thresholds: SNR grid must be strictly increasing");
    }
  }
}

double solve_lambert(double g, double one_minus_r, LambertConstant constant) {
  if (!(one_minus_r > 0.0)) {
    throw std::domain_error("threshold formula inapplicable: R(Delta) >= 1");
  }
  const double h = constant == LambertConstant::derived
                       ? -std::numbers::pi * g * g * one_minus_r * one_minus_r / 2.0
                       : -std::numbers::pi * g * g * one_minus_r / 2.0;
  if (h < -1.0 / std::numbers::e) {
    throw std::domain_error("threshold formula inapplicable: Lambert argument below -1/e");
  }
  return -2.0 * lambert_w_m1(h) / one_minus_r;
}

}  // namespace

bool ThresholdSet::ordered() const {
  const std::optional<double> seq[] = {rho_pr, rho_am1, rho_am2, rho_as};
  std::optional<double> prev;
  for (const auto& r : seq) {
    if (!r) continue;
    if (prev && *r < *prev) return false;
    prev = r;
  }
  return true;
}

std::optional<double> to_db(const std::optional<double>& rho) {
  if (!rho) return std::nullopt;
  return linear_to_db(*rho);
}

ThresholdSet thresholds_numeric(const MseCurve& curve, const AcrModel& acr,
                                const EstimationSetup& setup, const ThresholdAlphas& alphas) {
  curve.validate();
  std::vector<double> db(curve.snr.size());
  for (std::size_t k = 0; k < db.size(); ++k) db[k] = linear_to_db(curve.snr[k]);
  check_grid(db);
  ThresholdSet out;
  out.alphas = alphas;
  out.provenance = "numeric:" + to_string(curve.label);
  const auto crit = criteria(acr, setup, alphas);
  for (std::size_t c = 0; c < crit.size(); ++c) {
    if (!crit[c]) continue;
    // log(e / (alpha target)) in dB-space; the crossing is its zero.
    std::vector<double> margin(db.size());
    std::vector<bool> holds(db.size());
    for (std::size_t k = 0; k < db.size(); ++k) {
      margin[k] = std::log(curve.mse[k] / (crit[c]->alpha * crit[c]->target(curve.snr[k])));
      holds[k] = margin[k] <= 0.0;
    }
    const auto k = crossing_index(holds);
    if (!k) continue;
    const double m0 = margin[*k - 1];
    const double m1 = margin[*k];
    const double frac = m0 > m1 ? m0 / (m0 - m1) : 1.0;
    assign(out, c, db_to_linear(db[*k - 1] + frac * (db[*k] - db[*k - 1])));
  }
  return out;
}

ThresholdSet thresholds_numeric(const std::function<double(double)>& mse, std::span<const double> snr_db,
                                const AcrModel& acr, const EstimationSetup& setup,
                                const ThresholdAlphas& alphas, CurveLabel label) {
  check_grid(snr_db);
  ThresholdSet out;
  out.alphas = alphas;
  out.provenance = "numeric:" + to_string(label);
  std::vector<double> values(snr_db.size());
  for (std::size_t k = 0; k < snr_db.size(); ++k) values[k] = mse(db_to_linear(snr_db[k]));
  const auto crit = criteria(acr, setup, alphas);
  for (std::size_t c = 0; c < crit.size(); ++c) {
    if (!crit[c]) continue;
    auto holds_at = [&](double rho, double e) { return e <= crit[c]->alpha * crit[c]->target(rho); };
    std::vector<bool> holds(snr_db.size());
    for (std::size_t k = 0; k < snr_db.size(); ++k) {
      holds[k] = holds_at(db_to_linear(snr_db[k]), values[k]);
    }
    const auto k = crossing_index(holds);
    if (!k) continue;
    double lo = snr_db[*k - 1];
    double hi = snr_db[*k];
    while (hi - lo > kDbTol) {
      const double mid = 0.5 * (lo + hi);
      const double rho = db_to_linear(mid);
      (holds_at(rho, mse(rho)) ? hi : lo) = mid;
    }
    assign(out, c, db_to_linear(hi));
  }
  return out;
}

double rho_as_analytic(const AcrModel& acr, const AnalyticOptions& options) {
  const double delta = sidelobe_offset(acr);
  const double r = acr.oscillating() ? acr.envelope(delta) : acr.acr(delta);
  const double g = (options.alphas.as - 1.0) / (2.0 * delta * delta * acr.mqbw());
  return solve_lambert(g, 1.0 - r, options.constant);
}

double rho_am2_analytic(const AcrModel& acr, const AnalyticOptions& options) {
  if (!acr.oscillating()) {
    throw std::domain_error("end-ambiguity threshold needs an oscillating ACR");
  }
  const double delta = 1.0 / acr.carrier();
  const double g = options.alphas.am2 / (2.0 * delta * delta * acr.envelope_mqbw());
  return solve_lambert(g, 1.0 - acr.envelope(delta), options.constant);
}

double rho_am1_analytic(const AcrModel& acr, const AnalyticOptions& options) {
  if (!acr.oscillating()) {
    throw std::domain_error("begin-ambiguity threshold needs an oscillating ACR");
  }
  const double delta = envelope_offset(acr);
  const double g = (options.alphas.am1 - 1.0) / (2.0 * delta * delta * acr.envelope_mqbw());
  return solve_lambert(g, 1.0 - acr.envelope(delta), options.constant);
}

ThresholdSet thresholds_analytic(const AcrModel& acr, const AnalyticOptions& options) {
  ThresholdSet out;
  out.alphas = options.alphas;
  out.provenance = "analytic";
  auto attempt = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  };
  if (acr.oscillating()) {
    out.rho_am1 = attempt([&] { return rho_am1_analytic(acr, options); });
    out.rho_am2 = attempt([&] { return rho_am2_analytic(acr, options); });
    // Crossed closed forms predict no ambiguity plateau at all.
    if (out.rho_am1 && out.rho_am2 && *out.rho_am2 < *out.rho_am1) {
      out.rho_am1.reset();
      out.rho_am2.reset();
    }
  }
  out.rho_as = attempt([&] { return rho_as_analytic(acr, options); });
  return out;
}

AcrModel acr_at_lambda(const std::shared_ptr<const EnvelopeShape>& envelope, double lambda) {
  if (!envelope) throw std::invalid_argument("acr_at_lambda: missing envelope");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("acr_at_lambda: IFBW must be positive");
  }
  return AcrModel(envelope, lambda * envelope->bandwidth());
}

LambdaSearch lambda_at_asymptotic_threshold(const std::shared_ptr<const EnvelopeShape>& envelope,
                                            double rho0, const LambdaSearchOptions& options) {
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
    throw std::domain_error("lambda search: SNR must be positive");
  }
  if (!(options.floor > 0.0 && options.ceiling > options.floor)) {
    throw std::invalid_argument("lambda search: need 0 < floor < ceiling");
  }
  auto threshold = [&](double lambda) {
    return rho_as_analytic(acr_at_lambda(envelope, lambda), options.analytic);
  };
  if (rho0 < threshold(options.floor)) return {LambdaStatus::below_minimum, options.floor};
  if (rho0 > threshold(options.ceiling)) return {LambdaStatus::ceiling, options.ceiling};
  double lo = std::log(options.floor);
  double hi = std::log(options.ceiling);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (threshold(std::exp(mid)) < rho0 ? lo : hi) = mid;
  }
  return {LambdaStatus::found, std::exp(0.5 * (lo + hi))};
}

}  // namespace toa
