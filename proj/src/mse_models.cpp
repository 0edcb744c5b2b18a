#include "toa/mse_models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "toa/special_math.hpp"
#include "toa/units.hpp"

namespace toa {

namespace {

void require_positive_snr(double rho, const char* what) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::domain_error(std::string(what) + ": SNR must be positive");
  }
}

double tail(double x, TailModel model) {
  if (model == TailModel::exact || x <= 0.0) return q_function(x);
  return q_approx(x);
}

}  // namespace

std::vector<double> db_grid(double lo_db, double hi_db, double step_db) {
  if (!(step_db > 0.0) || !(hi_db >= lo_db)) {
    throw std::invalid_argument("db_grid: need step > 0 and hi >= lo");
  }
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi_db - lo_db) / step_db + 1e-3));
  for (std::size_t k = 0; k <= n; ++k) out.push_back(lo_db + step_db * static_cast<double>(k));
  return out;
}

double crlb(const AcrModel& acr, double rho) {
  require_positive_snr(rho, "crlb");
  return 1.0 / (rho * acr.mqbw());
}

double ecrlb(const AcrModel& acr, double rho) {
  require_positive_snr(rho, "ecrlb");
  return 1.0 / (rho * acr.envelope_mqbw());
}

double max_mse(const EstimationSetup& setup) {
  setup.validate();
  const double t = setup.span();
  const double off = setup.delay_s - 0.5 * (setup.lower_s + setup.upper_s);
  return t * t / 12.0 + off * off;
}

MseNumResult mse_num(const AcrModel& acr, const EstimationSetup& setup,
                     const IntervalSet& intervals, double rho, const MseNumOptions& options) {
  require_positive_snr(rho, "mse_num");
  setup.validate();
  const std::size_t n = intervals.size();
  if (n == 0 || intervals.boundaries.size() != n + 1 || intervals.acr_d1.size() != n ||
      intervals.acr_d2.size() != n || intervals.center >= n) {
    throw std::invalid_argument("mse_num: inconsistent interval set");
  }
  const double theta0 = setup.delay_s;
  const double sqrt_rho = std::sqrt(rho);
  const double c = crlb(acr, rho);
  const std::size_t c0 = intervals.center;

  // Cross-correlation at the testpoints, normalized to unit noise variance.
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = acr.acr(intervals.testpoints[k] - theta0);

  // Only intervals that can beat the centre enter the Gaussian vector.
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == c0) {
      active.push_back(k);
      continue;
    }
    const double gap = sqrt_rho * (1.0 - r[k]);
    const double var = 2.0 * (1.0 - acr.acr(intervals.testpoints[k] - intervals.testpoints[c0]));
    const double pairwise = var > 0.0 ? q_function(gap / std::sqrt(var)) : (gap > 0.0 ? 0.0 : 1.0);
    if (pairwise >= options.skip_tol) active.push_back(k);
  }
  GaussianVector g;
  const auto m = static_cast<Eigen::Index>(active.size());
  g.mean.resize(m);
  g.cov.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const double ta = intervals.testpoints[active[a]];
    g.mean(a) = sqrt_rho * r[active[a]];
    for (Eigen::Index b = 0; b < m; ++b) {
      g.cov(a, b) = acr.acr(ta - intervals.testpoints[active[b]]);
    }
  }

  MseNumResult out;
  out.probabilities.assign(n, 0.0);
  std::vector<double> stderrs(n, 0.0);
  for (Eigen::Index a = 0; a < m; ++a) {
    MvnOptions mo = options.mvn;
    mo.seed = mix_seed(options.mvn.seed, active[a]);
    const MvnResult res = prob_component_is_max(g, static_cast<std::size_t>(a), mo);
    out.probabilities[active[a]] = res.probability;
    stderrs[active[a]] = res.std_error;
    out.regularized = out.regularized || res.regularized;
  }

  const double d2_center = intervals.acr_d2[c0];
  double var_sum = 0.0;
  double p_var = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = out.probabilities[k];
    out.probability_sum += p;
    p_var += stderrs[k] * stderrs[k];
    const double w = intervals.width(k);
    const double var_uniform = w * w / 12.0;
    double mu = 0.0;
    double var = 0.0;
    if (k == c0) {
      mu = theta0;
      var = std::min(c, var_uniform);
    } else if (intervals.mode == IntervalMode::oscillating) {
      mu = intervals.testpoints[k];
      const double d2 = intervals.acr_d2[k];
      if (d2 == 0.0 || !std::isfinite(d2)) {
        out.curvature_fallback = true;
        var = var_uniform;
      } else {
        const double ratio = d2_center / d2;
        const double scale = options.variance == IntervalVariance::squared_curvature_ratio
                                 ? ratio * ratio
                                 : std::abs(ratio);
        var = std::min(c * scale, var_uniform);
      }
    } else {
      // The interval estimate sits on one of the two edges.
      const double p_left = q_function(sqrt_rho * intervals.acr_d1[k] / std::sqrt(acr.mqbw()));
      const double lo = intervals.boundaries[k];
      const double hi = intervals.boundaries[k + 1];
      mu = lo * p_left + hi * (1.0 - p_left);
      var = std::min(p_left * (1.0 - p_left) * w * w, var_uniform);
    }
    const double term = (theta0 - mu) * (theta0 - mu) + var;
    out.mse += p * term;
    var_sum += stderrs[k] * stderrs[k] * term * term;
  }
  out.std_error = std::sqrt(var_sum);
  out.probability_std_error = std::sqrt(p_var);
  return out;
}

double sidelobe_offset(const AcrModel& acr) {
  if (acr.oscillating()) return 1.0 / acr.carrier();
  return std::numbers::pi / (4.0 * std::sqrt(acr.mqbw()));
}

double envelope_offset(const AcrModel& acr) {
  return std::numbers::pi / (4.0 * std::sqrt(acr.envelope_mqbw()));
}

double mse_ana(const AcrModel& acr, double rho, TailModel model) {
  require_positive_snr(rho, "mse_ana");
  const double delta = sidelobe_offset(acr);
  const double x = std::sqrt(0.5 * rho * (1.0 - acr.acr(delta)));
  return crlb(acr, rho) + 2.0 * delta * delta * tail(x, model);
}

double mse_ana_env(const AcrModel& acr, double rho, TailModel model) {
  require_positive_snr(rho, "mse_ana_env");
  if (!acr.oscillating()) {
    throw std::domain_error("mse_ana_env: envelope form requires a passband ACR");
  }
  const double delta = envelope_offset(acr);
  const double x = std::sqrt(0.5 * rho * (1.0 - acr.envelope(delta)));
  return ecrlb(acr, rho) + 2.0 * delta * delta * tail(x, model);
}

std::string to_string(CurveLabel label) {
  switch (label) {
    case CurveLabel::e_num: return "e_num";
    case CurveLabel::e_ana: return "e_ana";
    case CurveLabel::e_ana_env: return "e_ana_env";
    case CurveLabel::z1: return "z1";
    case CurveLabel::z2: return "z2";
    case CurveLabel::b1: return "b1";
    case CurveLabel::b2: return "b2";
    case CurveLabel::monte_carlo: return "monte_carlo";
    case CurveLabel::crlb: return "crlb";
    case CurveLabel::ecrlb: return "ecrlb";
    case CurveLabel::e_u: return "e_U";
  }
  return "unknown";
}

void MseCurve::validate() const {
  if (snr.size() != mse.size()) {
    throw std::invalid_argument("MseCurve: grid and values differ in length");
  }
  for (std::size_t k = 0; k < snr.size(); ++k) {
    if (!(snr[k] > 0.0) || (k > 0 && !(snr[k] > snr[k - 1]))) {
      throw std::invalid_argument("MseCurve: SNR grid must be positive and strictly increasing");
    }
    if (!(mse[k] > 0.0)) {
      throw std::invalid_argument("MseCurve: MSE values must be positive");
    }
  }
}

MseCurve mse_num_curve(const AcrModel& acr, const EstimationSetup& setup,
                       const IntervalSet& intervals, std::span<const double> snr_db,
                       const MseNumOptions& options, std::uint64_t seed) {
  MseCurve curve;
  curve.label = CurveLabel::e_num;
  for (std::size_t k = 0; k < snr_db.size(); ++k) {
    MseNumOptions o = options;
    o.mvn.seed = mix_seed(seed, k);
    const double rho = db_to_linear(snr_db[k]);
    curve.snr.push_back(rho);
    curve.mse.push_back(mse_num(acr, setup, intervals, rho, o).mse);
  }
  return curve;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_mse_csv(std::ostream& out, std::span<const MseCurve> curves) {
  out << "snr_db,mse_s2,rmse_s,label\n";
  for (const auto& c : curves) {
    c.validate();
    const std::string label = to_string(c.label);
    for (std::size_t k = 0; k < c.snr.size(); ++k) {
      out << format_number(linear_to_db(c.snr[k])) << ',' << format_number(c.mse[k]) << ','
          << format_number(std::sqrt(c.mse[k])) << ',' << label << '\n';
    }
  }
}

}  // namespace toa
