#include "toa/pulse_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

namespace toa {

namespace {

constexpr double kPi = std::numbers::pi;

// Root of f on [a, b] given f(a), f(b) of opposite sign.
template <class F>
double bracketed_root(F f, double a, double b) {
  boost::math::tools::eps_tolerance<double> tol(48);
  std::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, tol, max_iter);
  return 0.5 * (lo + hi);
}

}  // namespace

void PulseSpec::validate() const {
  if (!(width_s > 0.0) || !std::isfinite(width_s)) {
    throw std::invalid_argument("PulseSpec: T_w must be positive");
  }
  if (!(carrier_hz >= 0.0) || !std::isfinite(carrier_hz)) {
    throw std::invalid_argument("PulseSpec: f_c must be non-negative");
  }
  if (kind == PulseKind::passband_gaussian && carrier_hz == 0.0) {
    throw std::invalid_argument("PulseSpec: passband pulse requires f_c > 0");
  }
}

double gaussian_bandwidth(double width_s) {
  return 2.0 * std::sqrt(std::numbers::ln10 / kPi) / width_s;
}

double gaussian_width(double bandwidth_hz) {
  return 2.0 * std::sqrt(std::numbers::ln10 / kPi) / bandwidth_hz;
}

GaussianEnvelope::GaussianEnvelope(double width_s)
    : width_(width_s), k_(kPi / (width_s * width_s)) {
  if (!(width_s > 0.0)) {
    throw std::invalid_argument("GaussianEnvelope: width must be positive");
  }
}

double GaussianEnvelope::value(double theta) const { return std::exp(-k_ * theta * theta); }

double GaussianEnvelope::d1(double theta) const { return -2.0 * k_ * theta * value(theta); }

double GaussianEnvelope::d2(double theta) const {
  return (4.0 * k_ * k_ * theta * theta - 2.0 * k_) * value(theta);
}

double GaussianEnvelope::mqbw() const { return 2.0 * k_; }

double GaussianEnvelope::bandwidth() const { return gaussian_bandwidth(width_); }

struct SampledEnvelope::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
};

SampledEnvelope::SampledEnvelope(std::vector<double> samples, double step_s, double bandwidth_hz)
    : bandwidth_(bandwidth_hz) {
  if (samples.size() < 4 || !(step_s > 0.0) || !(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("SampledEnvelope: need >= 4 samples, positive step and bandwidth");
  }
  const double peak = samples.front();
  if (!(peak > 0.0)) {
    throw std::invalid_argument("SampledEnvelope: first sample (zero lag) must be positive");
  }
  for (double& v : samples) {
    v /= peak;
  }
  extent_ = step_s * static_cast<double>(samples.size() - 1);
  // Even symmetry pins the slope at zero lag.
  spline_ = std::make_unique<Spline>(Spline{
      boost::math::interpolators::cardinal_cubic_b_spline<double>(samples.begin(), samples.end(),
                                                                  0.0, step_s, 0.0)});
  mqbw_ = -spline_->s.double_prime(0.0);
  if (!(mqbw_ > 0.0)) {
    throw std::invalid_argument("SampledEnvelope: samples do not describe a peaked ACR");
  }
}

SampledEnvelope::~SampledEnvelope() = default;

double SampledEnvelope::value(double theta) const {
  const double a = std::abs(theta);
  return a > extent_ ? 0.0 : spline_->s(a);
}

double SampledEnvelope::d1(double theta) const {
  const double a = std::abs(theta);
  if (a > extent_) return 0.0;
  return theta < 0.0 ? -spline_->s.prime(a) : spline_->s.prime(a);
}

double SampledEnvelope::d2(double theta) const {
  const double a = std::abs(theta);
  return a > extent_ ? 0.0 : spline_->s.double_prime(a);
}

double SampledEnvelope::mqbw() const { return mqbw_; }

double SampledEnvelope::bandwidth() const { return bandwidth_; }

AcrModel::AcrModel(std::shared_ptr<const EnvelopeShape> envelope, double carrier_hz)
    : envelope_(std::move(envelope)), carrier_hz_(carrier_hz) {
  if (!envelope_) {
    throw std::invalid_argument("AcrModel: null envelope");
  }
  if (!(carrier_hz >= 0.0) || !std::isfinite(carrier_hz)) {
    throw std::invalid_argument("AcrModel: carrier must be non-negative");
  }
}

AcrModel AcrModel::from_pulse(const PulseSpec& pulse) {
  pulse.validate();
  const double fc = pulse.kind == PulseKind::passband_gaussian ? pulse.carrier_hz : 0.0;
  return AcrModel(std::make_shared<GaussianEnvelope>(pulse.width_s), fc);
}

double AcrModel::carrier_term() const {
  const double w = 2.0 * kPi * carrier_hz_;
  return w * w;
}

double AcrModel::acr(double theta) const {
  const double e = envelope_->value(theta);
  if (carrier_hz_ == 0.0) return e;
  return e * std::cos(2.0 * kPi * carrier_hz_ * theta);
}

double AcrModel::acr_d1(double theta) const {
  if (carrier_hz_ == 0.0) return envelope_->d1(theta);
  const double w = 2.0 * kPi * carrier_hz_;
  const double c = std::cos(w * theta);
  const double s = std::sin(w * theta);
  return envelope_->d1(theta) * c - w * envelope_->value(theta) * s;
}

double AcrModel::acr_d2(double theta) const {
  if (carrier_hz_ == 0.0) return envelope_->d2(theta);
  const double w = 2.0 * kPi * carrier_hz_;
  const double c = std::cos(w * theta);
  const double s = std::sin(w * theta);
  return envelope_->d2(theta) * c - 2.0 * w * envelope_->d1(theta) * s -
         w * w * envelope_->value(theta) * c;
}

void EstimationSetup::validate() const {
  if (!std::isfinite(lower_s) || !std::isfinite(upper_s) || !(upper_s > lower_s)) {
    throw std::invalid_argument("EstimationSetup: a priori domain must have Theta2 > Theta1");
  }
  if (!(delay_s >= lower_s && delay_s <= upper_s)) {
    throw std::invalid_argument("EstimationSetup: true delay outside the a priori domain");
  }
}

namespace {

IntervalSet equal_split(const EstimationSetup& setup, std::size_t count) {
  if (count == 0) {
    throw std::invalid_argument("partition_domain: interval count must be positive");
  }
  IntervalSet out;
  out.mode = IntervalMode::non_oscillating;
  const double step = setup.span() / static_cast<double>(count);
  for (std::size_t k = 0; k <= count; ++k) {
    out.boundaries.push_back(k == count ? setup.upper_s
                                        : setup.lower_s + step * static_cast<double>(k));
  }
  out.center = count - 1;
  for (std::size_t k = 0; k < count; ++k) {
    if (setup.delay_s < out.boundaries[k + 1]) {
      out.center = k;
      break;
    }
  }
  for (std::size_t k = 0; k < count; ++k) {
    out.testpoints.push_back(k == out.center ? setup.delay_s
                                             : 0.5 * (out.boundaries[k] + out.boundaries[k + 1]));
  }
  return out;
}

IntervalSet centred_split(const EstimationSetup& setup, double width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("partition_domain: interval width must be positive");
  }
  const double theta0 = setup.delay_s;
  const double sliver = 1e-6 * width;  // drops rounding-level edge intervals
  std::vector<double> left;
  for (double d = theta0 - 0.5 * width; d > setup.lower_s + sliver; d -= width) left.push_back(d);
  IntervalSet out;
  out.mode = IntervalMode::non_oscillating;
  out.boundaries.push_back(setup.lower_s);
  out.boundaries.insert(out.boundaries.end(), left.rbegin(), left.rend());
  for (double d = theta0 + 0.5 * width; d < setup.upper_s - sliver; d += width) {
    out.boundaries.push_back(d);
  }
  out.boundaries.push_back(setup.upper_s);
  const std::size_t count = out.boundaries.size() - 1;
  out.center = count - 1;
  for (std::size_t k = 0; k < count; ++k) {
    if (theta0 < out.boundaries[k + 1]) {
      out.center = k;
      break;
    }
  }
  for (std::size_t k = 0; k < count; ++k) {
    out.testpoints.push_back(k == out.center ? theta0
                                             : 0.5 * (out.boundaries[k] + out.boundaries[k + 1]));
  }
  return out;
}

IntervalSet around_maxima(const AcrModel& acr, const EstimationSetup& setup) {
  const double theta0 = setup.delay_s;
  auto slope = [&](double theta) { return acr.acr_d1(theta - theta0); };

  // Scan step resolves the carrier period and the envelope.
  double step = setup.span() / 64.0;
  if (acr.carrier() > 0.0) step = std::min(step, 1.0 / (32.0 * acr.carrier()));
  step = std::min(step, 0.25 / std::sqrt(acr.mqbw()));
  const auto steps = static_cast<std::size_t>(std::ceil(setup.span() / step));
  step = setup.span() / static_cast<double>(steps);

  std::vector<double> maxima;
  std::vector<double> minima;
  double prev_theta = setup.lower_s;
  double prev_slope = slope(prev_theta);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double theta = k == steps ? setup.upper_s : setup.lower_s + step * static_cast<double>(k);
    const double s = slope(theta);
    if (prev_slope > 0.0 && s <= 0.0) {
      maxima.push_back(s == 0.0 ? theta : bracketed_root(slope, prev_theta, theta));
    } else if (prev_slope < 0.0 && s >= 0.0) {
      minima.push_back(s == 0.0 ? theta : bracketed_root(slope, prev_theta, theta));
    }
    prev_theta = theta;
    prev_slope = s;
  }
  // Only stationary maxima become testpoints. An edge remnant whose peak lies
  // outside the domain joins the neighbouring lobe; a testpoint pinned to the
  // domain limit overstates how often a thin remnant wins.
  while (!minima.empty() && !maxima.empty() && minima.front() < maxima.front()) {
    minima.erase(minima.begin());
  }
  while (!minima.empty() && !maxima.empty() && minima.back() > maxima.back()) minima.pop_back();

  // Walk the critical points in order; every maximum owns the span between its
  // neighbouring minima.
  IntervalSet out;
  out.mode = IntervalMode::oscillating;
  out.boundaries.push_back(setup.lower_s);
  std::size_t im = 0;
  std::size_t in = 0;
  while (im < maxima.size() || in < minima.size()) {
    const bool take_max = in >= minima.size() || (im < maxima.size() && maxima[im] < minima[in]);
    if (take_max) {
      out.testpoints.push_back(maxima[im++]);
    } else {
      const double d = minima[in++];
      if (out.testpoints.size() == out.boundaries.size()) {
        out.boundaries.push_back(d);
      }
    }
  }
  out.boundaries.push_back(setup.upper_s);
  if (out.testpoints.empty() || out.testpoints.size() + 1 != out.boundaries.size()) {
    throw std::runtime_error("partition_domain: no local maxima found for an oscillating ACR");
  }

  // The global maximum sits exactly at Theta.
  std::size_t best = 0;
  for (std::size_t n = 1; n < out.testpoints.size(); ++n) {
    if (std::abs(out.testpoints[n] - theta0) < std::abs(out.testpoints[best] - theta0)) best = n;
  }
  out.testpoints[best] = theta0;
  out.center = best;
  return out;
}

}  // namespace

IntervalSet partition_domain(const AcrModel& acr, const EstimationSetup& setup,
                             const PartitionOptions& options) {
  setup.validate();
  const IntervalMode mode = options.mode.value_or(
      acr.oscillating() ? IntervalMode::oscillating : IntervalMode::non_oscillating);
  IntervalSet out = mode == IntervalMode::oscillating
                        ? around_maxima(acr, setup)
                        : options.interval_width_s
                            ? centred_split(setup, *options.interval_width_s)
                            : equal_split(setup, options.equal_split_count);
  for (double t : out.testpoints) {
    out.acr_d1.push_back(acr.acr_d1(t - setup.delay_s));
    out.acr_d2.push_back(acr.acr_d2(t - setup.delay_s));
  }
  return out;
}

PartitionOptions lobe_partition(const AcrModel& acr) {
  PartitionOptions out;
  out.interval_width_s = std::numbers::pi / (4.0 * std::sqrt(acr.mqbw()));
  return out;
}

std::vector<PulsePreset> builtin_presets() {
  std::vector<PulsePreset> out;
  out.push_back({"baseband", {PulseKind::baseband_gaussian, 1e-9, 0.0}, {0.0, -2e-9, 2e-9}});
  out.push_back({"passband",
                 {PulseKind::passband_gaussian, 2e-9, 6.85e9},
                 {0.0, -2.0 * 2e-9, 1.5 * 2e-9}});
  return out;
}

namespace {

PulsePreset preset_from_json(const std::string& name, const nlohmann::json& j) {
  PulsePreset p;
  p.name = name;
  const std::string kind = j.value("kind", std::string("baseband_gaussian"));
  if (kind == "baseband_gaussian" || kind == "baseband") {
    p.pulse.kind = PulseKind::baseband_gaussian;
  } else if (kind == "passband_gaussian" || kind == "passband") {
    p.pulse.kind = PulseKind::passband_gaussian;
  } else {
    throw std::invalid_argument("preset '" + name + "': unknown kind '" + kind + "'");
  }
  if (!j.contains("T_w_ns")) {
    throw std::invalid_argument("preset '" + name + "': missing T_w_ns");
  }
  p.pulse.width_s = j.at("T_w_ns").get<double>() * 1e-9;
  p.pulse.carrier_hz = j.value("f_c_GHz", 0.0) * 1e9;
  p.setup.delay_s = j.value("Theta_ns", 0.0) * 1e-9;
  p.setup.lower_s = j.value("Theta1_ns", -2.0) * 1e-9;
  p.setup.upper_s = j.value("Theta2_ns", 2.0) * 1e-9;
  p.pulse.validate();
  p.setup.validate();
  return p;
}

}  // namespace

std::vector<PulsePreset> load_presets(std::istream& in) {
  const nlohmann::json j = nlohmann::json::parse(in);
  std::vector<PulsePreset> out;
  if (j.contains("presets")) {
    for (const auto& [name, body] : j.at("presets").items()) {
      out.push_back(preset_from_json(name, body));
    }
  } else {
    out.push_back(preset_from_json(j.value("name", std::string("custom")), j));
  }
  return out;
}

std::vector<PulsePreset> load_presets_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open preset file '" + path + "'");
  }
  return load_presets(in);
}

const PulsePreset& find_preset(const std::vector<PulsePreset>& presets, const std::string& name) {
  for (const auto& p : presets) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace toa
