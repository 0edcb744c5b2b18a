#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace toa {

enum class PulseKind { baseband_gaussian, passband_gaussian };

/// Transmitted pulse. Baseband: exp(-2 pi t^2 / T_w^2); passband: the same
/// envelope times cos(2 pi f_c t).
struct PulseSpec {
  PulseKind kind = PulseKind::baseband_gaussian;
  double width_s = 1e-9;
  double carrier_hz = 0.0;

  void validate() const;
};

/// -10 dB bandwidth of the Gaussian pulse of width T_w: 2 sqrt(ln 10 / pi) / T_w.
double gaussian_bandwidth(double width_s);
/// Inverse of gaussian_bandwidth.
double gaussian_width(double bandwidth_hz);

/// Normalized, even envelope ACR of a baseband pulse, with derivatives.
class EnvelopeShape {
 public:
  virtual ~EnvelopeShape() = default;
  virtual double value(double theta) const = 0;
  virtual double d1(double theta) const = 0;
  virtual double d2(double theta) const = 0;
  /// -R''(0), in s^-2.
  virtual double mqbw() const = 0;
  /// -10 dB bandwidth of the underlying pulse, in Hz.
  virtual double bandwidth() const = 0;
};

/// exp(-pi theta^2 / T_w^2), the ACR of the Gaussian pulse.
class GaussianEnvelope final : public EnvelopeShape {
 public:
  explicit GaussianEnvelope(double width_s);
  double value(double theta) const override;
  double d1(double theta) const override;
  double d2(double theta) const override;
  double mqbw() const override;
  double bandwidth() const override;

 private:
  double width_;
  double k_;  // pi / T_w^2
};

/// Envelope ACR known only through uniform samples on [0, theta_max]. Cubic
/// B-spline interpolation, extended evenly and by zero beyond theta_max.
class SampledEnvelope final : public EnvelopeShape {
 public:
  SampledEnvelope(std::vector<double> samples, double step_s, double bandwidth_hz);
  ~SampledEnvelope() override;
  double value(double theta) const override;
  double d1(double theta) const override;
  double d2(double theta) const override;
  double mqbw() const override;
  double bandwidth() const override;

 private:
  struct Spline;
  std::unique_ptr<Spline> spline_;
  double extent_;
  double bandwidth_;
  double mqbw_;
};

/// Normalized ACR R(theta) = e_R(theta) cos(2 pi f_c theta); f_c = 0 gives the
/// baseband ACR. Immutable; copies share the envelope.
class AcrModel {
 public:
  AcrModel(std::shared_ptr<const EnvelopeShape> envelope, double carrier_hz);

  static AcrModel from_pulse(const PulseSpec& pulse);

  double acr(double theta) const;
  double acr_d1(double theta) const;
  double acr_d2(double theta) const;
  double envelope(double theta) const { return envelope_->value(theta); }

  /// Normalized ACRs carry unit energy.
  double energy() const { return 1.0; }
  double mqbw() const { return envelope_mqbw() + carrier_term(); }
  double envelope_mqbw() const { return envelope_->mqbw(); }
  double bandwidth() const { return envelope_->bandwidth(); }
  double carrier() const { return carrier_hz_; }
  /// f_c / B; 0 for baseband.
  double ifbw() const { return carrier_hz_ / bandwidth(); }
  bool oscillating() const { return carrier_hz_ > 0.0; }

  /// The same model without the carrier.
  AcrModel baseband_envelope() const { return AcrModel(envelope_, 0.0); }
  const std::shared_ptr<const EnvelopeShape>& shape() const { return envelope_; }

 private:
  double carrier_term() const;

  std::shared_ptr<const EnvelopeShape> envelope_;
  double carrier_hz_;
};

/// True delay and its a priori domain [lower, upper].
struct EstimationSetup {
  double delay_s = 0.0;
  double lower_s = -2e-9;
  double upper_s = 2e-9;

  void validate() const;
  double span() const { return upper_s - lower_s; }
  /// gamma = T * B.
  double atbw(double bandwidth_hz) const { return span() * bandwidth_hz; }
};

enum class IntervalMode { oscillating, non_oscillating };

/// Partition of the a priori domain into intervals D_n = [d_n, d_{n+1}), one
/// testpoint each. `center` indexes the interval that holds the true delay.
struct IntervalSet {
  IntervalMode mode = IntervalMode::non_oscillating;
  std::vector<double> boundaries;  // size() == testpoints.size() + 1
  std::vector<double> testpoints;
  std::vector<double> acr_d1;      // R'(theta_n - Theta)
  std::vector<double> acr_d2;      // R''(theta_n - Theta)
  std::size_t center = 0;

  std::size_t size() const { return testpoints.size(); }
  double width(std::size_t n) const { return boundaries[n + 1] - boundaries[n]; }
};

struct PartitionOptions {
  /// Interval count for non-oscillating ACRs (plain split of [Theta1, Theta2]).
  std::size_t equal_split_count = 8;
  /// Non-oscillating: fixed interval width laid out symmetrically around Theta,
  /// so that D_0 is centred on the delay. Overrides equal_split_count. Edge
  /// intervals are whatever remains of the domain.
  std::optional<double> interval_width_s;
  /// Forces a mode; by default oscillating iff the ACR has a carrier.
  std::optional<IntervalMode> mode;
};

/// Oscillating: one interval per local maximum of R(theta - Theta), bounded by
/// the adjacent local minima. Non-oscillating: equal or centred fixed-width
/// split with midpoint testpoints. In both modes the testpoint of the interval
/// holding Theta is Theta.
IntervalSet partition_domain(const AcrModel& acr, const EstimationSetup& setup,
                             const PartitionOptions& options = {});

/// Centred non-oscillating split with width pi / (4 beta_s), the offset of the
/// nearest competing peak. Used by the curve, threshold and design drivers.
PartitionOptions lobe_partition(const AcrModel& acr);

/// A pulse together with its estimation setup, as stored in preset files.
struct PulsePreset {
  std::string name;
  PulseSpec pulse;
  EstimationSetup setup;
};

/// Built-in presets: "baseband" (T_w = 1 ns, D = [-2, 2] ns) and "passband"
/// (T_w = 2 ns, f_c = 6.85 GHz, D = [-2, 1.5] T_w).
std::vector<PulsePreset> builtin_presets();

/// Parses a JSON preset file: either a single object or {"presets": {name: {...}}}.
/// Keys: kind, T_w_ns, f_c_GHz, Theta_ns, Theta1_ns, Theta2_ns.
std::vector<PulsePreset> load_presets(std::istream& in);
std::vector<PulsePreset> load_presets_file(const std::string& path);

/// Looks `name` up in `presets`; throws std::invalid_argument if absent.
const PulsePreset& find_preset(const std::vector<PulsePreset>& presets, const std::string& name);

}  // namespace toa
