#include "toa/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace toa {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2 pi)
constexpr double kInvE = 0.36787944117144232160;

}  // namespace

double q_function(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("q_function: non-finite argument");
  }
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double q_approx(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("q_approx: argument must be finite and > 0");
  }
  return normal_pdf(x) / x;
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("q_inverse: probability must lie in (0, 1)");
  }
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double lambert_w_m1(double h) {
  if (!(h >= -kInvE && h < 0.0)) {
    // -1/e rounds up in double; allow the last ulp below it.
    if (!(h >= -kInvE - 1e-16 && h < 0.0)) {
      throw std::domain_error("Lambert W branch -1 undefined for this argument");
    }
  }
  // On the -1 branch w e^w decreases from 0 to -1/e as w goes from -inf to -1.
  double w;
  const double p2 = 2.0 * (1.0 + std::numbers::e * h);  // >= 0 near the branch point
  if (p2 <= 0.0) {
    return -1.0;
  }
  if (h < -0.25) {
    // Series about the branch point in p = -sqrt(2 (1 + e h)).
    const double p = -std::sqrt(p2);
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-h);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }

  // Bracket for the bisection fallback.
  double lo = -746.0;  // exp(-746) underflows, far below any representable h
  double hi = -1.0;
  bool converged = false;
  for (int it = 0; it < 64; ++it) {
    if (!(w < -1.0) || !(w > lo)) {
      break;
    }
    const double ew = std::exp(w);
    const double f = w * ew - h;
    if (f == 0.0) {
      converged = true;
      break;
    }
    // w e^w is decreasing on the branch: f > 0 means w is too far left.
    if (f > 0.0) {
      lo = std::max(lo, w);
    } else {
      hi = std::min(hi, w);
    }
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    const double next = w - step;
    if (std::abs(step) <= 4e-16 * std::abs(w)) {
      w = next;
      converged = true;
      break;
    }
    w = next;
  }
  if (!converged || !(w <= -1.0)) {
    // Bisection on the bracket; lo side has f > 0, hi side f <= 0.
    if (!(lo < hi)) {
      lo = -746.0;
      hi = -1.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(lo); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid * std::exp(mid) - h > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    w = 0.5 * (lo + hi);
  }
  return std::min(w, -1.0);
}

ValleyFilledFn valley_fill(std::span<const double> xi, std::span<const double> values) {
  if (xi.empty() || xi.size() != values.size()) {
    throw std::domain_error("valley_fill: grid must be non-empty and match the sample count");
  }
  for (std::size_t i = 1; i < xi.size(); ++i) {
    if (!(xi[i] > xi[i - 1])) {
      throw std::domain_error("valley_fill: grid must be strictly ascending");
    }
  }
  ValleyFilledFn out{std::vector<double>(xi.begin(), xi.end()),
                     std::vector<double>(values.begin(), values.end())};
  for (std::size_t i = out.value.size() - 1; i-- > 0;) {
    out.value[i] = std::max(out.value[i], out.value[i + 1]);
  }
  return out;
}

}  // namespace toa
