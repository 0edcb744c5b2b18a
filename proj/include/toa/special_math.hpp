#pragma once

#include <span>
#include <vector>

namespace toa {

/// Upper-tail probability of the standard normal, Q(x) = P{N(0,1) > x}.
/// Throws std::domain_error for non-finite input.
double q_function(double x);

/// Large-argument approximation Q(x) ~ phi(x) / x. Upper bound on Q for x > 0.
double q_approx(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Inverse of the upper tail: returns y with Q(y) = p, p in (0, 1).
double q_inverse(double p);

/// Lambert W, branch -1: the solution w <= -1 of w * exp(w) = h, h in [-1/e, 0).
double lambert_w_m1(double h);

struct ValleyFilledFn {
  std::vector<double> xi;
  std::vector<double> value;  // non-increasing in xi
};

/// Discrete valley filling V{f}(xi_i) = max_{j >= i} f(xi_j) on an ascending grid.
ValleyFilledFn valley_fill(std::span<const double> xi, std::span<const double> values);

}  // namespace toa
