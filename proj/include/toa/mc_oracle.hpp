#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "toa/pulse_model.hpp"

namespace toa {

enum class SubgridRefinement {
  none,
  parabolic,         // three-point parabola through the grid argmax
  conditional_mean,  // maximize E[X(theta) | 7 nearest samples] around the grid argmax
};

struct McConfig {
  /// Grid spacing over [Theta1, Theta2]; 0 picks min(T_w-scale/40, 1/(10 f_c)).
  double spacing_s = 0.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  SubgridRefinement refine = SubgridRefinement::conditional_mean;
  /// Worker threads; results do not depend on this.
  std::size_t threads = 1;
};

struct McResult {
  double mse = 0.0;
  double std_error = 0.0;
  double mean_estimate = 0.0;
  std::size_t trials = 0;
};

/// Maximum-likelihood delay estimation by brute force: draws the cross-correlation
/// sqrt(rho) R(theta - Theta) + w(theta) on a grid, with w Gaussian of covariance
/// R(theta_i - theta_j), and takes the argmax. Trial k draws its noise from a
/// generator keyed by (seed, k), so the result is reproducible for any thread count.
class MleSimulator {
 public:
  MleSimulator(const AcrModel& acr, const EstimationSetup& setup, const McConfig& config = {});

  McResult run(double rho) const;
  /// Single-trial estimate (exposed for tests).
  double estimate(double rho, std::size_t trial) const;

  const Eigen::VectorXd& grid() const { return grid_; }
  double spacing() const { return spacing_; }

 private:
  double estimate_with(double rho, std::size_t trial, Eigen::VectorXd& z, Eigen::VectorXd& x) const;

  EstimationSetup setup_;
  McConfig config_;
  double spacing_ = 0.0;
  Eigen::VectorXd grid_;
  Eigen::VectorXd signal_;  // R(theta_i - Theta)
  Eigen::MatrixXd chol_;    // lower factor of the noise covariance
  double jitter_ = 0.0;
  Eigen::LDLT<Eigen::MatrixXd> local_;  // covariance of a window of kWindow samples
  AcrModel acr_;
};

/// One-shot convenience wrapper around MleSimulator.
McResult simulate_mle_mse(const AcrModel& acr, const EstimationSetup& setup, double rho,
                          const McConfig& config = {});

}  // namespace toa
