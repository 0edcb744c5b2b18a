#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace toa {

/// Jointly Gaussian vector, e.g. the cross-correlation sampled at testpoints.
struct GaussianVector {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  void validate() const;
};

/// Randomized quasi-Monte Carlo settings. Points per randomization double from
/// `min_points` until the standard error meets
/// min(abs_tol, max(rel_tol * p, abs_floor)) or `max_points` is reached.
struct MvnOptions {
  std::size_t min_points = 256;
  std::size_t max_points = std::size_t{1} << 14;
  std::size_t shifts = 8;
  double abs_tol = 1e-4;
  double rel_tol = 1e-2;
  double abs_floor = 1e-13;
  /// Constraints violated with marginal probability below this are dropped.
  double drop_tol = 1e-16;
  std::uint64_t seed = 0x5eed;
};

struct MvnResult {
  double probability = 0.0;
  double std_error = 0.0;
  /// Dimension actually integrated after dropping inactive constraints.
  std::size_t dimension = 0;
  std::size_t points_per_shift = 0;
  /// Set when a conditional variance fell below the floor despite the ridge.
  bool regularized = false;
};

/// P{X_index > X_m for all m != index}. Integrates the (N-1)-dimensional law of
/// the differences X_index - X_m by Genz's separation of variables with
/// variable reordering over a randomly shifted Richtmyer lattice.
MvnResult prob_component_is_max(const GaussianVector& g, std::size_t index,
                                const MvnOptions& options = {});

/// P{Y > 0 componentwise} for Y ~ N(mean, cov); the engine behind
/// prob_component_is_max.
MvnResult prob_positive_orthant(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                const MvnOptions& options = {});

/// splitmix64 finalizer; derives independent substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace toa
