#pragma once

#include <cstddef>

#include "toa/pulse_model.hpp"

namespace toa {

/// Which side of the domain bounds the detection offset.
enum class BoundVariant {
  left = 1,   // eps = min(Theta - Theta1, 2 (Theta2 - Theta))
  right = 2,  // eps = min(Theta2 - Theta, 2 (Theta - Theta1))
};

/// Upper integration limit of the bound; throws std::domain_error when Theta
/// sits on the relevant domain edge.
double bound_extent(const EstimationSetup& setup, BoundVariant variant);

struct BoundOptions {
  double rel_tol = 1e-8;
  /// Initial valley-fill grid and stopping rule for its doubling.
  std::size_t grid_points = 4096;
  std::size_t max_grid_points = std::size_t{1} << 20;
  double grid_rel_change = 1e-3;
};

/// int_0^eps xi Q(sqrt(rho/2 [1 - R(xi)])) d xi.
double alb_z(const AcrModel& acr, const EstimationSetup& setup, double rho,
             BoundVariant variant = BoundVariant::left, const BoundOptions& options = {});

/// Same integral with the Q term replaced by its valley-filled version
/// V{f}(xi) = max_{zeta >= xi} f(zeta).
double alb_b(const AcrModel& acr, const EstimationSetup& setup, double rho,
             BoundVariant variant = BoundVariant::left, const BoundOptions& options = {});

}  // namespace toa
