#include "toa/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "toa/special_math.hpp"

namespace toa {

namespace {

void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::domain_error("lower bound: SNR must be positive and finite");
  }
}

// Detection error probability between offsets 0 and xi.
double pairwise_error(const AcrModel& acr, double rho, double xi) {
  const double gap = std::max(0.0, 1.0 - acr.acr(xi));
  return q_function(std::sqrt(0.5 * rho * gap));
}

// Breakpoints for piecewise quadrature: geometric near the origin on the
// asymptotic decay scale, then uniform pieces that resolve the ACR lobes.
std::vector<double> breakpoints(const AcrModel& acr, double rho, double eps) {
  const double lobe = 0.5 / std::sqrt(acr.mqbw());
  const double decay = 1.0 / std::sqrt(rho * acr.mqbw());
  std::vector<double> pts{0.0};
  for (double x = 0.25 * decay; x < std::min(eps, 64.0 * decay); x *= 2.0) pts.push_back(x);
  double x = std::max(pts.back(), 0.0);
  const auto pieces = static_cast<std::size_t>(std::ceil((eps - x) / lobe));
  for (std::size_t k = 1; k <= pieces; ++k) {
    const double next = x + (eps - x) * static_cast<double>(k) / static_cast<double>(pieces);
    if (next > pts.back()) pts.push_back(next);
  }
  pts.back() = eps;
  return pts;
}

}  // namespace

double bound_extent(const EstimationSetup& setup, BoundVariant variant) {
  setup.validate();
  const double left = setup.delay_s - setup.lower_s;
  const double right = setup.upper_s - setup.delay_s;
  const double eps = variant == BoundVariant::left ? std::min(left, 2.0 * right)
                                                   : std::min(right, 2.0 * left);
  if (!(eps > 0.0)) {
    throw std::domain_error("lower bound: delay on the domain edge leaves no detection range");
  }
  return eps;
}

double alb_z(const AcrModel& acr, const EstimationSetup& setup, double rho, BoundVariant variant,
             const BoundOptions& options) {
  check_rho(rho);
  const double eps = bound_extent(setup, variant);
  const auto pts = breakpoints(acr, rho, eps);
  auto integrand = [&](double xi) { return xi * pairwise_error(acr, rho, xi); };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, pts[k], pts[k + 1], 10, options.rel_tol);
  }
  return total;
}

double alb_b(const AcrModel& acr, const EstimationSetup& setup, double rho, BoundVariant variant,
             const BoundOptions& options) {
  const double z = alb_z(acr, setup, rho, variant, options);
  const double eps = bound_extent(setup, variant);
  // b = z + int xi (V{g} - g). The difference vanishes where g is monotone,
  // so only the valley-filled excess goes through the grid.
  auto excess = [&](std::size_t points) {
    std::vector<double> xi(points);
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k) {
      xi[k] = eps * static_cast<double>(k) / static_cast<double>(points - 1);
      g[k] = pairwise_error(acr, rho, xi[k]);
    }
    const ValleyFilledFn v = valley_fill(xi, g);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < points; ++k) {
      const double a = xi[k] * (v.value[k] - g[k]);
      const double b = xi[k + 1] * (v.value[k + 1] - g[k + 1]);
      sum += 0.5 * (a + b) * (xi[k + 1] - xi[k]);
    }
    return sum;
  };
  std::size_t points = std::max<std::size_t>(options.grid_points, 16);
  double prev = z + excess(points);
  while (points * 2 <= options.max_grid_points) {
    points *= 2;
    const double next = z + excess(points);
    if (std::abs(next - prev) <= options.grid_rel_change * std::abs(next)) return next;
    prev = next;
  }
  return prev;
}

}  // namespace toa
