#include "toa/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "toa/mvn_prob.hpp"

namespace toa {

namespace {
constexpr Eigen::Index kWindow = 7;
}  // namespace

MleSimulator::MleSimulator(const AcrModel& acr, const EstimationSetup& setup,
                           const McConfig& config)
    : setup_(setup), config_(config), acr_(acr) {
  setup.validate();
  if (config.trials < 100) {
    throw std::invalid_argument("McConfig: at least 100 trials required");
  }
  double spacing = config.spacing_s;
  const double coarse = 1.0 / (40.0 * std::sqrt(acr.envelope_mqbw() / (2.0 * 3.14159265358979)));
  if (spacing <= 0.0) {
    spacing = coarse;
    if (acr.oscillating()) spacing = std::min(spacing, 1.0 / (10.0 * acr.carrier()));
  }
  if (acr.oscillating() && spacing > 1.0 / (10.0 * acr.carrier()) * (1.0 + 1e-12)) {
    throw std::invalid_argument("McConfig: grid spacing must resolve the carrier (<= 1/(10 f_c))");
  }
  const auto intervals = static_cast<Eigen::Index>(std::ceil(setup.span() / spacing - 1e-9));
  const Eigen::Index n = intervals + 1;
  spacing_ = setup.span() / static_cast<double>(intervals);
  grid_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    grid_(i) = i + 1 == n ? setup.upper_s : setup.lower_s + spacing_ * static_cast<double>(i);
  }
  signal_.resize(n);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    signal_(i) = acr.acr(grid_(i) - setup.delay_s);
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) = acr.acr(grid_(i) - grid_(j));
    }
  }
  jitter_ = 1e-10 * cov.trace();
  cov.diagonal().array() += jitter_;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("MleSimulator: noise covariance not positive definite after jitter");
  }
  chol_ = llt.matrixL();
  if (n >= kWindow) local_.compute(cov.topLeftCorner(kWindow, kWindow));
}

double MleSimulator::estimate_with(double rho, std::size_t trial, Eigen::VectorXd& z,
                                   Eigen::VectorXd& x) const {
  std::mt19937_64 rng(mix_seed(config_.seed, trial));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  x.noalias() = chol_.triangularView<Eigen::Lower>() * z;
  x += std::sqrt(rho) * signal_;
  Eigen::Index k = 0;
  x.maxCoeff(&k);
  double est = grid_(k);
  if (config_.refine == SubgridRefinement::parabolic && k > 0 && k + 1 < x.size()) {
    const double ym = x(k - 1);
    const double y0 = x(k);
    const double yp = x(k + 1);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) {
      const double offset = 0.5 * (ym - yp) / denom;
      est += std::clamp(offset, -0.5, 0.5) * spacing_;
    }
  } else if (config_.refine == SubgridRefinement::conditional_mean && x.size() >= kWindow) {
    // Kriging with the exact simulated covariance: the interpolant is the
    // conditional mean of the process given the window samples.
    const Eigen::Index first = std::clamp<Eigen::Index>(k - kWindow / 2, 0, x.size() - kWindow);
    const double amp = std::sqrt(rho);
    const Eigen::VectorXd weights =
        local_.solve(x.segment(first, kWindow) - amp * signal_.segment(first, kWindow));
    auto neg_mean = [&](double theta) {
      double v = amp * acr_.acr(theta - setup_.delay_s);
      for (Eigen::Index j = 0; j < kWindow; ++j) v += weights(j) * acr_.acr(theta - grid_(first + j));
      return -v;
    };
    // Search in grid units; Brent's absolute tolerance is not scale-free.
    auto in_steps = [&](double u) { return neg_mean(grid_(k) + u * spacing_); };
    const double lo = std::max(setup_.lower_s - grid_(k), -spacing_) / spacing_;
    const double hi = std::min(setup_.upper_s - grid_(k), spacing_) / spacing_;
    const auto best = boost::math::tools::brent_find_minima(in_steps, lo, hi, 40);
    if (best.second <= in_steps(0.0)) est = grid_(k) + best.first * spacing_;
  }
  return std::clamp(est, setup_.lower_s, setup_.upper_s);
}

double MleSimulator::estimate(double rho, std::size_t trial) const {
  Eigen::VectorXd z(grid_.size());
  Eigen::VectorXd x(grid_.size());
  return estimate_with(rho, trial, z, x);
}

McResult MleSimulator::run(double rho) const {
  if (!(rho > 0.0)) {
    throw std::domain_error("simulate_mle_mse: SNR must be positive");
  }
  const std::size_t trials = config_.trials;
  std::vector<double> err(trials);
  std::vector<double> est(trials);
  const std::size_t workers = std::max<std::size_t>(1, std::min(config_.threads, trials));
  auto work = [&](std::size_t w) {
    Eigen::VectorXd z(grid_.size());
    Eigen::VectorXd x(grid_.size());
    for (std::size_t k = w; k < trials; k += workers) {
      est[k] = estimate_with(rho, k, z, x);
      err[k] = (est[k] - setup_.delay_s) * (est[k] - setup_.delay_s);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  // Fixed-order reduction.
  McResult out;
  out.trials = trials;
  double sum = 0.0;
  double sum_est = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    sum += err[k];
    sum_est += est[k];
  }
  out.mse = sum / static_cast<double>(trials);
  out.mean_estimate = sum_est / static_cast<double>(trials);
  double var = 0.0;
  for (double e : err) var += (e - out.mse) * (e - out.mse);
  var /= static_cast<double>(trials - 1);
  out.std_error = std::sqrt(var / static_cast<double>(trials));
  return out;
}

McResult simulate_mle_mse(const AcrModel& acr, const EstimationSetup& setup, double rho,
                          const McConfig& config) {
  return MleSimulator(acr, setup, config).run(rho);
}

}  // namespace toa
