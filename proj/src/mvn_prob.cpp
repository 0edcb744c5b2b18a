#include "toa/mvn_prob.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "toa/special_math.hpp"

namespace toa {

namespace {

constexpr std::size_t kMaxDim = 64;

// sqrt of the first 64 primes, fractional parts used as lattice generators.
std::array<double, kMaxDim> richtmyer_generators() {
  std::array<double, kMaxDim> q{};
  std::size_t found = 0;
  for (int p = 2; found < kMaxDim; ++p) {
    bool prime = true;
    for (int d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) {
      const double r = std::sqrt(static_cast<double>(p));
      q[found++] = r - std::floor(r);
    }
  }
  return q;
}

const std::array<double, kMaxDim>& generators() {
  static const auto q = richtmyer_generators();
  return q;
}

// Upper tail that stays accurate (and positive) far into the tail.
double upper_tail(double t) { return 0.5 * std::erfc(t * 0.70710678118654752440); }

struct Factorized {
  std::size_t dim = 0;
  std::vector<double> chol;   // row-major lower triangle, dim x dim
  std::vector<double> lower;  // lower integration limits of the reordered variables
  bool regularized = false;
};

// Cholesky of cov with Genz-Bretz prioritization: at each step pick the
// remaining variable with the smallest expected conditional probability.
Factorized factorize(std::vector<double> lower, std::vector<double> cov, std::size_t n) {
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += cov[i * n + i];
  // Difference covariances of band-limited processes are close to singular;
  // a small ridge keeps the pivoted Cholesky from amplifying rounding.
  const double ridge = 1e-10 * trace;
  for (std::size_t i = 0; i < n; ++i) cov[i * n + i] += ridge;
  const double floor = 0.5 * ridge;
  Factorized f;
  f.dim = n;
  f.chol.assign(n * n, 0.0);
  std::vector<double> y(n, 0.0);  // expected values of the standardized variables
  auto swap_var = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    std::swap(lower[i], lower[j]);
    for (std::size_t k = 0; k < n; ++k) std::swap(cov[i * n + k], cov[j * n + k]);
    for (std::size_t k = 0; k < n; ++k) std::swap(cov[k * n + i], cov[k * n + j]);
    for (std::size_t k = 0; k < i; ++k) std::swap(f.chol[i * n + k], f.chol[j * n + k]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = i;
    double best_p = 2.0;
    for (std::size_t j = i; j < n; ++j) {
      double var = cov[j * n + j];
      double s = 0.0;
      for (std::size_t k = 0; k < i; ++k) {
        var -= f.chol[j * n + k] * f.chol[j * n + k];
        s += f.chol[j * n + k] * y[k];
      }
      var = std::max(var, floor);
      const double p = upper_tail((lower[j] - s) / std::sqrt(var));
      if (p < best_p) {
        best_p = p;
        best = j;
      }
    }
    swap_var(i, best);
    double var = cov[i * n + i];
    for (std::size_t k = 0; k < i; ++k) var -= f.chol[i * n + k] * f.chol[i * n + k];
    if (var < floor) {
      var = floor;
      f.regularized = true;
    }
    const double d = std::sqrt(var);
    f.chol[i * n + i] = d;
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = cov[j * n + i];
      for (std::size_t k = 0; k < i; ++k) v -= f.chol[j * n + k] * f.chol[i * n + k];
      f.chol[j * n + i] = v / d;
    }
    // Mean of the standard normal truncated to (t, inf).
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k) s += f.chol[i * n + k] * y[k];
    const double t = (lower[i] - s) / d;
    const double p = upper_tail(t);
    y[i] = p > 1e-300 ? normal_pdf(t) / p : t;
  }
  f.lower = std::move(lower);
  return f;
}

// Integrand of the separation-of-variables transform at one unit-cube point.
double sov_integrand(const Factorized& f, const double* u, double* z) {
  const std::size_t n = f.dim;
  double prob = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = &f.chol[i * n];
    for (std::size_t k = 0; k < i; ++k) s += row[k] * z[k];
    const double p = upper_tail((f.lower[i] - s) / row[i]);
    prob *= p;
    if (prob <= 0.0) return 0.0;
    if (i + 1 < n) {
      // z_i ~ N(0,1) truncated to (t_i, inf): Q(z_i) = u_i Q(t_i).
      const double target = std::clamp(u[i] * p, 1e-300, 1.0 - 1e-16);
      z[i] = q_inverse(target);
    }
  }
  return prob;
}

}  // namespace

void GaussianVector::validate() const {
  const auto n = mean.size();
  if (n == 0 || cov.rows() != n || cov.cols() != n) {
    throw std::invalid_argument("GaussianVector: dimension mismatch");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("GaussianVector: covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * cov.trace()) {
    throw std::invalid_argument("GaussianVector: covariance is not positive semidefinite");
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MvnResult prob_positive_orthant(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                const MvnOptions& options) {
  const auto full = static_cast<std::size_t>(mean.size());
  if (full == 0 || static_cast<std::size_t>(cov.rows()) != full ||
      static_cast<std::size_t>(cov.cols()) != full) {
    throw std::invalid_argument("prob_positive_orthant: dimension mismatch");
  }
  if (options.shifts < 2 || options.min_points == 0 || options.max_points < options.min_points) {
    throw std::invalid_argument("prob_positive_orthant: invalid QMC settings");
  }

  MvnResult out;
  // Keep constraints that can be violated with non-negligible probability.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < full; ++i) {
    const double sd = std::sqrt(std::max(cov(i, i), 0.0));
    if (sd == 0.0) {
      if (mean(i) <= 0.0) return out;  // deterministic violation
      continue;
    }
    const double p_violate = upper_tail(mean(i) / sd);
    if (p_violate >= options.drop_tol) keep.push_back(i);
  }
  const std::size_t n = keep.size();
  if (n > kMaxDim) {
    throw std::invalid_argument("prob_positive_orthant: more than 64 active constraints");
  }
  out.dimension = n;
  if (n == 0) {
    out.probability = 1.0;
    return out;
  }
  std::vector<double> lower(n);
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = -mean(keep[i]);
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = cov(keep[i], keep[j]);
  }
  if (n == 1) {
    out.probability = upper_tail(lower[0] / std::sqrt(c[0]));
    return out;
  }
  const Factorized f = factorize(std::move(lower), std::move(c), n);
  out.regularized = f.regularized;

  const std::size_t qdim = n - 1;
  const auto& q = generators();
  std::vector<std::array<double, kMaxDim>> shift(options.shifts);
  for (std::size_t r = 0; r < options.shifts; ++r) {
    std::mt19937_64 rng(mix_seed(options.seed, r));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t j = 0; j < qdim; ++j) shift[r][j] = unif(rng);
  }
  std::vector<double> sums(options.shifts, 0.0);
  std::vector<double> u(qdim);
  std::vector<double> z(n);
  std::size_t done = 0;
  std::size_t target = options.min_points;
  while (true) {
    for (std::size_t r = 0; r < options.shifts; ++r) {
      for (std::size_t k = done + 1; k <= target; ++k) {
        const double kd = static_cast<double>(k);
        for (std::size_t j = 0; j < qdim; ++j) {
          double x = kd * q[j] + shift[r][j];
          x -= std::floor(x);
          u[j] = std::abs(2.0 * x - 1.0);  // tent periodization
        }
        sums[r] += sov_integrand(f, u.data(), z.data());
      }
    }
    done = target;
    const double m = static_cast<double>(done);
    double mean_est = 0.0;
    for (double s : sums) mean_est += s / m;
    mean_est /= static_cast<double>(options.shifts);
    double var = 0.0;
    for (double s : sums) var += (s / m - mean_est) * (s / m - mean_est);
    var /= static_cast<double>(options.shifts * (options.shifts - 1));
    out.probability = std::clamp(mean_est, 0.0, 1.0);
    out.std_error = std::sqrt(var);
    out.points_per_shift = done;
    const double tol =
        std::min(options.abs_tol, std::max(options.rel_tol * out.probability, options.abs_floor));
    if (out.std_error <= tol || done >= options.max_points) break;
    target = std::min(2 * done, options.max_points);
  }
  return out;
}

MvnResult prob_component_is_max(const GaussianVector& g, std::size_t index,
                                const MvnOptions& options) {
  g.validate();
  const auto n = static_cast<std::size_t>(g.mean.size());
  if (index >= n) {
    throw std::out_of_range("prob_component_is_max: index out of range");
  }
  if (n == 1) {
    MvnResult one;
    one.probability = 1.0;
    return one;
  }
  Eigen::VectorXd mean(n - 1);
  Eigen::MatrixXd cov(n - 1, n - 1);
  std::vector<std::size_t> others;
  for (std::size_t m = 0; m < n; ++m) {
    if (m != index) others.push_back(m);
  }
  const auto i = static_cast<Eigen::Index>(index);
  for (std::size_t a = 0; a < others.size(); ++a) {
    const auto ma = static_cast<Eigen::Index>(others[a]);
    mean(a) = g.mean(i) - g.mean(ma);
    for (std::size_t b = 0; b < others.size(); ++b) {
      const auto mb = static_cast<Eigen::Index>(others[b]);
      cov(a, b) = g.cov(i, i) - g.cov(i, mb) - g.cov(ma, i) + g.cov(ma, mb);
    }
  }
  return prob_positive_orthant(mean, cov, options);
}

}  // namespace toa
