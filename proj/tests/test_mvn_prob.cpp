#include <doctest.h>

#include <cmath>

#include "rel.hpp"
#include "toa/mvn_prob.hpp"
#include "toa/special_math.hpp"

using namespace toa;

TEST_CASE("2-D orthant probability against quadrature") {
  Eigen::Vector2d mean(0.3, -0.2);
  Eigen::Matrix2d cov;
  cov << 1.0, 0.5, 0.5, 2.0;
  MvnOptions opt;
  opt.abs_tol = 1e-5;
  const MvnResult r = prob_positive_orthant(mean, cov, opt);
  CHECK(std::abs(r.probability - 0.32807086455695422) < 1e-3);
  CHECK(r.dimension == 2);
}

TEST_CASE("independent components factorize") {
  Eigen::Vector3d mean(0.5, -1.0, 2.0);
  const Eigen::Matrix3d cov = Eigen::Vector3d(1.0, 4.0, 0.25).asDiagonal();
  const MvnResult r = prob_positive_orthant(mean, cov);
  const double expect = q_function(-0.5) * q_function(0.5) * q_function(-4.0);
  CHECK(r.probability == rel(expect).epsilon(1e-3));
}

TEST_CASE("win probabilities of an exchangeable vector") {
  const std::size_t n = 6;
  GaussianVector g;
  g.mean = Eigen::VectorXd::Zero(n);
  g.cov = Eigen::MatrixXd::Constant(n, n, 0.3);
  g.cov.diagonal().setOnes();
  double sum = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const MvnResult r = prob_component_is_max(g, i);
    CHECK(r.probability == rel(1.0 / n).epsilon(2e-2));
    sum += r.probability;
    var += r.std_error * r.std_error;
  }
  CHECK(std::abs(sum - 1.0) <= 3.0 * std::sqrt(var) + 1e-12);
}

TEST_CASE("win probabilities of a correlated process sum to one") {
  // Samples of a Gaussian-correlated process with a peaked mean.
  const std::size_t n = 12;
  GaussianVector g;
  g.mean.resize(n);
  g.cov.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = 0.4 * (static_cast<double>(i) - 5.0);
    g.mean(i) = 1.5 * std::exp(-ti * ti);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = 0.4 * (static_cast<double>(i) - static_cast<double>(j));
      g.cov(i, j) = std::exp(-d * d);
    }
  }
  double sum = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const MvnResult r = prob_component_is_max(g, i);
    CHECK(r.probability >= 0.0);
    sum += r.probability;
    var += r.std_error * r.std_error;
  }
  CHECK(std::abs(sum - 1.0) <= 3.0 * std::sqrt(var) + 1e-6);
}

TEST_CASE("deterministic for a fixed seed") {
  Eigen::Vector3d mean(0.1, 0.2, -0.1);
  Eigen::Matrix3d cov;
  cov << 2, 0.3, 0.1, 0.3, 1, -0.2, 0.1, -0.2, 1.5;
  const MvnResult a = prob_positive_orthant(mean, cov);
  const MvnResult b = prob_positive_orthant(mean, cov);
  CHECK(a.probability == b.probability);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("input validation") {
  GaussianVector g;
  g.mean = Eigen::Vector2d(0, 0);
  g.cov = Eigen::Matrix2d::Identity();
  CHECK_THROWS_AS(prob_component_is_max(g, 2), std::out_of_range);
  g.cov(0, 1) = 0.5;
  CHECK_THROWS_AS(prob_component_is_max(g, 0), std::invalid_argument);
  g.cov << 1, 2, 2, 1;
  CHECK_THROWS_AS(prob_component_is_max(g, 0), std::invalid_argument);
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
}
