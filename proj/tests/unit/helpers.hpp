#pragma once

#include "subsector/corrmatrix.hpp"
#include "subsector/timeseries.hpp"

#include <Eigen/Core>

#include <random>
#include <string>

namespace testing_support {

inline subsector::ReturnMatrix noise_returns(std::size_t n, std::size_t t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  subsector::ReturnMatrix rm;
  rm.returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (std::size_t i = 0; i < n; ++i) rm.assets.push_back("N" + std::to_string(i));
  for (Eigen::Index i = 0; i < rm.returns.rows(); ++i) {
    for (Eigen::Index k = 0; k < rm.returns.cols(); ++k) rm.returns(i, k) = z(rng);
  }
  return rm;
}

inline subsector::NormalizedReturns noise_panel(std::size_t n, std::size_t t, std::uint64_t seed) {
  return subsector::normalize_returns(noise_returns(n, t, seed));
}

/// Random correlation matrix D^-1/2 A A^T D^-1/2 with a random factor count.
inline subsector::CorrelationMatrix random_correlation(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<std::size_t> rank(1, 2 * n);
  const auto k = static_cast<Eigen::Index>(rank(rng));
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a(N, k);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = z(rng);
  Eigen::MatrixXd cov = a * a.transpose();
  cov.diagonal().array() += 1e-3;
  const Eigen::VectorXd inv = cov.diagonal().array().rsqrt();
  subsector::CorrelationMatrix c;
  c.values = inv.asDiagonal() * cov * inv.asDiagonal();
  c.values = (0.5 * (c.values + c.values.transpose())).eval();
  c.values.diagonal().setOnes();
  c.n_observations = 2 * n;
  for (std::size_t i = 0; i < n; ++i) c.assets.push_back("X" + std::to_string(i));
  return c;
}

inline subsector::CorrelationMatrix four_by_four() {
  subsector::CorrelationMatrix c;
  c.values.resize(4, 4);
  c.values << 1.00, 0.55, 0.15, 0.11,
              0.55, 1.00, 0.39, 0.34,
              0.15, 0.39, 1.00, 0.95,
              0.11, 0.34, 0.95, 1.00;
  c.assets = {"3M", "6M", "10Y", "20Y"};
  c.n_observations = 100;
  return c;
}

inline subsector::CorrelationMatrix from_values(const Eigen::MatrixXd& v, std::size_t t = 100) {
  subsector::CorrelationMatrix c;
  c.values = v;
  c.n_observations = t;
  for (Eigen::Index i = 0; i < v.rows(); ++i) c.assets.push_back("A" + std::to_string(i));
  return c;
}

}  // namespace testing_support
