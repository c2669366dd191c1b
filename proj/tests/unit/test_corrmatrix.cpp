#include "helpers.hpp"

#include "subsector/corrmatrix.hpp"
#include "subsector/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace subsector;
using namespace testing_support;

namespace {

// Cyclic Jacobi rotations; eigenvalues returned in descending order.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const auto n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(a(i, i));
  std::sort(out.rbegin(), out.rend());
  return out;
}

NormalizedReturns rows(std::initializer_list<std::vector<double>> data) {
  ReturnMatrix rm;
  std::size_t t = data.begin()->size();
  rm.returns.resize(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(t));
  Eigen::Index i = 0;
  for (const auto& r : data) {
    rm.assets.push_back("A" + std::to_string(i));
    for (std::size_t k = 0; k < t; ++k) rm.returns(i, static_cast<Eigen::Index>(k)) = r[k];
    ++i;
  }
  return normalize_returns(rm);
}

void check_spectrum_invariants(const CorrelationMatrix& c, const EigenSpectrum& s) {
  const auto n = static_cast<Eigen::Index>(c.n_assets());
  const Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::MatrixXd rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
  CHECK((rebuilt - c.values).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(s.eigenvalues.sum() - static_cast<double>(n)) < 1e-9);
  for (Eigen::Index a = 1; a < n; ++a) CHECK(s.eigenvalues(a - 1) >= s.eigenvalues(a));
  for (Eigen::Index a = 0; a < n; ++a) {
    const Eigen::VectorXd u = s.eigenvectors.col(a);
    CHECK(u(static_cast<Eigen::Index>(dominant_component(u))) > 0.0);
  }
}

}  // namespace

TEST_CASE("correlation_matrix examples") {
  SUBCASE("identical rows") {
    auto c = correlation_matrix(rows({{1, 2, 4, 3}, {1, 2, 4, 3}}));
    CHECK(c.values(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.values(0, 0) == 1.0);
    CHECK(c.n_observations == 4);
  }
  SUBCASE("negated rows") {
    auto c = correlation_matrix(rows({{1, 2, 4, 3}, {-1, -2, -4, -3}}));
    CHECK(c.values(0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  }
  SUBCASE("independent noise has small off-diagonals") {
    auto c = correlation_matrix(noise_panel(10, 10000, 3));
    Eigen::MatrixXd off = c.values;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 0.05);
  }
  SUBCASE("too few observations") {
    NormalizedReturns nr;
    nr.assets = {"A", "B"};
    nr.returns = Eigen::MatrixXd::Zero(2, 1);
    CHECK_THROWS_AS(correlation_matrix(nr), InsufficientDataError);
  }
}

TEST_CASE("correlation matrices from returns satisfy the matrix invariants") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto n = 2 + seed % 17;
    const auto c = correlation_matrix(noise_panel(n, 3 + seed * 2, seed));
    CHECK_NOTHROW(validate(c));
    for (Eigen::Index i = 0; i < c.values.rows(); ++i) CHECK(c.values(i, i) == 1.0);
    CHECK(eigendecompose(c).eigenvalues.minCoeff() >= -1e-9);
  }
}

TEST_CASE("mean_offdiagonal") {
  Eigen::Matrix2d half;
  half << 1, 0.5, 0.5, 1;
  CHECK(mean_offdiagonal(from_values(half)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mean_offdiagonal(from_values(Eigen::MatrixXd::Identity(5, 5))) == 0.0);
}

TEST_CASE("validate rejects malformed matrices") {
  Eigen::Matrix2d m;
  m << 1, 0.5, 0.4, 1;
  CHECK_THROWS_AS(validate(from_values(m)), ValidationError);
  m << 0.9, 0.5, 0.5, 1;
  CHECK_THROWS_AS(validate(from_values(m)), ValidationError);
  m << 1, 1.5, 1.5, 1;
  CHECK_THROWS_AS(validate(from_values(m)), ValidationError);
}

TEST_CASE("eigendecompose examples") {
  SUBCASE("identity") {
    auto s = eigendecompose(from_values(Eigen::MatrixXd::Identity(3, 3)));
    CHECK((s.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-14);
    // degenerate: ordered by dominant component index
    for (Eigen::Index a = 0; a < 3; ++a) CHECK(dominant_component(s.eigenvectors.col(a)) == static_cast<std::size_t>(a));
  }
  SUBCASE("2 x 2 with rho = 0.6") {
    Eigen::Matrix2d m;
    m << 1, 0.6, 0.6, 1;
    auto s = eigendecompose(from_values(m));
    CHECK(s.eigenvalues(0) == doctest::Approx(1.6).epsilon(1e-14));
    CHECK(s.eigenvalues(1) == doctest::Approx(0.4).epsilon(1e-14));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(s.eigenvectors(0, 0) == doctest::Approx(r).epsilon(1e-14));
    CHECK(s.eigenvectors(1, 0) == doctest::Approx(r).epsilon(1e-14));
    // tie between |u_0| and |u_1|: lowest index positive
    CHECK(s.eigenvectors(0, 1) == doctest::Approx(r).epsilon(1e-14));
    CHECK(s.eigenvectors(1, 1) == doctest::Approx(-r).epsilon(1e-14));
  }
  SUBCASE("bond-rate 4 x 4: second mode splits {1,2} from {3,4}") {
    const auto c = four_by_four();
    const auto s = eigendecompose(c);
    const auto oracle = jacobi_eigenvalues(c.values);
    for (Eigen::Index a = 0; a < 4; ++a) CHECK(std::abs(s.eigenvalues(a) - oracle[static_cast<std::size_t>(a)]) < 1e-12);
    const Eigen::VectorXd u = s.mode(1);
    CHECK(u(0) * u(1) > 0);
    CHECK(u(2) * u(3) > 0);
    CHECK(u(0) * u(2) < 0);
    CHECK(u(0) > 0);  // largest magnitude sits on asset 1
    check_spectrum_invariants(c, s);
  }
  SUBCASE("mode index out of range") {
    auto s = eigendecompose(four_by_four());
    CHECK_THROWS_AS(s.mode(4), IndexError);
  }
  SUBCASE("non-finite input") {
    auto c = four_by_four();
    c.values(0, 2) = c.values(2, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(eigendecompose(c), NumericalError);
  }
}

TEST_CASE("spectral invariants on random correlation matrices") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto c = random_correlation(2 + seed * 3 % 60, seed);
    const auto s = eigendecompose(c);
    check_spectrum_invariants(c, s);
    const auto oracle = jacobi_eigenvalues(c.values);
    for (std::size_t a = 0; a < oracle.size(); ++a) {
      CHECK(std::abs(s.eigenvalues(static_cast<Eigen::Index>(a)) - oracle[a]) < 1e-9);
    }
  }
}

TEST_CASE("decomposition is bitwise deterministic") {
  const auto c = random_correlation(40, 99);
  const auto a = eigendecompose(c);
  const auto b = eigendecompose(c);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("canonicalize_sign") {
  Eigen::VectorXd u(3);
  u << 0.1, -0.9, 0.3;
  canonicalize_sign(u);
  CHECK(u(1) == 0.9);
  CHECK(u(0) == -0.1);
  u << -0.5, 0.5, 0.1;
  canonicalize_sign(u);
  CHECK(u(0) == 0.5);
  CHECK(dominant_component(u) == 0);
}

TEST_CASE("correlation grid round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "subsector_corr_io";
  std::filesystem::create_directories(dir);
  const auto c = random_correlation(7, 5);
  write_correlation(c, dir / "c.csv", dir / "c.json");
  const auto back = read_correlation(dir / "c.csv", dir / "c.json");
  CHECK(back.assets == c.assets);
  CHECK(back.n_observations == c.n_observations);
  CHECK(back.values == c.values);

  std::ofstream(dir / "bad.csv") << "asset,X0\nX0,1\nX1,1\n";
  CHECK_THROWS(read_correlation(dir / "bad.csv", dir / "c.json"));
  std::filesystem::remove_all(dir);
}
