#include "subsector/corrmatrix.hpp"

#include "subsector/errors.hpp"
#include "format.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace subsector {

namespace {

constexpr double kTieTolerance = 1e-12;

std::string describe(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << "N=" << m.rows() << ", finite=" << (m.allFinite() ? "yes" : "no");
  if (m.allFinite()) {
    os << ", max|asym|=" << (m - m.transpose()).cwiseAbs().maxCoeff()
       << ", frobenius=" << m.norm()
       << ", max|entry|=" << m.cwiseAbs().maxCoeff();
  }
  return os.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

}  // namespace

CorrelationMatrix correlation_matrix(const NormalizedReturns& nr) {
  const auto N = nr.returns.rows();
  const auto T = nr.returns.cols();
  if (N < 2) throw InsufficientDataError("correlation needs at least two assets");
  if (T < 2) throw InsufficientDataError("correlation needs at least two observations");

  CorrelationMatrix c;
  c.assets = nr.assets;
  c.n_observations = static_cast<std::size_t>(T);
  Eigen::MatrixXd raw = (nr.returns * nr.returns.transpose()) / static_cast<double>(T);
  c.values = 0.5 * (raw + raw.transpose());
  c.values.diagonal().setOnes();
  return c;
}

void validate(const CorrelationMatrix& c, double tol) {
  const auto& m = c.values;
  if (m.rows() != m.cols()) throw ValidationError("correlation matrix is not square");
  if (m.rows() < 2) throw ValidationError("correlation matrix needs N >= 2");
  if (!c.assets.empty() && c.assets.size() != static_cast<std::size_t>(m.rows())) {
    throw ValidationError("asset list does not match the matrix dimension");
  }
  if (!m.allFinite()) throw ValidationError("correlation matrix has non-finite entries");
  if ((m.diagonal().array() != 1.0).any()) {
    throw ValidationError("correlation matrix diagonal must be exactly 1");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw ValidationError("correlation matrix is not symmetric (" + describe(m) + ")");
  }
  if (m.cwiseAbs().maxCoeff() > 1.0 + tol) {
    throw ValidationError("correlation entries must lie in [-1, 1]");
  }
}

double mean_offdiagonal(const CorrelationMatrix& c) {
  const auto N = c.values.rows();
  if (N < 2) throw InsufficientDataError("mean off-diagonal needs N >= 2");
  const double off = c.values.sum() - c.values.trace();
  return off / static_cast<double>(N * (N - 1));
}

Eigen::VectorXd EigenSpectrum::mode(std::size_t alpha) const {
  if (alpha >= n_modes()) throw IndexError(alpha, n_modes());
  return eigenvectors.col(static_cast<Eigen::Index>(alpha));
}

std::size_t dominant_component(const Eigen::Ref<const Eigen::VectorXd>& u) {
  const double peak = u.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) >= peak * (1.0 - kTieTolerance)) return static_cast<std::size_t>(i);
  }
  return 0;
}

void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> u) {
  if (u.size() == 0) return;
  if (u(static_cast<Eigen::Index>(dominant_component(u))) < 0.0) u = -u;
}

EigenSpectrum eigendecompose(const CorrelationMatrix& c) {
  const auto& m = c.values;
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError("eigendecomposition needs a non-empty square matrix");
  }
  if (!m.allFinite()) throw NumericalError("matrix has non-finite entries (" + describe(m) + ")");

  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigensolver did not converge (" + describe(m) + ")");
  }
  const auto N = sym.rows();
  Eigen::MatrixXd vectors = solver.eigenvectors();
  for (Eigen::Index k = 0; k < N; ++k) canonicalize_sign(vectors.col(k));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

  // Degenerate eigenvalues: order by the index of the dominant component.
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo + 1;
    while (hi < order.size() &&
           values(order[lo]) - values(order[hi]) <= kTieTolerance * scale * 100.0) {
      ++hi;
    }
    if (hi - lo > 1) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(lo),
                       order.begin() + static_cast<std::ptrdiff_t>(hi),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return dominant_component(vectors.col(a)) <
                                dominant_component(vectors.col(b));
                       });
    }
    lo = hi;
  }

  EigenSpectrum spec;
  spec.assets = c.assets;
  spec.n_observations = c.n_observations;
  spec.eigenvalues.resize(N);
  spec.eigenvectors.resize(N, N);
  for (Eigen::Index k = 0; k < N; ++k) {
    spec.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
    spec.eigenvectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return spec;
}

void write_correlation(const CorrelationMatrix& c, const std::filesystem::path& grid,
                       const std::filesystem::path& sidecar) {
  std::ofstream out(grid);
  if (!out) throw ConfigError("cannot write '" + grid.string() + "'");
  out << "asset";
  for (const auto& a : c.assets) out << ',' << a;
  out << '\n';
  for (Eigen::Index i = 0; i < c.values.rows(); ++i) {
    out << c.assets[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < c.values.cols(); ++j) out << ',' << detail::Shortest{c.values(i, j)};
    out << '\n';
  }

  nlohmann::ordered_json meta;
  meta["n_assets"] = c.n_assets();
  meta["n_observations"] = c.n_observations;
  meta["assets"] = c.assets;
  std::ofstream side(sidecar);
  if (!side) throw ConfigError("cannot write '" + sidecar.string() + "'");
  side << meta.dump(2) << '\n';
}

CorrelationMatrix read_correlation(const std::filesystem::path& grid,
                                   const std::filesystem::path& sidecar) {
  std::ifstream side(sidecar);
  if (!side) throw ConfigError("cannot open '" + sidecar.string() + "'");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(side);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("sidecar: ") + e.what());
  }
  const auto n = meta.at("n_assets").get<std::size_t>();

  CorrelationMatrix c;
  c.n_observations = meta.at("n_observations").get<std::size_t>();
  c.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  std::ifstream in(grid);
  if (!in) throw ConfigError("cannot open '" + grid.string() + "'");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "empty correlation grid");
  auto header = split_csv(line);
  if (header.size() != n + 1) throw ParseError(1, "header does not list N assets");
  c.assets.assign(header.begin() + 1, header.end());

  for (std::size_t i = 0; i < n; ++i) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError(line_no, "missing matrix row");
    const auto cells = split_csv(line);
    if (cells.size() != n + 1) throw ParseError(line_no, "row does not have N entries");
    for (std::size_t j = 0; j < n; ++j) {
      const auto& s = cells[j + 1];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(line_no, "cannot parse '" + s + "'");
      }
      c.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  validate(c);
  return c;
}

}  // namespace subsector
