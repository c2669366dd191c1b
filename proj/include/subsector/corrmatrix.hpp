/*
 * Equal-time cross-correlation matrix and its eigendecomposition.
 *
 * Spectra are ordered with the largest eigenvalue first (mode 0). Each
 * eigenvector is sign-canonicalized so that its largest-magnitude component
 * is positive; "positive" and "negative" subsectors are relative to that
 * convention.
 */
#pragma once

#include "subsector/timeseries.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace subsector {

struct CorrelationMatrix {
  std::vector<std::string> assets;
  Eigen::MatrixXd values;  ///< N x N, symmetric, unit diagonal
  std::size_t n_observations = 0;

  std::size_t n_assets() const { return static_cast<std::size_t>(values.rows()); }
};

/// C_ij = (1/T) sum_t r_i(t) r_j(t), symmetrized, with the diagonal set to 1.
CorrelationMatrix correlation_matrix(const NormalizedReturns& nr);

/// Checks shape, unit diagonal, symmetry and the [-1, 1] range to `tol`.
void validate(const CorrelationMatrix& c, double tol = 1e-12);

/// Mean of the N(N-1) off-diagonal entries.
double mean_offdiagonal(const CorrelationMatrix& c);

struct EigenSpectrum {
  std::vector<std::string> assets;
  Eigen::VectorXd eigenvalues;   ///< descending
  Eigen::MatrixXd eigenvectors;  ///< column alpha is the unit eigenvector of eigenvalues(alpha)
  std::size_t n_observations = 0;

  std::size_t n_assets() const { return static_cast<std::size_t>(eigenvectors.rows()); }
  std::size_t n_modes() const { return static_cast<std::size_t>(eigenvalues.size()); }
  /// Throws IndexError when alpha >= n_modes().
  Eigen::VectorXd mode(std::size_t alpha) const;
};

/// Flips `u` so that its largest-magnitude component is positive. Magnitudes
/// equal to within a relative 1e-12 count as ties; the lowest index wins.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> u);

/// Index of the largest-magnitude component, with the tie rule above.
std::size_t dominant_component(const Eigen::Ref<const Eigen::VectorXd>& u);

EigenSpectrum eigendecompose(const CorrelationMatrix& c);

/// Writes the grid (asset header row, then one row per asset) and a JSON
/// sidecar holding N, T and the asset order.
void write_correlation(const CorrelationMatrix& c, const std::filesystem::path& grid,
                       const std::filesystem::path& sidecar);
CorrelationMatrix read_correlation(const std::filesystem::path& grid,
                                   const std::filesystem::path& sidecar);

}  // namespace subsector
