/*
 * Wishart (Marchenko-Pastur) reference law for correlation matrices of
 * uncorrelated series and detection of eigenvalues above its upper edge.
 */
#pragma once

#include "subsector/corrmatrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace subsector {

struct WishartLaw {
  double q = 1.0;  ///< aspect ratio T/N
  double lambda_min = 0.0;
  double lambda_max = 4.0;

  double density(double lambda) const;
  double cdf(double lambda) const;
};

/// lambda_min/max = (1 -/+ 1/sqrt(q))^2. Throws DomainError for q < 1.
WishartLaw mp_bounds(double q);

/// (q / 2 pi) sqrt((lambda_max - lambda)(lambda - lambda_min)) / lambda inside
/// the bounds, zero outside and at lambda <= 0.
double mp_density(double lambda, double q);

/// Cumulative distribution of mp_density.
double mp_cdf(double lambda, double q);

/// T/N of the spectrum. Throws DomainError when below 1.
double aspect_ratio(const EigenSpectrum& spec);

struct SignificantSet {
  std::vector<std::size_t> indices;  ///< descending eigenvalue order
  std::vector<double> eigenvalues;
  std::vector<double> ratios;  ///< eigenvalue / lambda_max
  double threshold = 0.0;      ///< margin * lambda_max
  double margin = 1.0;
  WishartLaw law;

  bool contains(std::size_t alpha) const;
};

/// Modes with eigenvalue strictly above margin * lambda_max.
/// A margin near 1.05 guards against edge fluctuations at small N.
SignificantSet significant_eigenvalues(const EigenSpectrum& spec, double margin = 1.0);

/// Fraction of eigenvalues outside [lambda_min, lambda_max].
double fraction_outside(std::span<const double> eigenvalues, const WishartLaw& law);

/// Kolmogorov-Smirnov distance between the empirical distribution of the
/// eigenvalues inside the bounds and the law's CDF.
double ks_distance(std::span<const double> eigenvalues, const WishartLaw& law);

}  // namespace subsector
