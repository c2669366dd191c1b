/*
 * Sign-split subsectors of significant eigenvectors and their category labels.
 *
 * A component u_i of mode alpha belongs to the positive subsector when
 * u_i >= u_c and to the negative subsector when u_i <= -u_c. Both
 * inequalities are inclusive.
 */
#pragma once

#include "subsector/corrmatrix.hpp"
#include "subsector/rmt.hpp"
#include "subsector/timeseries.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace subsector {

enum class Side { positive, negative };

const char* to_string(Side side);

inline constexpr const char* kNullCategory = "Null";
inline constexpr const char* kUnlabeled = "Unlabeled";
inline constexpr const char* kSignConvention = "largest-magnitude component positive";

struct SubsectorPartition {
  std::size_t mode_index = 0;
  double threshold = 0.0;
  std::vector<std::size_t> positive;  ///< ascending asset indices
  std::vector<std::size_t> negative;
  std::vector<double> positive_weights;  ///< u_i of each positive member
  std::vector<double> negative_weights;
  /// Set when threshold <= 1/sqrt(N), i.e. inside the typical size of a
  /// random eigenvector component.
  bool below_noise_floor = false;

  const std::vector<std::size_t>& members(Side side) const;
  const std::vector<double>& weights(Side side) const;
};

/// 1/sqrt(N): the typical |u_i| of a random unit vector.
double noise_floor(std::size_t n_assets);

/// Thresholds one vector. With u_c == 0 an exact zero goes to the positive
/// side only, keeping the subsectors disjoint. Throws ArgumentError for a
/// negative or non-finite threshold.
SubsectorPartition split_components(std::span<const double> u, double u_c,
                                    std::size_t mode_index = 0);

/// Throws IndexError when alpha is not a mode of the spectrum.
SubsectorPartition select_components(const EigenSpectrum& spec, std::size_t alpha, double u_c);

struct LabelReport {
  std::size_t mode_index = 0;
  double threshold = 0.0;
  Side side = Side::positive;
  std::string dominant_category;
  std::size_t matched = 0;
  std::size_t total = 0;
  std::vector<std::string> members;
};

/// Modal category of one side. Ties go to the lexicographically smallest
/// category; a modal share below one half is reported as "Null". Members
/// without a category count toward the total only.
LabelReport label_subsector(const SubsectorPartition& part, Side side,
                            std::span<const std::string> assets, const CategoryMap& metadata);

struct SectorRow {
  double eigenvalue = 0.0;
  LabelReport report;
};

struct SectorTable {
  std::vector<double> thresholds;
  std::vector<SectorRow> rows;  ///< ordered by mode, threshold, then + before -
  std::vector<std::size_t> excluded_modes;  ///< single-signed market modes
  std::string sign_convention = kSignConvention;
};

/// True when no two components have strictly opposite signs.
bool single_signed(const Eigen::Ref<const Eigen::VectorXd>& u);

/// One row per (significant mode, threshold, side). Mode 0 is left out when
/// all of its components share a sign. Without metadata every label is
/// "Unlabeled". Thresholds must be positive and ascending.
SectorTable sector_table(const EigenSpectrum& spec, const SignificantSet& significant,
                         std::span<const double> thresholds, const CategoryMap* metadata);

}  // namespace subsector
