/*
 * Anti-correlation between the positive and negative subsectors of an
 * eigenmode.
 *
 * Combination series I(t) = sum_i w_i r_i(t) are built over the members of
 * one side. For the subsector comparison (mode_scan) both sides use the
 * magnitudes |u_i| as weights, the same weights the random baseline assigns
 * to random subsets, so a planted anti-correlation shows up as a C+- below the
 * baseline. With signed weights the negative-side series is exactly negated
 * and C+- changes sign.
 */
#pragma once

#include "subsector/corrmatrix.hpp"
#include "subsector/sectors.hpp"
#include "subsector/timeseries.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace subsector {

struct ModeCorrelation {
  std::size_t alpha = 0;
  Eigen::MatrixXd values;  ///< u_alpha u_alpha^T
};

/// C^alpha_ij = u_i u_j. Throws IndexError on a bad alpha.
ModeCorrelation eigenmode_correlation(const EigenSpectrum& spec, std::size_t alpha);

/// sum_i weights[k] * r_{members[k]}(t)
Eigen::VectorXd combination_series(const NormalizedReturns& nr,
                                   std::span<const std::size_t> members,
                                   std::span<const double> weights);

enum class Weighting {
  signed_components,  ///< w_i = u_i
  magnitudes,         ///< w_i = |u_i|
};

/// Series of one side of a partition. Throws ArgumentError when the side is
/// empty; lower u_c or skip the mode.
Eigen::VectorXd subsector_series(const NormalizedReturns& nr, const SubsectorPartition& part,
                                 Side side, Weighting weighting = Weighting::signed_components);

struct PairCorrelation {
  double raw = 0.0;               ///< <I+ I-> over time
  std::optional<double> pearson;  ///< absent when either series is constant
};

/// Throws ArgumentError on unequal lengths or fewer than two samples.
PairCorrelation cross_corr_pm(const Eigen::VectorXd& plus, const Eigen::VectorXd& minus);

struct BaselineStats {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation of the trial correlations
  std::size_t trials = 0;
  std::size_t undefined_trials = 0;  ///< trials whose Pearson value was undefined
  std::uint64_t seed = 0;
  std::vector<double> samples;
};

/// Per trial: two disjoint uniform random asset subsets of the sizes of the
/// weight lists, the magnitudes of the weights shuffled onto them, and the
/// Pearson correlation of the two combination series. Trial k always draws
/// from substream k of `seed`.
BaselineStats random_baseline(const NormalizedReturns& nr, std::span<const double> plus_weights,
                              std::span<const double> minus_weights, std::size_t trials,
                              std::uint64_t seed);

struct ScanOptions {
  double u_c = 0.08;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  bool include_market_mode = false;
};

struct ScanRow {
  std::size_t alpha = 0;
  double eigenvalue = 0.0;
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  PairCorrelation corr;
  BaselineStats baseline;                ///< samples dropped
  std::optional<double> baseline_z;      ///< (pearson - mean) / stddev
};

struct ModeScan {
  ScanOptions options;
  std::vector<ScanRow> rows;                 ///< ascending alpha
  std::vector<std::size_t> skipped_modes;    ///< a side was empty
};

/// C+- and its random baseline for every mode whose subsectors are both
/// non-empty. Needs at least 100 baseline trials.
ModeScan mode_scan(const NormalizedReturns& nr, const EigenSpectrum& spec,
                   const ScanOptions& options);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

/// Rank correlation between mode index and Pearson C+- over a scan; values
/// near +1 mean C+- rises toward the baseline with alpha.
double scan_trend(const ModeScan& scan);

struct BlockAverages {
  std::optional<double> within_positive;  ///< absent with fewer than two members
  std::optional<double> within_negative;
  std::optional<double> between;          ///< absent when a side is empty
};

BlockAverages block_averages(const CorrelationMatrix& c, const SubsectorPartition& part);

struct ModeBlocks {
  std::size_t alpha = 0;
  double eigenvalue = 0.0;
  BlockAverages averages;
};

struct AnticorrReport {
  ModeScan scan;
  std::optional<ModeScan> full_vector_scan;  ///< same scan with u_c = 0
  std::vector<ModeBlocks> blocks;            ///< per scanned mode at options.u_c
};

AnticorrReport anticorr_report(const NormalizedReturns& nr, const CorrelationMatrix& c,
                               const EigenSpectrum& spec, const ScanOptions& options,
                               bool with_full_vector_scan);

}  // namespace subsector
