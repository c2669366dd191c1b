#include "subsector/anticorr.hpp"

#include "subsector/errors.hpp"
#include "subsector/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace subsector {

namespace {

bool constant_series(const Eigen::VectorXd& centered, const Eigen::VectorXd& original) {
  const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(centered.size()));
  const double scale = original.cwiseAbs().maxCoeff();
  return sd == 0.0 || sd <= 16.0 * std::numeric_limits<double>::epsilon() * scale;
}

std::optional<double> pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ca = a.array() - a.mean();
  const Eigen::VectorXd cb = b.array() - b.mean();
  if (constant_series(ca, a) || constant_series(cb, b)) return std::nullopt;
  return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

// Columns of `returns_t` are assets, so each member is a contiguous read.
Eigen::VectorXd combine_columns(const Eigen::MatrixXd& returns_t,
                                std::span<const std::size_t> members,
                                std::span<const double> weights) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(returns_t.rows());
  for (std::size_t k = 0; k < members.size(); ++k) {
    out.noalias() += weights[k] * returns_t.col(static_cast<Eigen::Index>(members[k]));
  }
  return out;
}

std::vector<double> magnitudes(std::span<const double> w) {
  std::vector<double> out(w.size());
  std::transform(w.begin(), w.end(), out.begin(), [](double x) { return std::abs(x); });
  return out;
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t lo = 0; lo < idx.size();) {
    std::size_t hi = lo + 1;
    while (hi < idx.size() && v[idx[hi]] == v[idx[lo]]) ++hi;
    const double avg = 0.5 * static_cast<double>(lo + hi - 1) + 1.0;
    for (std::size_t k = lo; k < hi; ++k) r[idx[k]] = avg;
    lo = hi;
  }
  return r;
}

std::optional<double> mean_pairs(const CorrelationMatrix& c, const std::vector<std::size_t>& a) {
  if (a.size() < 2) return std::nullopt;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = x + 1; y < a.size(); ++y) {
      sum += c.values(static_cast<Eigen::Index>(a[x]), static_cast<Eigen::Index>(a[y]));
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

}  // namespace

ModeCorrelation eigenmode_correlation(const EigenSpectrum& spec, std::size_t alpha) {
  const Eigen::VectorXd u = spec.mode(alpha);
  return ModeCorrelation{alpha, u * u.transpose()};
}

Eigen::VectorXd combination_series(const NormalizedReturns& nr,
                                   std::span<const std::size_t> members,
                                   std::span<const double> weights) {
  if (members.size() != weights.size()) {
    throw ArgumentError("members and weights differ in length");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nr.returns.cols());
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k] >= nr.n_assets()) throw IndexError(members[k], nr.n_assets());
    out += weights[k] * nr.returns.row(static_cast<Eigen::Index>(members[k])).transpose();
  }
  return out;
}

Eigen::VectorXd subsector_series(const NormalizedReturns& nr, const SubsectorPartition& part,
                                 Side side, Weighting weighting) {
  const auto& members = part.members(side);
  if (members.empty()) {
    throw ArgumentError("the " + std::string(side == Side::positive ? "positive" : "negative") +
                        " subsector of mode " + std::to_string(part.mode_index) +
                        " is empty; lower u_c or skip the mode");
  }
  const auto& w = part.weights(side);
  if (weighting == Weighting::signed_components) return combination_series(nr, members, w);
  const auto abs_w = magnitudes(w);
  return combination_series(nr, members, abs_w);
}

PairCorrelation cross_corr_pm(const Eigen::VectorXd& plus, const Eigen::VectorXd& minus) {
  if (plus.size() != minus.size()) throw ArgumentError("series lengths differ");
  if (plus.size() < 2) throw ArgumentError("series need at least two samples");
  PairCorrelation out;
  out.raw = plus.dot(minus) / static_cast<double>(plus.size());
  out.pearson = pearson(plus, minus);
  return out;
}

BaselineStats random_baseline(const NormalizedReturns& nr, std::span<const double> plus_weights,
                              std::span<const double> minus_weights, std::size_t trials,
                              std::uint64_t seed) {
  const std::size_t N = nr.n_assets();
  const std::size_t n_plus = plus_weights.size();
  const std::size_t n_minus = minus_weights.size();
  if (n_plus == 0 || n_minus == 0) throw ArgumentError("baseline subsets must be non-empty");
  if (n_plus + n_minus > N) {
    throw ArgumentError("baseline subsets of " + std::to_string(n_plus) + " + " +
                        std::to_string(n_minus) + " assets exceed N = " + std::to_string(N));
  }
  if (trials == 0) throw ArgumentError("baseline needs at least one trial");

  const Eigen::MatrixXd returns_t = nr.returns.transpose();
  const auto abs_plus = magnitudes(plus_weights);
  const auto abs_minus = magnitudes(minus_weights);

  BaselineStats stats;
  stats.trials = trials;
  stats.seed = seed;
  stats.samples.reserve(trials);
  std::vector<std::size_t> pool(N);
  std::vector<double> wp(abs_plus), wm(abs_minus);
  for (std::size_t k = 0; k < trials; ++k) {
    auto rng = substream(seed, k);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t s = 0; s < n_plus + n_minus; ++s) {
      std::uniform_int_distribution<std::size_t> pick(s, N - 1);
      std::swap(pool[s], pool[pick(rng)]);
    }
    std::copy(abs_plus.begin(), abs_plus.end(), wp.begin());
    std::copy(abs_minus.begin(), abs_minus.end(), wm.begin());
    std::shuffle(wp.begin(), wp.end(), rng);
    std::shuffle(wm.begin(), wm.end(), rng);
    const std::span<const std::size_t> a(pool.data(), n_plus);
    const std::span<const std::size_t> b(pool.data() + n_plus, n_minus);
    const auto r = pearson(combine_columns(returns_t, a, wp), combine_columns(returns_t, b, wm));
    if (r) {
      stats.samples.push_back(*r);
    } else {
      ++stats.undefined_trials;
    }
  }
  const auto n = stats.samples.size();
  if (n == 0) throw NumericalError("every baseline trial produced a constant series");
  stats.mean = std::accumulate(stats.samples.begin(), stats.samples.end(), 0.0) /
               static_cast<double>(n);
  double ss = 0.0;
  for (double s : stats.samples) ss += (s - stats.mean) * (s - stats.mean);
  stats.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return stats;
}

ModeScan mode_scan(const NormalizedReturns& nr, const EigenSpectrum& spec,
                   const ScanOptions& options) {
  if (options.trials < 100) throw ArgumentError("the random baseline needs at least 100 trials");
  if (nr.n_assets() != spec.n_assets()) {
    throw ArgumentError("returns and spectrum describe different asset counts");
  }
  ModeScan scan;
  scan.options = options;
  const std::size_t first = options.include_market_mode ? 0 : 1;
  for (std::size_t alpha = first; alpha < spec.n_modes(); ++alpha) {
    const auto part = select_components(spec, alpha, options.u_c);
    if (part.positive.empty() || part.negative.empty()) {
      scan.skipped_modes.push_back(alpha);
      continue;
    }
    ScanRow row;
    row.alpha = alpha;
    row.eigenvalue = spec.eigenvalues(static_cast<Eigen::Index>(alpha));
    row.n_plus = part.positive.size();
    row.n_minus = part.negative.size();
    row.corr = cross_corr_pm(subsector_series(nr, part, Side::positive, Weighting::magnitudes),
                             subsector_series(nr, part, Side::negative, Weighting::magnitudes));
    row.baseline = random_baseline(nr, part.positive_weights, part.negative_weights,
                                   options.trials, substream_seed(options.seed, alpha));
    row.baseline.samples.clear();
    row.baseline.samples.shrink_to_fit();
    if (row.corr.pearson && row.baseline.stddev > 0.0) {
      row.baseline_z = (*row.corr.pearson - row.baseline.mean) / row.baseline.stddev;
    }
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("rank correlation needs equal-length inputs");
  if (x.size() < 2) throw ArgumentError("rank correlation needs at least two points");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const Eigen::Map<const Eigen::VectorXd> a(rx.data(), static_cast<Eigen::Index>(rx.size()));
  const Eigen::Map<const Eigen::VectorXd> b(ry.data(), static_cast<Eigen::Index>(ry.size()));
  const Eigen::VectorXd ca = a.array() - a.mean();
  const Eigen::VectorXd cb = b.array() - b.mean();
  const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  return denom > 0.0 ? ca.dot(cb) / denom : 0.0;
}

double scan_trend(const ModeScan& scan) {
  std::vector<double> x, y;
  for (const auto& row : scan.rows) {
    if (!row.corr.pearson) continue;
    x.push_back(static_cast<double>(row.alpha));
    y.push_back(*row.corr.pearson);
  }
  return spearman(x, y);
}

BlockAverages block_averages(const CorrelationMatrix& c, const SubsectorPartition& part) {
  for (const auto* side : {&part.positive, &part.negative}) {
    for (auto i : *side) {
      if (i >= c.n_assets()) throw IndexError(i, c.n_assets());
    }
  }
  BlockAverages out;
  out.within_positive = mean_pairs(c, part.positive);
  out.within_negative = mean_pairs(c, part.negative);
  if (!part.positive.empty() && !part.negative.empty()) {
    double sum = 0.0;
    for (auto i : part.positive) {
      for (auto j : part.negative) {
        sum += c.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    out.between = sum / static_cast<double>(part.positive.size() * part.negative.size());
  }
  return out;
}

AnticorrReport anticorr_report(const NormalizedReturns& nr, const CorrelationMatrix& c,
                               const EigenSpectrum& spec, const ScanOptions& options,
                               bool with_full_vector_scan) {
  AnticorrReport report;
  report.scan = mode_scan(nr, spec, options);
  if (with_full_vector_scan) {
    ScanOptions full = options;
    full.u_c = 0.0;
    report.full_vector_scan = mode_scan(nr, spec, full);
  }
  for (const auto& row : report.scan.rows) {
    const auto part = select_components(spec, row.alpha, options.u_c);
    report.blocks.push_back(ModeBlocks{row.alpha, row.eigenvalue, block_averages(c, part)});
  }
  return report;
}

}  // namespace subsector
