#include "subsector/sectors.hpp"

#include "subsector/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace subsector {

const char* to_string(Side side) { return side == Side::positive ? "+" : "-"; }

const std::vector<std::size_t>& SubsectorPartition::members(Side side) const {
  return side == Side::positive ? positive : negative;
}

const std::vector<double>& SubsectorPartition::weights(Side side) const {
  return side == Side::positive ? positive_weights : negative_weights;
}

double noise_floor(std::size_t n_assets) {
  return 1.0 / std::sqrt(static_cast<double>(n_assets));
}

SubsectorPartition split_components(std::span<const double> u, double u_c,
                                    std::size_t mode_index) {
  if (!(u_c >= 0.0) || !std::isfinite(u_c)) {
    throw ArgumentError("threshold u_c must be finite and non-negative");
  }
  SubsectorPartition part;
  part.mode_index = mode_index;
  part.threshold = u_c;
  part.below_noise_floor = !u.empty() && u_c <= noise_floor(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] >= u_c) {
      part.positive.push_back(i);
      part.positive_weights.push_back(u[i]);
    } else if (u[i] <= -u_c) {
      part.negative.push_back(i);
      part.negative_weights.push_back(u[i]);
    }
  }
  return part;
}

SubsectorPartition select_components(const EigenSpectrum& spec, std::size_t alpha, double u_c) {
  const Eigen::VectorXd u = spec.mode(alpha);
  return split_components(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                          u_c, alpha);
}

LabelReport label_subsector(const SubsectorPartition& part, Side side,
                            std::span<const std::string> assets, const CategoryMap& metadata) {
  LabelReport rep;
  rep.mode_index = part.mode_index;
  rep.threshold = part.threshold;
  rep.side = side;
  const auto& members = part.members(side);
  rep.total = members.size();

  std::map<std::string, std::size_t> counts;
  for (auto i : members) {
    if (i >= assets.size()) throw IndexError(i, assets.size());
    rep.members.push_back(assets[i]);
    auto it = metadata.find(assets[i]);
    if (it != metadata.end()) ++counts[it->second];
  }
  // std::map iterates categories in order, so the first maximum is the
  // lexicographically smallest one.
  std::string modal;
  std::size_t best = 0;
  for (const auto& [category, n] : counts) {
    if (n > best) {
      best = n;
      modal = category;
    }
  }
  rep.matched = best;
  rep.dominant_category = (rep.total == 0 || 2 * best < rep.total) ? kNullCategory : modal;
  return rep;
}

bool single_signed(const Eigen::Ref<const Eigen::VectorXd>& u) {
  return (u.array() >= 0.0).all() || (u.array() <= 0.0).all();
}

SectorTable sector_table(const EigenSpectrum& spec, const SignificantSet& significant,
                         std::span<const double> thresholds, const CategoryMap* metadata) {
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (!(thresholds[k] > 0.0)) throw ArgumentError("thresholds must be positive");
    if (k > 0 && !(thresholds[k] > thresholds[k - 1])) {
      throw ArgumentError("thresholds must be strictly ascending");
    }
  }
  SectorTable table;
  table.thresholds.assign(thresholds.begin(), thresholds.end());

  std::vector<std::size_t> modes = significant.indices;
  std::sort(modes.begin(), modes.end());
  for (auto alpha : modes) {
    if (alpha == 0 && single_signed(spec.mode(0))) {
      table.excluded_modes.push_back(alpha);
      continue;
    }
    const double lambda = spec.eigenvalues(static_cast<Eigen::Index>(alpha));
    for (double u_c : thresholds) {
      const auto part = select_components(spec, alpha, u_c);
      for (Side side : {Side::positive, Side::negative}) {
        SectorRow row;
        row.eigenvalue = lambda;
        if (metadata) {
          row.report = label_subsector(part, side, spec.assets, *metadata);
        } else {
          row.report = label_subsector(part, side, spec.assets, CategoryMap{});
          row.report.dominant_category = kUnlabeled;
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

}  // namespace subsector
