#include "subsector/timeseries.hpp"

#include "subsector/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace subsector {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

int parse_fixed_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ArgumentError("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::chrono::weekday parse_weekday(std::string_view text) {
  static const std::map<std::string, unsigned> names = {
      {"sun", 0}, {"mon", 1}, {"tue", 2}, {"wed", 3}, {"thu", 4}, {"fri", 5}, {"sat", 6},
      {"sunday", 0}, {"monday", 1}, {"tuesday", 2}, {"wednesday", 3},
      {"thursday", 4}, {"friday", 5}, {"saturday", 6}};
  auto it = names.find(lower(text));
  if (it == names.end()) throw ConfigError("unknown weekday '" + std::string(text) + "'");
  return std::chrono::weekday{it->second};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Population moments over one row, two-pass for accuracy.
std::pair<double, double> row_moments(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double n = static_cast<double>(row.size());
  const double mu = row.sum() / n;
  const double var = (row.array() - mu).square().sum() / n;
  return {mu, std::sqrt(var)};
}

bool degenerate_row(const Eigen::Ref<const Eigen::RowVectorXd>& row, double sigma) {
  const double scale = row.cwiseAbs().maxCoeff();
  return sigma <= 16.0 * std::numeric_limits<double>::epsilon() * scale || sigma == 0.0;
}

}  // namespace

Date parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ArgumentError("not an ISO-8601 date: '" + std::string(text) + "'");
  }
  const int y = parse_fixed_int(text.substr(0, 4));
  const int m = parse_fixed_int(text.substr(5, 2));
  const int d = parse_fixed_int(text.substr(8, 2));
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ArgumentError("invalid calendar date: '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

bool PricePanel::is_missing(std::size_t asset, std::size_t date) const {
  return std::isnan(prices(static_cast<Eigen::Index>(asset), static_cast<Eigen::Index>(date)));
}

std::size_t PricePanel::missing_count() const {
  return static_cast<std::size_t>(prices.array().isNaN().count());
}

std::size_t PricePanel::asset_index(const std::string& name) const {
  auto it = std::find(assets.begin(), assets.end(), name);
  if (it == assets.end()) throw ConfigError("unknown asset '" + name + "'");
  return static_cast<std::size_t>(it - assets.begin());
}

void validate(const PricePanel& panel) {
  if (static_cast<std::size_t>(panel.prices.rows()) != panel.n_assets() ||
      static_cast<std::size_t>(panel.prices.cols()) != panel.n_dates()) {
    throw ValidationError("price grid shape does not match the date and asset axes");
  }
  for (std::size_t d = 1; d < panel.dates.size(); ++d) {
    if (panel.dates[d] <= panel.dates[d - 1]) {
      throw ValidationError("dates are not strictly increasing at " +
                            format_date(panel.dates[d]));
    }
  }
  std::set<std::string> seen;
  for (const auto& a : panel.assets) {
    if (!seen.insert(a).second) throw ValidationError("duplicate asset '" + a + "'");
  }
  for (Eigen::Index i = 0; i < panel.prices.rows(); ++i) {
    for (Eigen::Index d = 0; d < panel.prices.cols(); ++d) {
      const double p = panel.prices(i, d);
      if (std::isnan(p)) continue;
      if (!(p > 0.0) || !std::isfinite(p)) {
        throw ValidationError("non-positive price for asset '" +
                              panel.assets[static_cast<std::size_t>(i)] + "' on " +
                              format_date(panel.dates[static_cast<std::size_t>(d)]));
      }
    }
  }
}

PricePanel merge_panels(const std::vector<PricePanel>& panels) {
  if (panels.empty()) throw ArgumentError("no panels to merge");
  if (panels.size() == 1) return panels.front();

  std::set<Date> all_dates;
  PricePanel out;
  for (const auto& p : panels) {
    all_dates.insert(p.dates.begin(), p.dates.end());
    for (const auto& a : p.assets) {
      if (std::find(out.assets.begin(), out.assets.end(), a) != out.assets.end()) {
        throw ValidationError("asset '" + a + "' appears in more than one input");
      }
      out.assets.push_back(a);
    }
    for (const auto& [k, v] : p.metadata) out.metadata.emplace(k, v);
  }
  out.dates.assign(all_dates.begin(), all_dates.end());
  out.prices = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(out.assets.size()),
                                         static_cast<Eigen::Index>(out.dates.size()), kMissing);
  Eigen::Index row = 0;
  for (const auto& p : panels) {
    for (std::size_t d = 0; d < p.dates.size(); ++d) {
      const auto col = std::lower_bound(out.dates.begin(), out.dates.end(), p.dates[d]) -
                       out.dates.begin();
      out.prices.block(row, col, p.prices.rows(), 1) =
          p.prices.col(static_cast<Eigen::Index>(d));
    }
    row += p.prices.rows();
  }
  return out;
}

ShiftRule parse_shift_rule(std::string_view text) {
  const auto colon = text.rfind(':');
  const auto arrow = text.find("->", colon == std::string_view::npos ? 0 : colon);
  if (colon == std::string_view::npos || arrow == std::string_view::npos) {
    throw ConfigError("shift rule must look like 'A,B:sun->fri', got '" +
                      std::string(text) + "'");
  }
  ShiftRule rule;
  std::string_view list = text.substr(0, colon);
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto name = trim(list.substr(0, comma));
    if (!name.empty()) rule.assets.emplace_back(name);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  rule.from = parse_weekday(trim(text.substr(colon + 1, arrow - colon - 1)));
  rule.to = parse_weekday(trim(text.substr(arrow + 2)));
  if (rule.assets.empty()) throw ConfigError("shift rule lists no assets");
  return rule;
}

PricePanel align_calendar(const PricePanel& panel, const std::vector<ShiftRule>& rules) {
  if (rules.empty()) return panel;

  // asset -> (source weekday -> days to move back)
  std::vector<std::map<unsigned, int>> shifts(panel.n_assets());
  for (const auto& rule : rules) {
    if (rule.from == rule.to) {
      throw ConfigError("shift rule maps a weekday onto itself");
    }
    const int back = static_cast<int>((rule.from - rule.to).count());
    for (const auto& name : rule.assets) {
      const auto i = panel.asset_index(name);
      if (!shifts[i].emplace(rule.from.c_encoding(), back).second) {
        throw ConfigError("asset '" + name + "' has two rules for the same weekday");
      }
    }
  }

  // Per asset: date -> (price, shifted?)
  struct Obs {
    double price;
    bool shifted;
    Date origin;
  };
  std::vector<std::map<Date, Obs>> cells(panel.n_assets());
  std::set<Date> axis;
  for (std::size_t d = 0; d < panel.n_dates(); ++d) {
    bool any = false;
    for (std::size_t i = 0; i < panel.n_assets(); ++i) any = any || !panel.is_missing(i, d);
    // Dates with no observation at all are kept so that an empty rule set is
    // an identity; populated dates survive only if something lands on them.
    if (!any) axis.insert(panel.dates[d]);
  }
  for (std::size_t i = 0; i < panel.n_assets(); ++i) {
    for (std::size_t d = 0; d < panel.n_dates(); ++d) {
      if (panel.is_missing(i, d)) continue;
      const Date date = panel.dates[d];
      const double p = panel.prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
      const auto rule = shifts[i].find(std::chrono::weekday{date}.c_encoding());
      if (rule == shifts[i].end()) {
        cells[i][date] = Obs{p, false, date};  // target-day values always win
        continue;
      }
      const Date target = date - std::chrono::days{rule->second};
      auto [it, inserted] = cells[i].emplace(target, Obs{p, true, date});
      // Two shifted observations on one target: keep the more recent origin.
      if (!inserted && it->second.shifted && it->second.origin < date) {
        it->second = Obs{p, true, date};
      }
    }
    for (const auto& [date, obs] : cells[i]) axis.insert(date);
  }

  PricePanel out;
  out.assets = panel.assets;
  out.metadata = panel.metadata;
  out.dates.assign(axis.begin(), axis.end());
  out.prices = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(out.assets.size()),
                                         static_cast<Eigen::Index>(out.dates.size()), kMissing);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const auto& [date, obs] : cells[i]) {
      const auto col = std::lower_bound(out.dates.begin(), out.dates.end(), date) -
                       out.dates.begin();
      out.prices(static_cast<Eigen::Index>(i), col) = obs.price;
    }
  }
  return out;
}

PricePanel forward_fill(const PricePanel& panel) {
  PricePanel out = panel;
  out.first_valid.assign(panel.n_assets(), 0);
  for (Eigen::Index i = 0; i < out.prices.rows(); ++i) {
    std::optional<double> last;
    for (Eigen::Index d = 0; d < out.prices.cols(); ++d) {
      double& cell = out.prices(i, d);
      if (!std::isnan(cell)) {
        if (!last) out.first_valid[static_cast<std::size_t>(i)] = static_cast<std::size_t>(d);
        last = cell;
      } else if (last) {
        cell = *last;
      }
    }
    if (!last) {
      throw ValidationError("asset '" + panel.assets[static_cast<std::size_t>(i)] +
                            "' has no observed prices");
    }
  }
  return out;
}

RangeSelection apply_common_range(const PricePanel& filled, CommonRangePolicy policy) {
  std::vector<std::size_t> first = filled.first_valid;
  if (first.size() != filled.n_assets()) first = forward_fill(filled).first_valid;

  RangeSelection sel;
  if (policy == CommonRangePolicy::trim_dates) {
    const std::size_t start = first.empty() ? 0 : *std::max_element(first.begin(), first.end());
    const auto keep = static_cast<Eigen::Index>(filled.n_dates() - start);
    sel.panel.assets = filled.assets;
    sel.panel.metadata = filled.metadata;
    sel.panel.dates.assign(filled.dates.begin() + static_cast<std::ptrdiff_t>(start),
                           filled.dates.end());
    sel.panel.prices = filled.prices.rightCols(keep);
    sel.panel.first_valid.assign(filled.n_assets(), 0);
  } else {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < filled.n_assets(); ++i) {
      if (first[i] == 0) {
        rows.push_back(static_cast<Eigen::Index>(i));
        sel.panel.assets.push_back(filled.assets[i]);
      } else {
        sel.dropped_assets.push_back(filled.assets[i]);
      }
    }
    sel.panel.dates = filled.dates;
    sel.panel.metadata = filled.metadata;
    sel.panel.prices.resize(static_cast<Eigen::Index>(rows.size()), filled.prices.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      sel.panel.prices.row(static_cast<Eigen::Index>(r)) = filled.prices.row(rows[r]);
    }
    sel.panel.first_valid.assign(rows.size(), 0);
  }
  if (sel.panel.n_dates() < 2) {
    throw InsufficientDataError("fewer than two dates remain in the common range");
  }
  return sel;
}

ReturnMatrix log_returns(const PricePanel& panel, std::size_t delta_t) {
  if (delta_t == 0) throw ArgumentError("delta_t must be a positive step count");
  const std::size_t D = panel.n_dates();
  if (delta_t >= D) {
    throw InsufficientDataError("delta_t = " + std::to_string(delta_t) +
                                " needs more than " + std::to_string(D) + " dates");
  }
  if (panel.missing_count() != 0) {
    throw ValidationError("panel still has missing cells; forward-fill and trim first");
  }
  const auto T = static_cast<Eigen::Index>(D - delta_t);
  const auto dt = static_cast<Eigen::Index>(delta_t);
  ReturnMatrix rm;
  rm.assets = panel.assets;
  rm.delta_t = delta_t;
  // Ratio first: constant prices then give exactly zero.
  rm.returns = (panel.prices.middleCols(dt, T).array() / panel.prices.leftCols(T).array()).log().matrix();
  if (!rm.returns.allFinite()) throw ValidationError("non-finite log return");
  return rm;
}

NormalizedReturns normalize_returns(const ReturnMatrix& rm) {
  if (rm.n_observations() < 2) {
    throw InsufficientDataError("normalization needs at least two return observations");
  }
  NormalizedReturns nr;
  nr.assets = rm.assets;
  nr.returns.resize(rm.returns.rows(), rm.returns.cols());
  nr.mean.resize(rm.returns.rows());
  nr.stddev.resize(rm.returns.rows());
  for (Eigen::Index i = 0; i < rm.returns.rows(); ++i) {
    const auto [mu, sigma] = row_moments(rm.returns.row(i));
    if (degenerate_row(rm.returns.row(i), sigma)) {
      throw ZeroVarianceError(static_cast<std::size_t>(i), rm.assets[static_cast<std::size_t>(i)]);
    }
    nr.mean(i) = mu;
    nr.stddev(i) = sigma;
    nr.returns.row(i) = (rm.returns.row(i).array() - mu) / sigma;
  }
  return nr;
}

VarianceFilter drop_zero_variance(const ReturnMatrix& rm) {
  VarianceFilter out;
  out.returns.delta_t = rm.delta_t;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < rm.returns.rows(); ++i) {
    const auto [mu, sigma] = row_moments(rm.returns.row(i));
    (void)mu;
    if (degenerate_row(rm.returns.row(i), sigma)) {
      out.dropped_assets.push_back(rm.assets[static_cast<std::size_t>(i)]);
    } else {
      keep.push_back(i);
      out.returns.assets.push_back(rm.assets[static_cast<std::size_t>(i)]);
    }
  }
  out.returns.returns.resize(static_cast<Eigen::Index>(keep.size()), rm.returns.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.returns.returns.row(static_cast<Eigen::Index>(r)) = rm.returns.row(keep[r]);
  }
  return out;
}

}  // namespace subsector
