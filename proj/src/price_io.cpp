#include "subsector/timeseries.hpp"

#include "format.hpp"
#include "subsector/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>

namespace subsector {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string_view rest(line);
  while (true) {
    const auto pos = rest.find(delim);
    fields.emplace_back(trim(rest.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return fields;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool missing_token(std::string_view s) {
  const std::string l = lower(std::string(s));
  return l.empty() || l == "na" || l == "nan" || l == "null" || l == "-";
}

std::optional<double> parse_price(std::string_view text, std::size_t line) {
  if (missing_token(text)) return std::nullopt;
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, "cannot parse price '" + std::string(text) + "'");
  }
  return v;
}

Date parse_date_at(std::string_view text, std::size_t line) {
  try {
    return parse_date(text);
  } catch (const ArgumentError& e) {
    throw ParseError(line, e.what());
  }
}

char detect_delimiter(const std::string& header, char requested) {
  if (requested != '\0') return requested;
  return header.find('\t') != std::string::npos ? '\t' : ',';
}

bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  const std::string wanted = lower(name);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (lower(header[c]) == wanted) return c;
  }
  throw ParseError(1, "missing column '" + name + "' in header");
}

void check_price(double p, const std::string& asset, Date date) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw ValidationError("non-positive price for asset '" + asset + "' on " +
                          format_date(date));
  }
}

PricePanel assemble(std::vector<std::string> assets,
                    const std::map<Date, std::map<std::size_t, double>>& rows) {
  PricePanel panel;
  panel.assets = std::move(assets);
  for (const auto& [date, cells] : rows) panel.dates.push_back(date);
  panel.prices = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(panel.assets.size()),
                                           static_cast<Eigen::Index>(panel.dates.size()),
                                           std::numeric_limits<double>::quiet_NaN());
  Eigen::Index col = 0;
  for (const auto& [date, cells] : rows) {
    for (const auto& [asset, price] : cells) panel.prices(static_cast<Eigen::Index>(asset), col) = price;
    ++col;
  }
  if (panel.n_assets() < 2) throw InsufficientDataError("a panel needs at least two assets");
  if (panel.n_dates() < 3) throw InsufficientDataError("a panel needs at least three dates");
  return panel;
}

PricePanel load_long(std::istream& in, const PriceSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError(1, "empty input");
  const char delim = detect_delimiter(line, schema.delimiter);
  const auto header = split(line, delim);
  const auto c_date = find_column(header, schema.date_column);
  const auto c_asset = find_column(header, schema.asset_column);
  const auto c_price = find_column(header, schema.price_column);
  const auto needed = std::max({c_date, c_asset, c_price}) + 1;

  std::vector<std::string> assets;
  std::map<std::string, std::size_t> index;
  std::map<Date, std::map<std::size_t, double>> rows;
  while (next_line(in, line, line_no)) {
    const auto f = split(line, delim);
    if (f.size() < needed) {
      throw ParseError(line_no, "expected at least " + std::to_string(needed) + " fields, got " +
                                    std::to_string(f.size()));
    }
    const Date date = parse_date_at(f[c_date], line_no);
    const std::string& name = f[c_asset];
    if (name.empty()) throw ParseError(line_no, "empty asset identifier");
    auto [it, fresh] = index.emplace(name, assets.size());
    if (fresh) assets.push_back(name);
    auto& day = rows[date];
    const auto price = parse_price(f[c_price], line_no);
    if (!price) continue;
    check_price(*price, name, date);
    if (!day.emplace(it->second, *price).second) {
      throw ParseError(line_no, "duplicate observation for '" + name + "' on " + format_date(date));
    }
  }
  return assemble(std::move(assets), rows);
}

PricePanel load_wide(std::istream& in, const PriceSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError(1, "empty input");
  const char delim = detect_delimiter(line, schema.delimiter);
  const auto header = split(line, delim);
  std::size_t c_date = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (lower(header[c]) == lower(schema.date_column)) c_date = c;
  }
  std::vector<std::string> assets;
  std::vector<std::size_t> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == c_date) continue;
    if (header[c].empty()) throw ParseError(line_no, "empty asset name in header");
    if (std::find(assets.begin(), assets.end(), header[c]) != assets.end()) {
      throw ParseError(line_no, "duplicate asset column '" + header[c] + "'");
    }
    assets.push_back(header[c]);
    columns.push_back(c);
  }

  std::map<Date, std::map<std::size_t, double>> rows;
  while (next_line(in, line, line_no)) {
    const auto f = split(line, delim);
    if (f.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(f.size()));
    }
    const Date date = parse_date_at(f[c_date], line_no);
    auto [day, fresh] = rows.try_emplace(date);
    if (!fresh) throw ParseError(line_no, "duplicate date " + format_date(date));
    for (std::size_t a = 0; a < columns.size(); ++a) {
      const auto price = parse_price(f[columns[a]], line_no);
      if (!price) continue;
      check_price(*price, assets[a], date);
      day->second.emplace(a, *price);
    }
  }
  return assemble(std::move(assets), rows);
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

PricePanel load_prices(std::istream& in, const PriceSchema& schema) {
  return schema.format == PanelFormat::long_format ? load_long(in, schema)
                                                   : load_wide(in, schema);
}

PricePanel load_prices(const std::filesystem::path& path, const PriceSchema& schema) {
  auto in = open(path);
  return load_prices(in, schema);
}

CategoryMap load_metadata(std::istream& in) {
  CategoryMap out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  char delim = ',';
  while (next_line(in, line, line_no)) {
    if (first) delim = detect_delimiter(line, '\0');
    const auto f = split(line, delim);
    if (first && f.size() >= 2 && lower(f[0]) == "asset" && lower(f[1]) == "category") {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != 2 || f[0].empty()) {
      throw ParseError(line_no, "metadata rows must be 'asset,category'");
    }
    out[f[0]] = f[1];
  }
  return out;
}

CategoryMap load_metadata(const std::filesystem::path& path) {
  auto in = open(path);
  return load_metadata(in);
}

void write_wide(std::ostream& out, const PricePanel& panel, char delimiter) {
  out << "date";
  for (const auto& a : panel.assets) out << delimiter << a;
  out << '\n';
  for (std::size_t d = 0; d < panel.n_dates(); ++d) {
    out << format_date(panel.dates[d]);
    for (std::size_t i = 0; i < panel.n_assets(); ++i) {
      out << delimiter;
      if (!panel.is_missing(i, d)) {
        out << detail::Shortest{panel.prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d))};
      }
    }
    out << '\n';
  }
}

}  // namespace subsector
