#include "subsector/rmt.hpp"

#include "subsector/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace subsector {

namespace {

using boost::math::constants::pi;

void require_q(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) {
    throw DomainError("aspect ratio Q = " + std::to_string(q) + " must be finite and >= 1");
  }
}

}  // namespace

WishartLaw mp_bounds(double q) {
  require_q(q);
  const double s = 1.0 / std::sqrt(q);
  return WishartLaw{q, (1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)};
}

double WishartLaw::density(double lambda) const {
  if (lambda <= 0.0 || lambda <= lambda_min || lambda >= lambda_max) return 0.0;
  return q / (2.0 * pi<double>()) *
         std::sqrt((lambda_max - lambda) * (lambda - lambda_min)) / lambda;
}

// With lambda = a + (b - a)(1 - cos theta)/2 the square-root edges cancel
// against the Jacobian, leaving a smooth integrand on [0, theta].
double WishartLaw::cdf(double lambda) const {
  if (lambda <= lambda_min) return 0.0;
  if (lambda >= lambda_max) return 1.0;
  const double a = lambda_min;
  const double half = 0.5 * (lambda_max - lambda_min);
  const double theta = std::acos(std::clamp(1.0 - (lambda - a) / half, -1.0, 1.0));
  auto integrand = [&](double t) {
    const double l = a + half * (1.0 - std::cos(t));
    const double s = std::sin(t);
    if (l <= 0.0) return q / pi<double>() * half;  // t -> 0 limit when lambda_min == 0
    return q / (2.0 * pi<double>()) * half * half * s * s / l;
  };
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, theta, 10, 1e-14);
  return std::clamp(value, 0.0, 1.0);
}

double mp_density(double lambda, double q) { return mp_bounds(q).density(lambda); }

double mp_cdf(double lambda, double q) { return mp_bounds(q).cdf(lambda); }

double aspect_ratio(const EigenSpectrum& spec) {
  if (spec.n_assets() == 0) throw DomainError("empty spectrum");
  const double q = static_cast<double>(spec.n_observations) / static_cast<double>(spec.n_assets());
  require_q(q);
  return q;
}

bool SignificantSet::contains(std::size_t alpha) const {
  return std::find(indices.begin(), indices.end(), alpha) != indices.end();
}

SignificantSet significant_eigenvalues(const EigenSpectrum& spec, double margin) {
  if (!(margin >= 1.0)) throw DomainError("detection margin must be >= 1");
  SignificantSet out;
  out.law = mp_bounds(aspect_ratio(spec));
  out.margin = margin;
  out.threshold = margin * out.law.lambda_max;
  for (std::size_t a = 0; a < spec.n_modes(); ++a) {
    const double l = spec.eigenvalues(static_cast<Eigen::Index>(a));
    if (l > out.threshold) {
      out.indices.push_back(a);
      out.eigenvalues.push_back(l);
      out.ratios.push_back(l / out.law.lambda_max);
    }
  }
  return out;
}

double fraction_outside(std::span<const double> eigenvalues, const WishartLaw& law) {
  if (eigenvalues.empty()) return 0.0;
  const auto outside = std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double l) {
    return l < law.lambda_min || l > law.lambda_max;
  });
  return static_cast<double>(outside) / static_cast<double>(eigenvalues.size());
}

double ks_distance(std::span<const double> eigenvalues, const WishartLaw& law) {
  std::vector<double> bulk;
  for (double l : eigenvalues) {
    if (l >= law.lambda_min && l <= law.lambda_max) bulk.push_back(l);
  }
  if (bulk.empty()) return 1.0;
  std::sort(bulk.begin(), bulk.end());
  const double n = static_cast<double>(bulk.size());
  double d = 0.0;
  for (std::size_t k = 0; k < bulk.size(); ++k) {
    const double f = law.cdf(bulk[k]);
    d = std::max({d, std::abs(static_cast<double>(k + 1) / n - f),
                  std::abs(f - static_cast<double>(k) / n)});
  }
  return d;
}

}  // namespace subsector
