#include "dsmeta/numerics.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dsmeta/errors.hpp"

namespace dsmeta {

namespace bm = boost::math;

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

void require_probability(double p, const char* what) {
  require(p > 0.0 && p < 1.0 && std::isfinite(p), what);
}

}  // namespace

double log_gamma(double x) {
  require(x > 0.0 && std::isfinite(x), "log_gamma: x must be positive and finite");
  return bm::lgamma(x);
}

double hedges_J(double m) {
  require(m > 1.0 && std::isfinite(m), "hedges_J: degrees of freedom must exceed 1");
  // Γ((m−1)/2) / Γ(m/2) computed as one ratio to avoid lgamma cancellation.
  const double ratio = bm::tgamma_delta_ratio((m - 1.0) / 2.0, 0.5);
  return 1.0 / (ratio * std::sqrt(m / 2.0));
}

double normal_cdf(double x) {
  return bm::cdf(bm::normal_distribution<double>(), x);
}

double normal_quantile(double p) {
  require_probability(p, "normal_quantile: p must lie in (0,1)");
  return bm::quantile(bm::normal_distribution<double>(), p);
}

double student_t_cdf(double x, double df) {
  require(df > 0.0, "student_t_cdf: df must be positive");
  return bm::cdf(bm::students_t_distribution<double>(df), x);
}

double student_t_quantile(double p, double df) {
  require_probability(p, "student_t_quantile: p must lie in (0,1)");
  require(df >= 1.0, "student_t_quantile: df must be at least 1");
  return bm::quantile(bm::students_t_distribution<double>(df), p);
}

double noncentral_t_cdf(double x, double df, double ncp) {
  require(df > 0.0 && std::isfinite(df), "noncentral_t_cdf: df must be positive");
  require(std::isfinite(ncp), "noncentral_t_cdf: ncp must be finite");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (ncp == 0.0) return student_t_cdf(x, df);
  return bm::cdf(bm::non_central_t_distribution<double>(df, ncp), x);
}

double chi_square_cdf(double x, double df) {
  require(df > 0.0, "chi_square_cdf: df must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return bm::gamma_p(df / 2.0, x / 2.0);
}

double chi_square_sf(double x, double df) {
  require(df > 0.0, "chi_square_sf: df must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return bm::gamma_q(df / 2.0, x / 2.0);
}

double chi_square_quantile(double p, double df) {
  require_probability(p, "chi_square_quantile: p must lie in (0,1)");
  require(df > 0.0, "chi_square_quantile: df must be positive");
  return bm::quantile(bm::chi_squared_distribution<double>(df), p);
}

}  // namespace dsmeta
