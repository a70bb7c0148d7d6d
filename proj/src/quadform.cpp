#include "dsmeta/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dsmeta/errors.hpp"

namespace dsmeta {

Eigen::Index QuadFormSpec::positive_count() const {
  return (lambdas.array() > 0.0).count();
}

QuadFormSpec eigen_weights(const VectorRef& weights, const VectorRef& variances) {
  const Eigen::Index k = weights.size();
  if (k != variances.size()) throw DomainError("eigen_weights: dimension mismatch");
  if (k < 2) throw DomainError("eigen_weights: need at least two studies");
  if (!weights.allFinite() || !variances.allFinite() || (weights.array() <= 0).any() ||
      (variances.array() <= 0).any())
    throw DomainError("eigen_weights: weights and variances must be positive and finite");

  const double total = weights.sum();
  const Vector sd = variances.cwiseSqrt();
  const Vector scaled = weights.cwiseProduct(sd);  // D^{1/2} w
  Eigen::MatrixXd m = -scaled * scaled.transpose() / total;
  m.diagonal() += weights.cwiseProduct(variances);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigen_weights: eigen solve failed");

  QuadFormSpec spec{solver.eigenvalues().reverse()};
  const double top = spec.lambdas.maxCoeff();
  for (double& l : spec.lambdas) {
    if (l < 1e-10 * top) l = 0.0;
  }
  return spec;
}

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> positive_lambdas(const QuadFormSpec& spec) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(spec.lambdas.size()));
  for (double l : spec.lambdas) {
    if (!std::isfinite(l) || l < 0.0) throw DomainError("qf: lambdas must be nonnegative");
    if (l > 0.0) out.push_back(l);
  }
  return out;
}

// Ruben's expansion with β = min λ: every (1 − β/λᵢ) ∈ [0,1), so mixture
// weights are nonnegative and sum to one, and the unused mass bounds the
// truncation error. Returns false if the series did not converge.
bool ruben_series(const std::vector<double>& lambdas, double x, const QfOptions& opt,
                  QfResult& out) {
  const double beta = *std::min_element(lambdas.begin(), lambdas.end());
  const auto m = static_cast<double>(lambdas.size());

  double log_a0 = 0.0;
  std::vector<double> ratios;
  ratios.reserve(lambdas.size());
  for (double l : lambdas) {
    log_a0 += 0.5 * std::log(beta / l);
    const double r = 1.0 - beta / l;
    if (r > 0.0) ratios.push_back(r);
  }
  const double a0 = std::exp(log_a0);
  if (a0 < 1e-280) return false;

  const double y = x / beta;
  const double half_y = 0.5 * y;
  std::vector<double> powers(ratios.size(), 1.0);
  std::vector<double> g{0.0};
  std::vector<double> a{a0};
  g.reserve(256);
  a.reserve(256);

  // Chi-square CDF/survival at df = m + 2k by the density recurrence.
  double nu = m;
  double cdf_nu = boost::math::gamma_p(0.5 * nu, half_y);
  double sf_nu = boost::math::gamma_q(0.5 * nu, half_y);
  const double log_half_y = std::log(half_y);
  double log_density = 0.5 * nu * log_half_y - half_y - boost::math::lgamma(0.5 * nu + 1.0);

  double cdf = a0 * cdf_nu;
  double sf = a0 * sf_nu;
  double used = a0;

  for (int k = 1;; ++k) {
    double remaining = std::max(0.0, 1.0 - used);
    // cdf terms shrink with k (F decreasing in df); the survival remainder is
    // at most the unused mixture mass.
    if (remaining <= opt.tolerance) {
      out = {std::clamp(cdf, 0.0, 1.0), std::clamp(sf, 0.0, 1.0), remaining, k, QfMethod::Series};
      return true;
    }
    if (k > opt.max_terms) return false;

    double gk = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      powers[i] *= ratios[i];
      gk += powers[i];
    }
    g.push_back(0.5 * gk);
    double ak = 0.0;
    for (int r = 0; r < k; ++r) ak += g[static_cast<std::size_t>(k - r)] * a[static_cast<std::size_t>(r)];
    ak /= k;
    a.push_back(ak);

    const double density = std::exp(log_density);
    cdf_nu = std::max(0.0, cdf_nu - density);
    sf_nu = std::min(1.0, sf_nu + density);
    log_density += log_half_y - std::log(0.5 * nu + 1.0);
    nu += 2.0;

    cdf += ak * cdf_nu;
    sf += ak * sf_nu;
    used += ak;
  }
}

// Imhof: P(Q > x) = 1/2 + (1/π) ∫₀^∞ sin θ(u) / (u ρ(u)) du with
// θ(u) = ½ Σ atan(λᵢu) − ½xu. Writing θ = φ(u) − ½xu splits the integral
// into a cosine and a sine transform with slowly varying amplitudes.
QfResult imhof(const std::vector<double>& lambdas, double x) {
  double lambda_max = 0.0, half_trace = 0.0;
  for (double l : lambdas) {
    lambda_max = std::max(lambda_max, l);
    half_trace += 0.5 * l;
  }
  auto phi = [&](double u) {
    double s = 0.0;
    for (double l : lambdas) s += 0.5 * std::atan(l * u);
    return s;
  };
  auto rho = [&](double u) {
    double log_rho = 0.0;
    for (double l : lambdas) log_rho += 0.25 * std::log1p(l * l * u * u);
    return std::exp(log_rho);
  };
  // The quadrature probes u = 0 and denormals; use the small-u limits there.
  const double tiny = 1e-7 / lambda_max;
  auto cos_part = [&](double u) {
    if (u < tiny) return half_trace;
    return std::sin(phi(u)) / (u * rho(u));
  };
  // cos(phi)/(u rho) minus its 1/u pole; the pole integrates to pi/2 against sin.
  auto sin_part = [&](double u) {
    if (u < tiny) return 0.0;
    return (std::cos(phi(u)) / rho(u) - 1.0) / u;
  };

  const double omega = 0.5 * x;
  boost::math::quadrature::ooura_fourier_cos<double> cos_transform(1e-12);
  boost::math::quadrature::ooura_fourier_sin<double> sin_transform(1e-12);
  const auto [c, c_err] = cos_transform.integrate(cos_part, omega);
  const auto [s, s_err] = sin_transform.integrate(sin_part, omega);
  const double sf = std::clamp((c - s) / kPi, 0.0, 1.0);
  const double err = (std::abs(c) * c_err + std::abs(s) * s_err) / kPi;
  return {1.0 - sf, sf, err, 0, QfMethod::Inversion};
}

}  // namespace

QfResult qf_evaluate(const QuadFormSpec& spec, double x, const QfOptions& options) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) throw DomainError("qf: x must not be NaN");
    return x > 0 ? QfResult{1.0, 0.0, 0.0, 0, QfMethod::Degenerate}
                 : QfResult{0.0, 1.0, 0.0, 0, QfMethod::Degenerate};
  }
  const auto lambdas = positive_lambdas(spec);
  if (lambdas.empty()) {
    // Point mass at zero.
    return x >= 0 ? QfResult{1.0, 0.0, 0.0, 0, QfMethod::Degenerate}
                  : QfResult{0.0, 1.0, 0.0, 0, QfMethod::Degenerate};
  }
  if (x <= 0.0) return {0.0, 1.0, 0.0, 0, QfMethod::Degenerate};

  QfResult result{};
  if (!options.force_inversion && ruben_series(lambdas, x, options, result)) return result;
  return imhof(lambdas, x);
}

double qf_cdf(const QuadFormSpec& spec, double x, const QfOptions& options) {
  return qf_evaluate(spec, x, options).cdf;
}

double qf_upper_tail(const QuadFormSpec& spec, double x, const QfOptions& options) {
  return qf_evaluate(spec, x, options).upper_tail;
}

}  // namespace dsmeta
