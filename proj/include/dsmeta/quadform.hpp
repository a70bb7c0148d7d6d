#pragma once

#include <Eigen/Core>

namespace dsmeta {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Weights λᵢ of the representation Q = Σ λᵢ χ²₁,ᵢ (independent central
/// chi-squares). Sorted in decreasing order; clamped zeros are kept as 0.
struct QuadFormSpec {
  Vector lambdas;

  Eigen::Index positive_count() const;
};

/// Eigenvalues of D^{1/2} A D^{1/2} with D = diag(variances) and
/// A = diag(w) − w wᵀ / Σw, the matrix of the weighted centering form
/// Q = Σ wₖ (yₖ − ȳ_w)². Eigenvalues below 1e-10·max are set to zero.
QuadFormSpec eigen_weights(const VectorRef& weights, const VectorRef& variances);

struct QfOptions {
  double tolerance = 1e-10;  // bound on the series truncation error
  int max_terms = 10000;     // series terms before switching to inversion
  bool force_inversion = false;
};

enum class QfMethod { Series, Inversion, Degenerate };

struct QfResult {
  double cdf;
  double upper_tail;
  double error_bound;
  int terms;
  QfMethod method;
};

/// P(Σ λᵢ χ²₁ ≤ x) and P(Σ λᵢ χ²₁ > x). Primary route is Ruben's
/// mixture-of-chi-squares series (Farebrother's algorithm) with all mixture
/// weights nonnegative; Imhof inversion of the characteristic function is the
/// fallback when the series needs more than `max_terms` terms.
QfResult qf_evaluate(const QuadFormSpec& spec, double x, const QfOptions& options = {});

double qf_cdf(const QuadFormSpec& spec, double x, const QfOptions& options = {});
double qf_upper_tail(const QuadFormSpec& spec, double x, const QfOptions& options = {});

}  // namespace dsmeta
