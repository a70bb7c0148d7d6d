#pragma once

// Special functions and distributions used across the library.

namespace dsmeta {

double log_gamma(double x);

/// Hedges' small-sample factor J(m) = Γ(m/2) / (√(m/2) Γ((m−1)/2)), m > 1.
double hedges_J(double m);

double normal_cdf(double x);
double normal_quantile(double p);

double student_t_cdf(double x, double df);
double student_t_quantile(double p, double df);

double noncentral_t_cdf(double x, double df, double ncp);

double chi_square_cdf(double x, double df);
/// Upper tail P(X > x), evaluated without cancellation.
double chi_square_sf(double x, double df);
double chi_square_quantile(double p, double df);

}  // namespace dsmeta
