#include "dsmeta/effects.hpp"

#include <cmath>
#include <string>

#include "dsmeta/errors.hpp"
#include "dsmeta/numerics.hpp"

namespace dsmeta {

namespace {

void check_arm_size(int n, const char* where) {
  if (n < kMinArmSize)
    throw DomainError(std::string(where) + ": arm size must be at least " +
                      std::to_string(kMinArmSize));
}

// 1 − (n−3) / ((n−1) J²(n−1)): coefficient of g² in the variance estimate.
double g2_coefficient(int n) {
  const double j = hedges_J(n - 1.0);
  return 1.0 - (n - 3.0) / ((n - 1.0) * j * j);
}

}  // namespace

StandardizedMean standardized_mean(const ArmSummary& arm) {
  check_arm_size(arm.n, "standardized_mean");
  if (!(arm.sd > 0.0) || !std::isfinite(arm.sd))
    throw DomainError("standardized_mean: sd must be positive and finite");
  if (!std::isfinite(arm.mean)) throw DomainError("standardized_mean: mean must be finite");
  const double d = arm.mean / arm.sd;
  return {d, hedges_J(arm.n - 1.0) * d};
}

double var_g_true(int n, double delta) {
  check_arm_size(n, "var_g_true");
  const double j = hedges_J(n - 1.0);
  return (n - 1.0) * j * j / (n * (n - 3.0)) * (1.0 + n * delta * delta) - delta * delta;
}

double var_g_hat(int n, double g) {
  check_arm_size(n, "var_g_hat");
  return 1.0 / n + g2_coefficient(n) * g * g;
}

StudyDsm study_dsm_from_g(double g_t, int n_t, double g_c, int n_c) {
  check_arm_size(n_t, "study_dsm");
  check_arm_size(n_c, "study_dsm");
  if (!std::isfinite(g_t) || !std::isfinite(g_c))
    throw DomainError("study_dsm: standardized means must be finite");
  const double n_tilde = static_cast<double>(n_t) * n_c / (n_t + n_c);
  const double v2 = 1.0 / n_tilde + g2_coefficient(n_t) * g_t * g_t + g2_coefficient(n_c) * g_c * g_c;
  return {g_t, g_c, g_t - g_c, v2, n_t, n_c, n_tilde};
}

StudyDsm study_dsm(const ArmSummary& treatment, const ArmSummary& control) {
  const auto t = standardized_mean(treatment);
  const auto c = standardized_mean(control);
  return study_dsm_from_g(t.g, treatment.n, c.g, control.n);
}

double asymptotic_variance(double delta_t, double delta_c, int n_t, int n_c,
                           const MomentPair& moments) {
  if (n_t < 1 || n_c < 1) throw DomainError("asymptotic_variance: arm sizes must be positive");
  const double n_tilde = static_cast<double>(n_t) * n_c / (n_t + n_c);
  const double v = 1.0 / n_tilde - (delta_t / n_t + delta_c / n_c) * moments.alpha3 +
                   (delta_t * delta_t / n_t + delta_c * delta_c / n_c) * (moments.alpha4 - 1.0) / 4.0;
  if (!(v > 0.0)) throw DomainError("asymptotic_variance: non-positive variance; check moments");
  return v;
}

namespace {

template <typename Field>
Vector column(const std::vector<StudyDsm>& studies, Field field) {
  Vector out(static_cast<Eigen::Index>(studies.size()));
  for (std::size_t i = 0; i < studies.size(); ++i) out[static_cast<Eigen::Index>(i)] = studies[i].*field;
  return out;
}

}  // namespace

Vector effects_of(const std::vector<StudyDsm>& studies) { return column(studies, &StudyDsm::d_hat); }
Vector variances_of(const std::vector<StudyDsm>& studies) { return column(studies, &StudyDsm::v2_hat); }
Vector n_tilde_of(const std::vector<StudyDsm>& studies) { return column(studies, &StudyDsm::n_tilde); }

}  // namespace dsmeta
