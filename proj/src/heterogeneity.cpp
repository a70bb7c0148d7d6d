#include "dsmeta/heterogeneity.hpp"

#include <cmath>

#include "dsmeta/errors.hpp"
#include "dsmeta/numerics.hpp"

namespace dsmeta {

Vector scheme_weights(const std::vector<StudyDsm>& studies, WeightScheme scheme) {
  if (scheme == WeightScheme::InverseVariance) return variances_of(studies).cwiseInverse();
  return n_tilde_of(studies);
}

double weighted_mean(const VectorRef& effects, const VectorRef& weights) {
  const double y0 = effects[0];
  return y0 + weights.dot((effects.array() - y0).matrix()) / weights.sum();
}

QResult cochran_q(const VectorRef& effects, const VectorRef& weights, WeightScheme scheme) {
  if (effects.size() != weights.size()) throw DomainError("cochran_q: dimension mismatch");
  if (effects.size() < 2) throw DomainError("cochran_q: need at least two studies");
  if ((weights.array() <= 0).any() || !weights.allFinite())
    throw DomainError("cochran_q: weights must be positive and finite");
  const double mean = weighted_mean(effects, weights);
  const double q = weights.dot((effects.array() - mean).square().matrix());
  return {q, mean, scheme, static_cast<int>(effects.size()), weights};
}

QResult cochran_q(const std::vector<StudyDsm>& studies, WeightScheme scheme) {
  return cochran_q(effects_of(studies), scheme_weights(studies, scheme), scheme);
}

double expected_qf(const VectorRef& weights, const VectorRef& variances, double tau2) {
  if (weights.size() != variances.size()) throw DomainError("expected_qf: dimension mismatch");
  if (weights.size() < 2) throw DomainError("expected_qf: need at least two studies");
  if (!(tau2 >= 0.0)) throw DomainError("expected_qf: tau2 must be nonnegative");
  const double total = weights.sum();
  const auto p = (weights / total).array();
  return total * (p * (1.0 - p) * (variances.array() + tau2)).sum();
}

HetTest het_test(const std::vector<StudyDsm>& studies, HetApproximation approximation) {
  if (studies.size() < 2) throw DomainError("het_test: need at least two studies");
  const auto k = static_cast<double>(studies.size());
  if (approximation == HetApproximation::ChiSq) {
    const auto q = cochran_q(studies, WeightScheme::InverseVariance);
    return {q.q, approximation, chi_square_sf(q.q, k - 1.0)};
  }
  const auto q = cochran_q(studies, WeightScheme::EffectiveSampleSize);
  const auto spec = eigen_weights(q.weights, variances_of(studies));
  return {q.q, approximation, qf_upper_tail(spec, q.q)};
}

const char* to_string(HetApproximation a) {
  return a == HetApproximation::ChiSq ? "ChiSq" : "FSSW";
}

}  // namespace dsmeta
