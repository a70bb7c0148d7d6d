#include "dsmeta/pooling.hpp"

#include <cmath>

#include "dsmeta/errors.hpp"
#include "dsmeta/heterogeneity.hpp"
#include "dsmeta/numerics.hpp"

namespace dsmeta {

namespace {

void require_k(const std::vector<StudyDsm>& studies, std::size_t k_min, const char* where) {
  if (studies.size() < k_min)
    throw DomainError(std::string(where) + ": need at least " + std::to_string(k_min) + " studies");
}

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0,1)");
}

EffectInterval symmetric(EffectIntervalMethod method, double center, double half, double level) {
  return {method, center, center - half, center + half, level};
}

PoolMethod pool_method_for(Tau2Method m) {
  switch (m) {
    case Tau2Method::DL: return PoolMethod::IV_DL;
    case Tau2Method::REML: return PoolMethod::IV_REML;
    case Tau2Method::MP: return PoolMethod::IV_MP;
    default: throw DomainError("inverse-variance pooling supports DL, REML and MP only");
  }
}

EffectIntervalMethod interval_method_for(Tau2Method m) {
  switch (m) {
    case Tau2Method::DL: return EffectIntervalMethod::DL;
    case Tau2Method::REML: return EffectIntervalMethod::REML;
    case Tau2Method::MP: return EffectIntervalMethod::MP;
    case Tau2Method::SMC: return EffectIntervalMethod::SMC;
    case Tau2Method::SSC: return EffectIntervalMethod::SSC;
  }
  throw DomainError("unknown tau2 method");
}

}  // namespace

EffectEstimate pool_ssw(const std::vector<StudyDsm>& studies) {
  require_k(studies, 1, "pool_ssw");
  const Vector w = n_tilde_of(studies);
  const double total = w.sum();
  const double value = weighted_mean(effects_of(studies), w);
  const double se = std::sqrt(w.cwiseAbs2().dot(variances_of(studies))) / total;
  return {PoolMethod::SSW, value, se, 0.0};
}

EffectEstimate pool_iv(const std::vector<StudyDsm>& studies, const Tau2Estimate& tau2) {
  require_k(studies, 1, "pool_iv");
  if (!(tau2.value >= 0.0)) throw DomainError("pool_iv: tau2 must be nonnegative");
  const Vector w = (variances_of(studies).array() + tau2.value).inverse().matrix();
  const double total = w.sum();
  return {pool_method_for(tau2.method), weighted_mean(effects_of(studies), w), 1.0 / std::sqrt(total),
          tau2.value};
}

EffectInterval ci_iv_normal(const std::vector<StudyDsm>& studies, const Tau2Estimate& tau2,
                            double level) {
  require_k(studies, 2, "ci_iv_normal");
  require_level(level);
  const auto est = pool_iv(studies, tau2);
  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  return symmetric(interval_method_for(tau2.method), est.value, z * est.se, level);
}

EffectInterval ci_iv_normal(const std::vector<StudyDsm>& studies, Tau2Method method, double level) {
  pool_method_for(method);
  require_k(studies, 2, "ci_iv_normal");
  return ci_iv_normal(studies, estimate_tau2(studies, method), level);
}

EffectInterval ci_hksj(const std::vector<StudyDsm>& studies, const Tau2Estimate& tau2_dl_estimate,
                       double level) {
  require_k(studies, 2, "ci_hksj");
  require_level(level);
  const Vector y = effects_of(studies);
  const Vector w = (variances_of(studies).array() + tau2_dl_estimate.value).inverse().matrix();
  const double total = w.sum();
  const double mean = weighted_mean(y, w);
  const double k = static_cast<double>(studies.size());
  const double q = w.dot((y.array() - mean).square().matrix()) / (k - 1.0);
  const double t = student_t_quantile(1.0 - (1.0 - level) / 2.0, k - 1.0);
  return symmetric(EffectIntervalMethod::HKSJ, mean, t * std::sqrt(q / total), level);
}

EffectInterval ci_hksj(const std::vector<StudyDsm>& studies, double level) {
  require_k(studies, 2, "ci_hksj");
  return ci_hksj(studies, tau2_dl(studies), level);
}

EffectInterval ci_ssw(const std::vector<StudyDsm>& studies, const Tau2Estimate& tau2, double level) {
  require_k(studies, 2, "ci_ssw");
  require_level(level);
  if (tau2.method != Tau2Method::SMC && tau2.method != Tau2Method::SSC)
    throw DomainError("ci_ssw: tau2 must come from SMC or SSC");
  const Vector w = n_tilde_of(studies);
  const double total = w.sum();
  const double center = weighted_mean(effects_of(studies), w);
  const double se =
      std::sqrt(w.cwiseAbs2().dot((variances_of(studies).array() + tau2.value).matrix())) / total;
  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  return symmetric(interval_method_for(tau2.method), center, z * se, level);
}

EffectInterval ci_ssw(const std::vector<StudyDsm>& studies, Tau2Method method, double level) {
  if (method != Tau2Method::SMC && method != Tau2Method::SSC)
    throw DomainError("ci_ssw: tau2 must come from SMC or SSC");
  require_k(studies, 2, "ci_ssw");
  return ci_ssw(studies, estimate_tau2(studies, method), level);
}

const char* to_string(PoolMethod m) {
  switch (m) {
    case PoolMethod::SSW: return "SSW";
    case PoolMethod::IV_DL: return "DL";
    case PoolMethod::IV_REML: return "REML";
    case PoolMethod::IV_MP: return "MP";
  }
  return "?";
}

const char* to_string(EffectIntervalMethod m) {
  switch (m) {
    case EffectIntervalMethod::DL: return "DL";
    case EffectIntervalMethod::REML: return "REML";
    case EffectIntervalMethod::MP: return "MP";
    case EffectIntervalMethod::HKSJ: return "HKSJ";
    case EffectIntervalMethod::SMC: return "SMC";
    case EffectIntervalMethod::SSC: return "SSC";
  }
  return "?";
}

}  // namespace dsmeta
