#include "dsmeta/tau2.hpp"

#include <algorithm>
#include <cmath>

#include "dsmeta/errors.hpp"
#include "dsmeta/heterogeneity.hpp"
#include "dsmeta/numerics.hpp"

namespace dsmeta {

namespace {

constexpr double kRootTol = 1e-10;
constexpr double kMaxTol = 1e-8;

void require_k(const std::vector<StudyDsm>& studies, std::size_t k_min, const char* where) {
  if (studies.size() < k_min)
    throw DomainError(std::string(where) + ": need at least " + std::to_string(k_min) + " studies");
}

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0,1)");
}

Bracket search_range(const std::vector<StudyDsm>& studies) {
  return tau2_search_range(effects_of(studies), variances_of(studies));
}

// Root of a function decreasing in τ² at `target`; 0 when already below it at τ² = 0.
struct Crossing {
  double value;
  bool truncated;
  int evaluations;
};

Crossing decreasing_crossing(const ScalarFn& fn, double target, const Bracket& range,
                             double tol) {
  auto f = [&](double t) { return fn(t) - target; };
  const double f0 = f(0.0);
  if (f0 <= 0.0) return {0.0, true, 1};
  const auto r = find_root_expanding(f, 0.0, range.lo, range.hi, tol);
  return {r.x, false, r.evaluations + 1};
}

// Maximizes a likelihood over τ² ≥ 0, widening the range while the maximum
// sits on the upper edge.
Tau2Estimate maximize_tau2(const ScalarFn& loglik, Tau2Method method, const Bracket& range) {
  double hi = range.lo;
  int evals = 0;
  while (true) {
    const auto r = maximize_1d(loglik, {0.0, hi}, kMaxTol);
    evals += r.evaluations;
    const bool at_edge = r.argmax > hi - 1e-6 * std::max(1.0, hi);
    if (!at_edge) return {method, r.argmax, true, r.argmax == 0.0, evals};
    if (hi >= range.hi) return {method, r.argmax, false, false, evals};
    hi = std::min(2.0 * hi, range.hi);
  }
}

}  // namespace

Bracket tau2_search_range(const VectorRef& effects, const VectorRef& variances) {
  const auto k = effects.size();
  double var = 0.0;
  if (k > 1) var = (effects.array() - effects.mean()).square().sum() / static_cast<double>(k - 1);
  const double start = std::max(1.0, 10.0 * var);
  const double cap = std::max(1e3 * std::max(variances.maxCoeff(), 1.0), start);
  return {start, cap};
}

double q_generalized(const VectorRef& effects, const VectorRef& variances, double tau2) {
  const Vector w = (variances.array() + tau2).inverse().matrix();
  const double mean = weighted_mean(effects, w);
  return w.dot((effects.array() - mean).square().matrix());
}

double qf_conditional_cdf(const std::vector<StudyDsm>& studies, double tau2) {
  const Vector w = n_tilde_of(studies);
  const auto q = cochran_q(effects_of(studies), w);
  const Vector var = (variances_of(studies).array() + tau2).matrix();
  return qf_cdf(eigen_weights(w, var), q.q);
}

double reml_loglik(const VectorRef& effects, const VectorRef& variances, double tau2) {
  const Eigen::ArrayXd total = variances.array() + tau2;
  const Eigen::ArrayXd w = total.inverse();
  const double sw = w.sum();
  const double mean = (w * effects.array()).sum() / sw;
  return -0.5 * (total.log().sum() + std::log(sw) + (w * (effects.array() - mean).square()).sum());
}

double profile_loglik(const VectorRef& effects, const VectorRef& variances, double tau2) {
  const Eigen::ArrayXd total = variances.array() + tau2;
  const Eigen::ArrayXd w = total.inverse();
  const double mean = (w * effects.array()).sum() / w.sum();
  return -0.5 * (total.log().sum() + (w * (effects.array() - mean).square()).sum());
}

Tau2Estimate tau2_dl(const std::vector<StudyDsm>& studies) {
  require_k(studies, 2, "tau2_dl");
  const auto q = cochran_q(studies, WeightScheme::InverseVariance);
  const double w = q.weights.sum();
  const double c = w - q.weights.squaredNorm() / w;
  const double raw = (q.q - (q.k - 1.0)) / c;
  return {Tau2Method::DL, std::max(0.0, raw), true, raw <= 0.0, 0};
}

Tau2Estimate tau2_reml(const std::vector<StudyDsm>& studies) {
  require_k(studies, 2, "tau2_reml");
  const Vector y = effects_of(studies);
  const Vector v = variances_of(studies);
  auto ll = [&](double t) { return reml_loglik(y, v, t); };
  auto est = maximize_tau2(ll, Tau2Method::REML, tau2_search_range(y, v));
  if (!est.converged || est.value <= 0.0) return est;
  // Polish an interior optimum on the score, which the likelihood's flat top
  // hides from the derivative-free search.
  auto score = [&](double t) {
    const Eigen::ArrayXd w = (v.array() + t).inverse();
    const double sw = w.sum();
    const double mean = weighted_mean(y, w.matrix());
    return 0.5 * ((w.square() * (y.array() - mean).square()).sum() - sw + w.square().sum() / sw);
  };
  const double h = 1e-6 * (1.0 + est.value);
  const double lo = std::max(0.0, est.value - h), hi = est.value + h;
  if (score(lo) > 0.0 && score(hi) < 0.0) {
    const auto r = find_root(score, {lo, hi}, 1e-15);
    est.value = r.x;
    est.iterations += r.evaluations;
  }
  return est;
}

Tau2Estimate tau2_mp(const std::vector<StudyDsm>& studies) {
  require_k(studies, 2, "tau2_mp");
  const Vector y = effects_of(studies);
  const Vector v = variances_of(studies);
  auto q = [&](double t) { return q_generalized(y, v, t); };
  const auto c = decreasing_crossing(q, static_cast<double>(studies.size()) - 1.0,
                                     tau2_search_range(y, v), 1e-13);
  return {Tau2Method::MP, c.value, true, c.truncated, c.evaluations};
}

Tau2Estimate tau2_ssc(const std::vector<StudyDsm>& studies) {
  require_k(studies, 2, "tau2_ssc");
  const auto q = cochran_q(studies, WeightScheme::EffectiveSampleSize);
  const double total = q.weights.sum();
  const Eigen::ArrayXd p = q.weights.array() / total;
  const Eigen::ArrayXd pq = p * (1.0 - p);
  const double raw = (q.q / total - (pq * variances_of(studies).array()).sum()) / pq.sum();
  return {Tau2Method::SSC, std::max(0.0, raw), true, raw <= 0.0, 0};
}

Tau2Estimate tau2_smc(const std::vector<StudyDsm>& studies) {
  require_k(studies, 2, "tau2_smc");
  auto cdf = [&](double t) { return qf_conditional_cdf(studies, t); };
  const auto c = decreasing_crossing(cdf, 0.5, search_range(studies), kRootTol);
  return {Tau2Method::SMC, c.value, true, c.truncated, c.evaluations};
}

Tau2Estimate estimate_tau2(const std::vector<StudyDsm>& studies, Tau2Method method) {
  switch (method) {
    case Tau2Method::DL: return tau2_dl(studies);
    case Tau2Method::REML: return tau2_reml(studies);
    case Tau2Method::MP: return tau2_mp(studies);
    case Tau2Method::SSC: return tau2_ssc(studies);
    case Tau2Method::SMC: return tau2_smc(studies);
  }
  throw DomainError("estimate_tau2: unknown method");
}

Tau2Interval tau2_interval_qp(const std::vector<StudyDsm>& studies, double level) {
  require_k(studies, 2, "tau2_interval_qp");
  require_level(level);
  const double alpha = 1.0 - level;
  const double df = static_cast<double>(studies.size()) - 1.0;
  const Vector y = effects_of(studies);
  const Vector v = variances_of(studies);
  const auto range = tau2_search_range(y, v);
  auto q = [&](double t) { return q_generalized(y, v, t); };
  const auto lo = decreasing_crossing(q, chi_square_quantile(1.0 - alpha / 2.0, df), range, 1e-13);
  const auto hi = decreasing_crossing(q, chi_square_quantile(alpha / 2.0, df), range, 1e-13);
  return {Tau2IntervalMethod::QP, lo.value, hi.value, level, lo.truncated, hi.truncated};
}

Tau2Interval tau2_interval_fpc(const std::vector<StudyDsm>& studies, double level) {
  require_k(studies, 2, "tau2_interval_fpc");
  require_level(level);
  const double alpha = 1.0 - level;
  const auto range = search_range(studies);
  auto cdf = [&](double t) { return qf_conditional_cdf(studies, t); };
  const auto lo = decreasing_crossing(cdf, 1.0 - alpha / 2.0, range, kRootTol);
  const auto hi = decreasing_crossing(cdf, alpha / 2.0, range, kRootTol);
  return {Tau2IntervalMethod::FPC, lo.value, hi.value, level, lo.truncated, hi.truncated};
}

Tau2Interval tau2_interval_pl(const std::vector<StudyDsm>& studies, double level) {
  require_k(studies, 2, "tau2_interval_pl");
  require_level(level);
  const Vector y = effects_of(studies);
  const Vector v = variances_of(studies);
  const auto range = tau2_search_range(y, v);
  auto ll = [&](double t) { return profile_loglik(y, v, t); };
  const auto ml = maximize_tau2(ll, Tau2Method::REML, range);
  if (!ml.converged) throw ConvergenceError("tau2_interval_pl: ML estimate not bounded");
  const double peak = ll(ml.value);
  const double threshold = chi_square_quantile(level, 1.0);
  auto excess = [&](double t) { return 2.0 * (peak - ll(t)) - threshold; };

  Tau2Interval out{Tau2IntervalMethod::PL, 0.0, 0.0, level};
  if (ml.value == 0.0 || excess(0.0) <= 0.0) {
    out.lo_truncated = true;
  } else {
    out.lo = find_root(excess, {0.0, ml.value}, kRootTol).x;
  }
  const double start = std::max(range.lo, 2.0 * ml.value);
  try {
    out.hi = find_root_expanding(excess, ml.value, std::min(start, range.hi), range.hi, kRootTol).x;
  } catch (const NoSignChange&) {
    throw ConvergenceError("tau2_interval_pl: profile likelihood too flat to bound the interval");
  }
  return out;
}

Tau2Interval tau2_interval(const std::vector<StudyDsm>& studies, Tau2IntervalMethod method,
                           double level) {
  switch (method) {
    case Tau2IntervalMethod::QP: return tau2_interval_qp(studies, level);
    case Tau2IntervalMethod::PL: return tau2_interval_pl(studies, level);
    case Tau2IntervalMethod::FPC: return tau2_interval_fpc(studies, level);
  }
  throw DomainError("tau2_interval: unknown method");
}

const char* to_string(Tau2Method m) {
  switch (m) {
    case Tau2Method::DL: return "DL";
    case Tau2Method::REML: return "REML";
    case Tau2Method::MP: return "MP";
    case Tau2Method::SSC: return "SSC";
    case Tau2Method::SMC: return "SMC";
  }
  return "?";
}

const char* to_string(Tau2IntervalMethod m) {
  switch (m) {
    case Tau2IntervalMethod::QP: return "QP";
    case Tau2IntervalMethod::PL: return "PL";
    case Tau2IntervalMethod::FPC: return "FPC";
  }
  return "?";
}

}  // namespace dsmeta
