#pragma once

#include <vector>

#include "dsmeta/effects.hpp"
#include "dsmeta/quadform.hpp"
#include "dsmeta/roots.hpp"

namespace dsmeta {

enum class Tau2Method { DL, REML, MP, SSC, SMC };
enum class Tau2IntervalMethod { QP, PL, FPC };

struct Tau2Estimate {
  Tau2Method method;
  double value;
  bool converged = true;
  bool truncated = false;  // value was set to zero by the max(0, ·) rule
  int iterations = 0;
};

struct Tau2Interval {
  Tau2IntervalMethod method;
  double lo;
  double hi;
  double level;
  bool lo_truncated = false;
  bool hi_truncated = false;
};

/// Search range for τ² roots and maxima: starts at max(1, 10·var(effects))
/// and may double up to max(10³·max(v̂², 1), start).
Bracket tau2_search_range(const VectorRef& effects, const VectorRef& variances);

/// Q with weights 1/(v̂ₖ² + τ²).
double q_generalized(const VectorRef& effects, const VectorRef& variances, double tau2);

/// F(Q_F | τ²): CDF of the effective-sample-size Q at its observed value,
/// with plug-in variances v̂ₖ² + τ².
double qf_conditional_cdf(const std::vector<StudyDsm>& studies, double tau2);

/// Restricted log-likelihood of τ² (constants dropped).
double reml_loglik(const VectorRef& effects, const VectorRef& variances, double tau2);

/// Log-likelihood of τ² with the mean profiled out (constants dropped).
double profile_loglik(const VectorRef& effects, const VectorRef& variances, double tau2);

Tau2Estimate tau2_dl(const std::vector<StudyDsm>& studies);
Tau2Estimate tau2_reml(const std::vector<StudyDsm>& studies);
Tau2Estimate tau2_mp(const std::vector<StudyDsm>& studies);
Tau2Estimate tau2_ssc(const std::vector<StudyDsm>& studies);
Tau2Estimate tau2_smc(const std::vector<StudyDsm>& studies);

Tau2Estimate estimate_tau2(const std::vector<StudyDsm>& studies, Tau2Method method);

Tau2Interval tau2_interval_qp(const std::vector<StudyDsm>& studies, double level);
Tau2Interval tau2_interval_pl(const std::vector<StudyDsm>& studies, double level);
Tau2Interval tau2_interval_fpc(const std::vector<StudyDsm>& studies, double level);

Tau2Interval tau2_interval(const std::vector<StudyDsm>& studies, Tau2IntervalMethod method,
                           double level);

const char* to_string(Tau2Method m);
const char* to_string(Tau2IntervalMethod m);

}  // namespace dsmeta
