#pragma once

#include <vector>

#include "dsmeta/effects.hpp"
#include "dsmeta/tau2.hpp"

namespace dsmeta {

enum class PoolMethod { SSW, IV_DL, IV_REML, IV_MP };
enum class EffectIntervalMethod { DL, REML, MP, HKSJ, SMC, SSC };

struct EffectEstimate {
  PoolMethod method;
  double value;
  double se;
  double tau2_used;
};

struct EffectInterval {
  EffectIntervalMethod method;
  double center;
  double lo;
  double hi;
  double level;

  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Effective-sample-size weighted mean Σñₖd̂ₖ / Σñₖ. The attached se is the
/// τ² = 0 plug-in (Σñₖ²v̂ₖ²)^{1/2} / Σñₖ.
EffectEstimate pool_ssw(const std::vector<StudyDsm>& studies);

/// Inverse-variance weighted mean with weights 1/(v̂ₖ² + τ̂²).
EffectEstimate pool_iv(const std::vector<StudyDsm>& studies, const Tau2Estimate& tau2);

EffectInterval ci_iv_normal(const std::vector<StudyDsm>& studies, const Tau2Estimate& tau2,
                            double level);
EffectInterval ci_iv_normal(const std::vector<StudyDsm>& studies, Tau2Method method, double level);

/// Hartung–Knapp–Sidik–Jonkman interval, anchored at the DL estimate of τ².
EffectInterval ci_hksj(const std::vector<StudyDsm>& studies, const Tau2Estimate& tau2_dl_estimate,
                       double level);
EffectInterval ci_hksj(const std::vector<StudyDsm>& studies, double level);

/// Normal interval centered at SSW with se² = Σñₖ²(v̂ₖ² + τ̂²) / (Σñₖ)².
EffectInterval ci_ssw(const std::vector<StudyDsm>& studies, const Tau2Estimate& tau2, double level);
EffectInterval ci_ssw(const std::vector<StudyDsm>& studies, Tau2Method method, double level);

const char* to_string(PoolMethod m);
const char* to_string(EffectIntervalMethod m);

}  // namespace dsmeta
