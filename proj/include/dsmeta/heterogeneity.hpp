#pragma once

#include <vector>

#include "dsmeta/effects.hpp"
#include "dsmeta/quadform.hpp"

namespace dsmeta {

enum class WeightScheme { InverseVariance, EffectiveSampleSize };

struct QResult {
  double q;
  double weighted_mean;
  WeightScheme scheme;
  int k;
  Vector weights;
};

enum class HetApproximation { ChiSq, FSSW };

struct HetTest {
  double statistic;
  HetApproximation approximation;
  double p_value;
};

/// Weights for a scheme: 1/v̂ₖ² or ñₖ.
/// Σwₖyₖ / Σw, accumulated relative to y₀ so equal effects return y₀ exactly.
double weighted_mean(const VectorRef& effects, const VectorRef& weights);

Vector scheme_weights(const std::vector<StudyDsm>& studies, WeightScheme scheme);

/// Q = Σ wₖ (yₖ − ȳ_w)².
QResult cochran_q(const VectorRef& effects, const VectorRef& weights,
                  WeightScheme scheme = WeightScheme::EffectiveSampleSize);
QResult cochran_q(const std::vector<StudyDsm>& studies, WeightScheme scheme);

/// E(Q) = W Σ pₖ(1 − pₖ)(σₖ² + τ²) for fixed weights.
double expected_qf(const VectorRef& weights, const VectorRef& variances, double tau2);

HetTest het_test(const std::vector<StudyDsm>& studies, HetApproximation approximation);

const char* to_string(HetApproximation a);

}  // namespace dsmeta
