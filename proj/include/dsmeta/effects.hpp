#pragma once

#include <vector>

#include "dsmeta/quadform.hpp"

namespace dsmeta {

/// Raw summary statistics of one study arm.
struct ArmSummary {
  int n;
  double mean;
  double sd;
};

struct StandardizedMean {
  double d;  // mean / sd
  double g;  // bias-corrected, J(n−1)·d
};

/// Per-study difference of standardized means and its estimated variance.
struct StudyDsm {
  double g_t;
  double g_c;
  double d_hat;   // g_t − g_c
  double v2_hat;  // estimated variance of d_hat
  int n_t;
  int n_c;
  double n_tilde;  // n_t n_c / (n_t + n_c)
};

/// Standardized third and fourth moments of the outcome distribution.
struct MomentPair {
  double alpha3;
  double alpha4;
};

inline constexpr int kMinArmSize = 4;

StandardizedMean standardized_mean(const ArmSummary& arm);

/// Exact variance of g for normal data.
double var_g_true(int n, double delta);

/// Unbiased estimate of Var(g) from the observed g.
double var_g_hat(int n, double g);

/// Builds the study effect from two arms' summaries.
StudyDsm study_dsm(const ArmSummary& treatment, const ArmSummary& control);

/// Builds the study effect from already corrected standardized means.
StudyDsm study_dsm_from_g(double g_t, int n_t, double g_c, int n_c);

/// Large-sample variance of d_hat when both arms come from one family with
/// standardized moments α₃, α₄ (normal: 0, 3).
double asymptotic_variance(double delta_t, double delta_c, int n_t, int n_c,
                           const MomentPair& moments);

// Column views over a set of studies.
Vector effects_of(const std::vector<StudyDsm>& studies);
Vector variances_of(const std::vector<StudyDsm>& studies);
Vector n_tilde_of(const std::vector<StudyDsm>& studies);

}  // namespace dsmeta
