#pragma once

#include <vector>

#include "dsmeta/effects.hpp"

// Five-study fixture shared by the estimator tests. Reference values for it were
// produced by tests/oracles/oracles.py and frozen here.
inline std::vector<dsmeta::StudyDsm> five_studies() {
  using dsmeta::study_dsm_from_g;
  return {study_dsm_from_g(0.9, 20, 0.1, 20), study_dsm_from_g(0.3, 30, 0.2, 25),
          study_dsm_from_g(1.6, 15, 0.4, 18), study_dsm_from_g(0.2, 40, -0.1, 40),
          study_dsm_from_g(1.1, 12, 0.0, 14)};
}

// Studies with prescribed effects and variances; n_tilde = n/2 for equal arms n.
inline std::vector<dsmeta::StudyDsm> synthetic(const std::vector<double>& effects,
                                               const std::vector<double>& variances,
                                               const std::vector<double>& n_tilde) {
  std::vector<dsmeta::StudyDsm> out;
  for (std::size_t i = 0; i < effects.size(); ++i) {
    const int n = static_cast<int>(2 * n_tilde[i]);
    out.push_back({effects[i], 0.0, effects[i], variances[i], n, n, n_tilde[i]});
  }
  return out;
}
