#include <doctest.h>

#include <cmath>

#include "dsmeta/effects.hpp"
#include "dsmeta/errors.hpp"
#include "dsmeta/numerics.hpp"
#include "dsmeta/rng.hpp"

using namespace dsmeta;

TEST_CASE("standardized_mean applies the small-sample correction") {
  const auto sm = standardized_mean({20, 1.0, 2.0});
  CHECK(sm.d == 0.5);
  CHECK(std::abs(sm.g - 0.4799551764621268) < 1e-12);
  CHECK(std::abs(sm.g - hedges_J(19) * 0.5) < 1e-15);
  CHECK_THROWS_AS(standardized_mean({3, 1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(standardized_mean({20, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(standardized_mean({20, NAN, 1.0}), DomainError);
}

TEST_CASE("variance formulas match reference values") {
  CHECK(std::abs(var_g_true(20, 0.0) - 0.05149155831580041) < 1e-12);
  CHECK(std::abs(var_g_true(20, 1.0) - 0.08132272463180867) < 1e-12);
  CHECK(std::abs(var_g_hat(20, 0.5) - 0.057241761390540005) < 1e-12);
  // symmetric in the sign of the effect
  CHECK(var_g_true(15, -0.7) == var_g_true(15, 0.7));
  CHECK(var_g_hat(15, -0.7) == var_g_hat(15, 0.7));
  CHECK_THROWS_AS(var_g_true(3, 0.0), DomainError);
  CHECK_THROWS_AS(var_g_hat(2, 0.0), DomainError);
}

TEST_CASE("study_dsm combines both arms") {
  const auto s = study_dsm({30, 2.0, 1.5}, {20, 1.0, 2.0});
  CHECK(std::abs(s.g_t - 1.2984999794622911) < 1e-12);
  CHECK(std::abs(s.g_c - 0.4799551764621268) < 1e-12);
  CHECK(std::abs(s.d_hat - 0.8185448030001643) < 1e-12);
  CHECK(std::abs(s.v2_hat - 0.12093587709027612) < 1e-12);
  CHECK(s.n_t == 30);
  CHECK(s.n_c == 20);
  CHECK(s.n_tilde == 12.0);
  CHECK(std::abs(s.v2_hat - (var_g_hat(30, s.g_t) + var_g_hat(20, s.g_c))) < 1e-15);

  const auto t = study_dsm_from_g(s.g_t, 30, s.g_c, 20);
  CHECK(t.d_hat == s.d_hat);
  CHECK(t.v2_hat == s.v2_hat);
  CHECK_THROWS_AS(study_dsm_from_g(INFINITY, 30, 0.1, 20), DomainError);
  CHECK_THROWS_AS(study_dsm_from_g(0.2, 30, 0.1, 2), DomainError);
}

TEST_CASE("asymptotic variance under normality") {
  const MomentPair normal{0.0, 3.0};
  CHECK(std::abs(asymptotic_variance(1.0, 0.0, 100, 100, normal) - 0.025) < 1e-15);
  CHECK(std::abs(asymptotic_variance(0.0, 0.0, 50, 50, normal) - 0.04) < 1e-15);
  // Skewness enters linearly in delta.
  const MomentPair skewed{1.0, 3.0};
  CHECK(asymptotic_variance(1.0, 0.0, 100, 100, skewed) <
        asymptotic_variance(-1.0, 0.0, 100, 100, skewed));
  CHECK_THROWS_AS(asymptotic_variance(1.0, 0.0, 100, 100, {3.0, 1.0}), DomainError);
}

TEST_CASE("vector accessors") {
  std::vector<StudyDsm> studies{study_dsm_from_g(0.9, 20, 0.1, 20), study_dsm_from_g(0.3, 30, 0.2, 25)};
  const auto y = effects_of(studies);
  const auto v = variances_of(studies);
  const auto n = n_tilde_of(studies);
  REQUIRE(y.size() == 2);
  CHECK(std::abs(y[0] - 0.8) < 1e-15);
  CHECK(std::abs(y[1] - 0.1) < 1e-15);
  CHECK(std::abs(v[0] - 0.12375297736097121) < 1e-12);
  CHECK(std::abs(v[1] - 0.07588282217531914) < 1e-12);
  CHECK(n[0] == 10.0);
  CHECK(std::abs(n[1] - 750.0 / 55.0) < 1e-12);
}

TEST_CASE("g is unbiased and var_g_hat unbiased for var_g_true (Monte Carlo)") {
  for (double delta : {0.0, 1.0}) {
    const int n = 12;
    const int draws = 200'000;
    RngStream rng(5, {static_cast<std::uint64_t>(delta * 10)});
    double sum = 0, sum2 = 0, sum_vhat = 0;
    for (int i = 0; i < draws; ++i) {
      const double t = sample_noncentral_t(n - 1, std::sqrt(n) * delta, rng);
      const double g = hedges_J(n - 1) * t / std::sqrt(n);
      sum += g;
      sum2 += g * g;
      sum_vhat += var_g_hat(n, g);
    }
    const double mean = sum / draws;
    const double var = sum2 / draws - mean * mean;
    const double vt = var_g_true(n, delta);
    CHECK(std::abs(mean - delta) < 3.0 * std::sqrt(vt / draws));
    CHECK(std::abs(var / vt - 1.0) < 0.02);
    CHECK(std::abs(sum_vhat / draws / vt - 1.0) < 0.02);
  }
}
