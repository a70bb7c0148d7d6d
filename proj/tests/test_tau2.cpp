#include <doctest.h>

#include <cmath>

#include "dsmeta/errors.hpp"
#include "dsmeta/heterogeneity.hpp"
#include "dsmeta/numerics.hpp"
#include "dsmeta/rng.hpp"
#include "dsmeta/tau2.hpp"
#include "fixture.hpp"

using namespace dsmeta;

TEST_CASE("closed-form hand examples") {
  const auto eq = synthetic({0, 2, 4}, {1, 1, 1}, {10, 10, 10});
  CHECK(std::abs(tau2_dl(eq).value - 3.0) < 1e-12);
  CHECK(std::abs(tau2_mp(eq).value - 3.0) < 1e-10);
  const auto two = synthetic({0, 2}, {0.1, 0.1}, {10, 10});
  // (20/20 − 2·0.25·0.1)/0.5
  CHECK(std::abs(tau2_ssc(two).value - 1.9) < 1e-12);
}

TEST_CASE("estimators on the five-study fixture") {
  const auto s = five_studies();
  CHECK(std::abs(tau2_dl(s).value - 0.09196764230877967) < 1e-10);
  CHECK(std::abs(tau2_mp(s).value - 0.10280208184932256) < 1e-10);
  CHECK(std::abs(tau2_ssc(s).value - 0.10457822919382977) < 1e-10);
  // grid oracle with step 1e-4
  CHECK(std::abs(tau2_reml(s).value - 0.0996) < 2e-4);
  const auto smc = tau2_smc(s);
  CHECK(smc.converged);
  CHECK(std::abs(smc.value - 0.14889693895838294) < 1e-8);
  CHECK(std::abs(qf_conditional_cdf(s, smc.value) - 0.5) < 1e-8);
}

TEST_CASE("REML with unequal variances against a grid") {
  const auto s = synthetic({0, 1, 3}, {0.5, 1, 2}, {10, 10, 10});
  const auto r = tau2_reml(s);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 0.8202) < 2e-4);
  // first-order condition at the interior maximum
  const auto y = effects_of(s);
  const auto v = variances_of(s);
  const double h = 1e-5;
  const double slope = (reml_loglik(y, v, r.value + h) - reml_loglik(y, v, r.value - h)) / (2 * h);
  CHECK(std::abs(slope) < 1e-4);
}

TEST_CASE("homogeneous data truncate at zero") {
  const auto s = synthetic({0.5, 0.5, 0.5, 0.5}, {0.1, 0.2, 0.1, 0.3}, {10, 5, 10, 4});
  for (auto m : {Tau2Method::DL, Tau2Method::REML, Tau2Method::MP, Tau2Method::SSC, Tau2Method::SMC}) {
    const auto e = estimate_tau2(s, m);
    CAPTURE(std::string(to_string(m)));
    CHECK(e.value == 0.0);
  }
  CHECK(tau2_dl(s).truncated);
  CHECK(tau2_ssc(s).truncated);
}

TEST_CASE("Q-profile interval") {
  const auto eq = synthetic({0, 2, 4}, {1, 1, 1}, {10, 10, 10});
  const auto qp = tau2_interval_qp(eq, 0.95);
  CHECK(std::abs(qp.lo - 0.08434012272726754) < 1e-9);
  CHECK(std::abs(qp.hi - 156.99156082082885) < 1e-7);
  CHECK_FALSE(qp.lo_truncated);

  const auto s = five_studies();
  const auto f5 = tau2_interval_qp(s, 0.95);
  CHECK(f5.lo == 0.0);
  CHECK(f5.lo_truncated);
  CHECK(std::abs(f5.hi - 1.8031051430510894) < 1e-9);
  const auto y = effects_of(s);
  const auto v = variances_of(s);
  CHECK(std::abs(q_generalized(y, v, f5.hi) - chi_square_quantile(0.025, 4)) < 1e-9);
}

TEST_CASE("profile-likelihood interval") {
  const auto s = five_studies();
  const auto pl = tau2_interval_pl(s, 0.95);
  CHECK(pl.lo == 0.0);
  CHECK(std::abs(pl.hi - 0.7250390520594577) < 1e-8);
  CHECK(pl.level == 0.95);
}

TEST_CASE("F-based interval brackets the median estimate") {
  const auto s = five_studies();
  const auto fpc = tau2_interval_fpc(s, 0.95);
  CHECK(fpc.lo == 0.0);
  CHECK(std::abs(fpc.hi - 1.8199550364712531) < 1e-8);
  CHECK(std::abs(qf_conditional_cdf(s, fpc.hi) - 0.025) < 1e-9);
  const double smc = tau2_smc(s).value;
  CHECK(fpc.lo <= smc);
  CHECK(smc <= fpc.hi);
}

TEST_CASE("F(Q_F | tau2) decreases in tau2") {
  const auto s = five_studies();
  double prev = 1.0;
  for (double t = 0.0; t < 3.0; t += 0.1) {
    const double f = qf_conditional_cdf(s, t);
    CHECK(f <= prev + 1e-12);
    prev = f;
  }
}

TEST_CASE("search range") {
  Vector y(3), v(3);
  y << 0, 10, 20;
  v << 0.1, 0.1, 0.1;
  // lo is the first upper end tried, hi the expansion cap
  const auto r = tau2_search_range(y, v);
  CHECK(r.lo == doctest::Approx(1000.0));
  CHECK(r.hi == doctest::Approx(1000.0));
  y << 0, 0.1, 0.2;
  CHECK(tau2_search_range(y, v).lo == 1.0);
  CHECK(tau2_search_range(y, v).hi == 1000.0);
  v << 0.1, 5.0, 0.1;
  CHECK(tau2_search_range(y, v).hi == 5000.0);
}

TEST_CASE("all estimators are finite and non-negative on random data") {
  RngStream rng(8, {2});
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 9;
    std::vector<double> y(k), v(k), nt(k);
    for (int i = 0; i < k; ++i) {
      nt[i] = 5 + 40 * (rng.normal() * rng.normal() + 1.0) * (rng.normal() > 0);
      nt[i] = std::max(nt[i], 3.0);
      v[i] = 2.0 / nt[i] + 0.01;
      y[i] = 0.3 + std::sqrt(v[i] + 0.1) * rng.normal();
    }
    const auto s = synthetic(y, v, nt);
    CAPTURE(trial);
    for (auto m : {Tau2Method::DL, Tau2Method::REML, Tau2Method::MP, Tau2Method::SSC, Tau2Method::SMC}) {
      const auto e = estimate_tau2(s, m);
      CHECK(std::isfinite(e.value));
      CHECK(e.value >= 0.0);
    }
    if (k < 3) continue;
    for (auto m : {Tau2IntervalMethod::QP, Tau2IntervalMethod::FPC}) {
      CAPTURE(std::string(to_string(m)));
      const auto ci = tau2_interval(s, m, 0.95);
      CHECK(ci.lo >= 0.0);
      CHECK(ci.lo <= ci.hi);
    }
  }
}

TEST_CASE("an upper limit beyond the expansion cap is reported, not invented") {
  // With K = 2 the Q-profile target is the 2.5% point of chi-square(1), about 0.001.
  const auto s = synthetic({0.0, 3.0}, {0.1, 0.1}, {10, 10});
  CHECK_THROWS_AS(tau2_interval_qp(s, 0.95), ConvergenceError);
}
