#include "dsmeta/simulation.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <thread>

#include "dsmeta/errors.hpp"
#include "dsmeta/heterogeneity.hpp"
#include "dsmeta/numerics.hpp"
#include "dsmeta/pooling.hpp"
#include "dsmeta/tau2.hpp"

namespace dsmeta {

std::array<int, 5> unequal_pattern(int mean_size) {
  switch (mean_size) {
    case 30: return {12, 16, 18, 20, 84};
    case 60: return {24, 32, 36, 40, 168};
    case 100: return {64, 72, 76, 80, 208};
    case 160: return {124, 132, 136, 140, 268};
    default: break;
  }
  throw DomainError("unequal sizes: mean size must be one of 30, 60, 100, 160 (got " +
                    std::to_string(mean_size) + ")");
}

namespace {

template <typename Range>
std::string join(const Range& values) {
  std::ostringstream out;
  bool first = true;
  for (const auto& v : values) {
    out << (first ? "" : ", ") << v;
    first = false;
  }
  return out.str();
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ mix64(v)); }

}  // namespace

void SimulationCell::validate() const {
  if (k < 2) throw DomainError("K must be at least 2 (standard grid uses " + join(kGridK) + ")");
  if (!(f > 0.0 && f < 1.0)) throw DomainError("f must lie in (0,1) (standard grid uses 0.5)");
  if (!std::isfinite(delta_c))
    throw DomainError("delta_c must be finite (standard grid uses " + join(kGridDeltaC) + ")");
  if (!std::isfinite(delta))
    throw DomainError("Delta must be finite (standard grid uses " + join(kGridDelta) + ")");
  if (!(tau2 >= 0.0) || !std::isfinite(tau2))
    throw DomainError("tau2 must be nonnegative (standard grid uses " + join(kGridTau2) + ")");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("level must lie in (0,1)");
  if (reps < 1) throw DomainError("reps must be positive");
  if (sizes.regime == SizeRegime::Unequal) {
    unequal_pattern(sizes.value);
    if (k % 5 != 0)
      throw DomainError("unequal sizes need K to be a multiple of 5 (standard grid uses " +
                        join(kGridK) + ")");
  }
  for (int n : study_sizes()) {
    const int n_c = static_cast<int>(std::floor(f * n));
    if (n_c < kMinArmSize || n - n_c < kMinArmSize)
      throw DomainError("study size " + std::to_string(n) +
                        " leaves an arm below 4 subjects (standard grid uses n = " +
                        join(kGridEqualN) + ")");
  }
}

std::vector<int> SimulationCell::study_sizes() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(std::max(k, 0)));
  if (sizes.regime == SizeRegime::Equal) {
    out.assign(static_cast<std::size_t>(k), sizes.value);
  } else {
    const auto pattern = unequal_pattern(sizes.value);
    for (int i = 0; i < k; ++i) out.push_back(pattern[static_cast<std::size_t>(i % 5)]);
  }
  return out;
}

std::uint64_t SimulationCell::key() const {
  std::uint64_t h = 0x5eed5eed5eed5eedULL;
  h = hash_combine(h, static_cast<std::uint64_t>(k));
  h = hash_combine(h, static_cast<std::uint64_t>(sizes.regime));
  h = hash_combine(h, static_cast<std::uint64_t>(sizes.value));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(f));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(delta_c));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(delta));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(tau2));
  return h;
}

std::vector<StudyDsm> generate_replicate(const SimulationCell& cell, std::uint64_t rep_index) {
  RngStream rng(cell.seed, {cell.key(), rep_index});
  const double tau = std::sqrt(cell.tau2);
  std::vector<StudyDsm> studies;
  studies.reserve(static_cast<std::size_t>(cell.k));
  auto draw_g = [&](int n, double delta) {
    const double df = n - 1.0;
    const double root_n = std::sqrt(static_cast<double>(n));
    return hedges_J(df) * sample_noncentral_t(df, root_n * delta, rng) / root_n;
  };
  for (int n : cell.study_sizes()) {
    const int n_c = static_cast<int>(std::floor(cell.f * n));
    const int n_t = n - n_c;
    const double delta_k = cell.delta + tau * rng.normal();
    const double g_t = draw_g(n_t, cell.delta_c + delta_k);
    const double g_c = draw_g(n_c, cell.delta_c);
    studies.push_back(study_dsm_from_g(g_t, n_t, g_c, n_c));
  }
  return studies;
}

namespace {

template <typename F>
auto attempt(F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<Tau2Estimate> usable(std::optional<Tau2Estimate> est) {
  if (est && !est->converged) return std::nullopt;
  return est;
}

}  // namespace

ReplicateOutcome analyze_replicate(const std::vector<StudyDsm>& studies,
                                   const SimulationCell& cell) {
  ReplicateOutcome out;
  const double level = cell.level;

  std::array<std::optional<Tau2Estimate>, 5> tau2;
  const std::array<Tau2Method, 5> tau2_methods{Tau2Method::DL, Tau2Method::REML, Tau2Method::MP,
                                               Tau2Method::SMC, Tau2Method::SSC};
  for (std::size_t i = 0; i < tau2.size(); ++i) {
    tau2[i] = usable(attempt([&] { return estimate_tau2(studies, tau2_methods[i]); }));
    if (tau2[i]) out.tau2_estimate[i] = tau2[i]->value;
  }

  const std::array<Tau2IntervalMethod, 3> tau2_ci{Tau2IntervalMethod::QP, Tau2IntervalMethod::PL,
                                                  Tau2IntervalMethod::FPC};
  for (std::size_t i = 0; i < tau2_ci.size(); ++i) {
    if (auto ci = attempt([&] { return tau2_interval(studies, tau2_ci[i], level); }))
      out.tau2_covered[i] = ci->lo <= cell.tau2 && cell.tau2 <= ci->hi;
  }

  // Inverse-variance estimates and intervals reuse DL, REML, MP (slots 0–2).
  for (std::size_t i = 0; i < 3; ++i) {
    if (!tau2[i]) continue;
    if (auto est = attempt([&] { return pool_iv(studies, *tau2[i]); }))
      out.delta_estimate[i] = est->value;
    if (auto ci = attempt([&] { return ci_iv_normal(studies, *tau2[i], level); }))
      out.delta_covered[i] = ci->contains(cell.delta);
  }
  if (auto est = attempt([&] { return pool_ssw(studies); })) out.delta_estimate[3] = est->value;
  if (tau2[0]) {
    if (auto ci = attempt([&] { return ci_hksj(studies, *tau2[0], level); }))
      out.delta_covered[3] = ci->contains(cell.delta);
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& t = tau2[3 + i];  // SMC, SSC
    if (!t) continue;
    if (auto ci = attempt([&] { return ci_ssw(studies, *t, level); }))
      out.delta_covered[4 + i] = ci->contains(cell.delta);
  }

  const std::array<HetApproximation, 2> tests{HetApproximation::ChiSq, HetApproximation::FSSW};
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (auto t = attempt([&] { return het_test(studies, tests[i]); })) out.p_value[i] = t->p_value;
  }
  return out;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  int ok = 0;
  int fail = 0;

  void add(const std::optional<double>& x) {
    if (!x) {
      ++fail;
      return;
    }
    sum += *x;
    sum_sq += *x * *x;
    ++ok;
  }
  double mean() const { return ok > 0 ? sum / ok : std::nan(""); }
  double standard_error() const {
    if (ok < 2) return std::nan("");
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - ok * m * m) / (ok - 1.0));
    return std::sqrt(var / ok);
  }
  double proportion_se() const {
    if (ok < 1) return std::nan("");
    const double p = mean();
    return std::sqrt(p * (1.0 - p) / ok);
  }
};

template <std::size_t N, typename Get>
std::array<Accumulator, N> accumulate(std::span<const ReplicateOutcome> outcomes, Get get) {
  std::array<Accumulator, N> acc{};
  for (const auto& o : outcomes) {
    const auto& slots = get(o);
    for (std::size_t i = 0; i < N; ++i) {
      const auto& s = slots[i];
      if (s) acc[i].add(static_cast<double>(*s)); else acc[i].add(std::nullopt);
    }
  }
  return acc;
}

}  // namespace

CellMetrics aggregate(const SimulationCell& cell, std::span<const ReplicateOutcome> outcomes) {
  CellMetrics m{cell, {}};
  auto push_bias = [&](const char* method, const char* metric, const Accumulator& a, double truth) {
    m.rows.push_back({method, metric, std::nullopt, a.mean() - truth, a.standard_error(), a.ok, a.fail});
  };
  auto push_rate = [&](const char* method, const char* metric, std::optional<double> alpha,
                       const Accumulator& a) {
    m.rows.push_back({method, metric, alpha, a.mean(), a.proportion_se(), a.ok, a.fail});
  };

  const auto tau2_est = accumulate<5>(outcomes, [](const auto& o) -> const auto& { return o.tau2_estimate; });
  for (std::size_t i = 0; i < 5; ++i) push_bias(kTau2Estimators[i], "tau2_bias", tau2_est[i], cell.tau2);

  const auto tau2_cov = accumulate<3>(outcomes, [](const auto& o) -> const auto& { return o.tau2_covered; });
  for (std::size_t i = 0; i < 3; ++i) push_rate(kTau2Intervals[i], "tau2_coverage", std::nullopt, tau2_cov[i]);

  const auto delta_est = accumulate<4>(outcomes, [](const auto& o) -> const auto& { return o.delta_estimate; });
  for (std::size_t i = 0; i < 4; ++i) push_bias(kDeltaEstimators[i], "delta_bias", delta_est[i], cell.delta);

  const auto delta_cov = accumulate<6>(outcomes, [](const auto& o) -> const auto& { return o.delta_covered; });
  for (std::size_t i = 0; i < 6; ++i) push_rate(kDeltaIntervals[i], "delta_coverage", std::nullopt, delta_cov[i]);

  for (std::size_t t = 0; t < kHetTests.size(); ++t) {
    for (double alpha : kNominalAlphas) {
      Accumulator a;
      for (const auto& o : outcomes) {
        const auto& p = o.p_value[t];
        a.add(p ? std::optional<double>(*p <= alpha ? 1.0 : 0.0) : std::nullopt);
      }
      if (cell.tau2 == 0.0) {
        push_rate(kHetTests[t], "empirical_level", alpha, a);
        m.rows.push_back({kHetTests[t], "relative_level_error", alpha, (a.mean() - alpha) / alpha,
                          a.proportion_se() / alpha, a.ok, a.fail});
      } else {
        push_rate(kHetTests[t], "rejection_rate", alpha, a);
      }
    }
  }
  return m;
}

CellMetrics run_cell(const SimulationCell& cell, int workers) {
  cell.validate();
  if (cell.reps < 100) throw DomainError("run_cell: reps must be at least 100");
  const auto reps = static_cast<std::size_t>(cell.reps);
  std::vector<ReplicateOutcome> outcomes(reps);
  auto work = [&](std::size_t start, std::size_t stride) {
    for (std::size_t r = start; r < reps; r += stride)
      outcomes[r] = analyze_replicate(generate_replicate(cell, r), cell);
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work, w, n_workers);
  }
  return aggregate(cell, outcomes);
}

std::vector<CellMetrics> run_grid(const std::vector<SimulationCell>& design, int workers) {
  if (design.empty()) throw DomainError("run_grid: design is empty");
  for (const auto& c : design) c.validate();
  std::vector<CellMetrics> out;
  out.reserve(design.size());
  for (const auto& c : design) out.push_back(run_cell(c, workers));
  return out;
}

std::vector<SimulationCell> design_grid(SizeRegime regime, int reps, std::uint64_t seed) {
  std::vector<SimulationCell> cells;
  cells.reserve(2100);
  const auto& sizes = regime == SizeRegime::Equal ? kGridEqualN : kGridUnequalMean;
  for (double delta_c : kGridDeltaC)
    for (double delta : kGridDelta)
      for (int n : sizes)
        for (int k : kGridK)
          for (double tau2 : kGridTau2) {
            SimulationCell c;
            c.k = k;
            c.sizes = {regime, n};
            c.delta_c = delta_c;
            c.delta = delta;
            c.tau2 = tau2;
            c.reps = reps;
            c.seed = seed;
            cells.push_back(c);
          }
  return cells;
}

const char* to_string(SizeRegime r) { return r == SizeRegime::Equal ? "equal" : "unequal"; }

}  // namespace dsmeta
