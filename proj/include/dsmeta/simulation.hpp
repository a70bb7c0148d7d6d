#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsmeta/effects.hpp"
#include "dsmeta/rng.hpp"

namespace dsmeta {

enum class SizeRegime { Equal, Unequal };

/// Study total sizes: a common n, or one of the unequal five-study patterns
/// identified by its mean n̄ and repeated K/5 times.
struct SizeDesign {
  SizeRegime regime;
  int value;  // n (equal) or n̄ (unequal)
};

inline constexpr std::array<int, 3> kGridK{5, 10, 30};
inline constexpr std::array<int, 4> kGridEqualN{20, 40, 100, 250};
inline constexpr std::array<int, 4> kGridUnequalMean{30, 60, 100, 160};
inline constexpr std::array<double, 5> kGridDeltaC{-2.5, -1.0, 0.0, 1.0, 2.5};
inline constexpr std::array<double, 7> kGridDelta{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
inline constexpr std::array<double, 5> kGridTau2{0.0, 0.1, 0.5, 1.0, 1.5};
inline constexpr std::array<double, 6> kNominalAlphas{0.005, 0.01, 0.05, 0.1, 0.25, 0.5};

/// The five unequal total sizes with mean n̄; throws for unknown n̄.
std::array<int, 5> unequal_pattern(int mean_size);

struct SimulationCell {
  int k = 10;
  SizeDesign sizes{SizeRegime::Equal, 100};
  double f = 0.5;  // control-arm fraction
  double delta_c = 0.0;
  double delta = 0.0;
  double tau2 = 0.0;
  int reps = 2000;
  std::uint64_t seed = 1;
  double level = 0.95;

  /// Validates the cell; throws DomainError naming the valid values.
  void validate() const;
  /// Total size of each of the K studies.
  std::vector<int> study_sizes() const;
  /// Stable identity of the parameter combination (excludes reps and seed).
  std::uint64_t key() const;
};

/// One replicate: K studies with true effects Δₖ ~ N(Δ, τ²) and arm-level
/// corrected standardized means drawn from scaled noncentral t laws.
std::vector<StudyDsm> generate_replicate(const SimulationCell& cell, std::uint64_t rep_index);

// Estimator slots, in output order.
inline constexpr std::array<const char*, 5> kTau2Estimators{"DL", "REML", "MP", "SMC", "SSC"};
inline constexpr std::array<const char*, 3> kTau2Intervals{"QP", "PL", "FPC"};
inline constexpr std::array<const char*, 4> kDeltaEstimators{"DL", "REML", "MP", "SSW"};
inline constexpr std::array<const char*, 6> kDeltaIntervals{"DL", "REML", "MP", "HKSJ", "SMC", "SSC"};
inline constexpr std::array<const char*, 2> kHetTests{"ChiSq", "FSSW"};

/// Everything computed on one replicate; empty slots are failures.
struct ReplicateOutcome {
  std::array<std::optional<double>, 5> tau2_estimate;
  std::array<std::optional<bool>, 3> tau2_covered;
  std::array<std::optional<double>, 4> delta_estimate;
  std::array<std::optional<bool>, 6> delta_covered;
  std::array<std::optional<double>, 2> p_value;
};

ReplicateOutcome analyze_replicate(const std::vector<StudyDsm>& studies, const SimulationCell& cell);

struct MetricRow {
  std::string method;
  std::string metric;  // tau2_bias, tau2_coverage, delta_bias, delta_coverage,
                       // empirical_level, relative_level_error, rejection_rate
  std::optional<double> alpha;
  double value;
  double mc_se;
  int n_ok;
  int n_fail;
};

struct CellMetrics {
  SimulationCell cell;
  std::vector<MetricRow> rows;
};

/// Reduces replicate outcomes in index order.
CellMetrics aggregate(const SimulationCell& cell, std::span<const ReplicateOutcome> outcomes);

/// Runs all replicates of a cell; the result does not depend on `workers`.
CellMetrics run_cell(const SimulationCell& cell, int workers = 1);

std::vector<CellMetrics> run_grid(const std::vector<SimulationCell>& design, int workers = 1);

/// Full factorial standard design for one size regime (2100 cells).
std::vector<SimulationCell> design_grid(SizeRegime regime, int reps, std::uint64_t seed);

const char* to_string(SizeRegime r);

}  // namespace dsmeta
