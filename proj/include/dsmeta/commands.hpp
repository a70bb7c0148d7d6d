#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsmeta/records.hpp"

namespace dsmeta {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitNumerical = 2 };

/// Environment variable holding the default simulation worker count.
inline constexpr const char* kWorkersEnv = "DSMETA_WORKERS";

struct AnalyzeOptions {
  std::string input;
  double level = 0.95;
  bool json = false;
};

struct SimulateOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<int> workers;
  std::string out;  // empty: standard output
};

struct SummarizeOptions {
  std::string results;
  std::string facet = "regime,delta_c,Delta,n,K";
  std::string out;
};

/// Full analysis of a set of studies. Methods that fail carry an "error"
/// field instead of values; `all_failed` is set when every method failed.
nlohmann::ordered_json analyze_report(const std::vector<StudyRecord>& studies, double level,
                                      bool* all_failed = nullptr);

void write_analysis_text(std::ostream& out, const nlohmann::ordered_json& report);

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_summarize(const SummarizeOptions& opt, std::ostream& out, std::ostream& err);

/// Long-format plot table from a results table; facets from
/// {regime, delta_c, Delta, n, K, tau2}. Throws InputError on unknown keys.
void summarize_results(const CsvTable& results, const std::string& facet, std::ostream& out);

int default_workers();

}  // namespace dsmeta
