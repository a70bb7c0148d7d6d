// Command-line front end: analyze, simulate, summarize.

#include <iostream>

#include <CLI11.hpp>

#include "dsmeta/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Meta-analysis of the difference of standardized means"};
  app.require_subcommand(1);

  dsmeta::AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Analyze a CSV file of studies");
  a->add_option("input", analyze.input, "Study CSV file")->required();
  a->add_option("--level", analyze.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  a->add_flag("--json", analyze.json, "Emit JSON instead of text tables");

  dsmeta::SimulateOptions simulate;
  std::uint64_t seed = 0;
  int reps = 0, workers = 0;
  auto* s = app.add_subcommand("simulate", "Run a simulation design");
  s->add_option("config", simulate.config, "Design configuration file")->required();
  auto* seed_opt = s->add_option("--seed", seed, "Override the configured seed");
  auto* reps_opt = s->add_option("--reps", reps, "Override the configured repetitions");
  auto* workers_opt =
      s->add_option("--workers", workers, "Worker threads (default: $DSMETA_WORKERS or all cores)")
          ->check(CLI::PositiveNumber);
  s->add_option("--out", simulate.out, "Results CSV (default: standard output)");

  dsmeta::SummarizeOptions summarize;
  auto* m = app.add_subcommand("summarize", "Turn simulation results into plot-ready tables");
  m->add_option("results", summarize.results, "Results CSV from 'simulate'")->required();
  m->add_option("--facet", summarize.facet, "Comma-separated facet keys")->capture_default_str();
  m->add_option("--out", summarize.out, "Output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dsmeta::kExitInput;
  }

  std::cout.imbue(std::locale::classic());
  if (*a) return dsmeta::cmd_analyze(analyze, std::cout, std::cerr);
  if (*s) {
    if (*seed_opt) simulate.seed = seed;
    if (*reps_opt) simulate.reps = reps;
    if (*workers_opt) simulate.workers = workers;
    return dsmeta::cmd_simulate(simulate, std::cout, std::cerr);
  }
  return dsmeta::cmd_summarize(summarize, std::cout, std::cerr);
}
