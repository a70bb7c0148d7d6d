#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsmeta/simulation.hpp"

namespace dsmeta {

/// Flat `key = value` configuration; list values are comma separated, `#`
/// starts a comment. See docs/config.md for the grammar and keys.
using ConfigMap = std::map<std::string, std::vector<std::string>>;

ConfigMap parse_config(std::istream& in);

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
};

/// Expands a configuration into the full factorial list of cells. Missing
/// parameter keys default to their complete standard-grid value sets.
std::vector<SimulationCell> design_from_config(const ConfigMap& config,
                                               const ConfigOverrides& overrides = {});

}  // namespace dsmeta
