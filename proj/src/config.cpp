#include "dsmeta/config.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>

#include "dsmeta/errors.hpp"
#include "dsmeta/records.hpp"

namespace dsmeta {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::set<std::string> kKeys{"format_version", "regime", "K", "n", "nbar", "delta_c",
                                  "Delta", "tau2", "f", "reps", "seed", "level"};

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

std::vector<double> reals(const ConfigMap& cfg, const std::string& key,
                          std::vector<double> fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::vector<double> out;
  for (const auto& v : it->second) {
    const auto x = parse_number(v);
    if (!x)
      throw DomainError("config key '" + key + "': '" + v + "' is not a number (standard grid values: " +
                        join(fallback) + ")");
    out.push_back(*x);
  }
  return out;
}

std::vector<long long> integers(const ConfigMap& cfg, const std::string& key,
                                std::vector<long long> fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::vector<long long> out;
  for (const auto& v : it->second) {
    const auto x = parse_integer(v);
    if (!x)
      throw DomainError("config key '" + key + "': '" + v +
                        "' is not an integer (standard grid values: " + join(fallback) + ")");
    out.push_back(*x);
  }
  return out;
}

long long single_integer(const ConfigMap& cfg, const std::string& key, long long fallback) {
  const auto v = integers(cfg, key, {fallback});
  if (v.size() != 1) throw DomainError("config key '" + key + "' takes a single value");
  return v.front();
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
  ConfigMap cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!kKeys.contains(key))
      throw DomainError("config line " + std::to_string(line_no) + ": unknown key '" + key +
                        "' (known: " + join(kKeys) + ")");
    std::vector<std::string> values;
    std::stringstream list(line.substr(eq + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
      item = trim(item);
      if (item.empty())
        throw DomainError("config line " + std::to_string(line_no) + ": empty list element");
      values.push_back(item);
    }
    if (values.empty())
      throw DomainError("config line " + std::to_string(line_no) + ": missing value for '" + key + "'");
    if (!cfg.emplace(key, std::move(values)).second)
      throw DomainError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  return cfg;
}

std::vector<SimulationCell> design_from_config(const ConfigMap& cfg, const ConfigOverrides& ov) {
  if (single_integer(cfg, "format_version", kFormatVersion) != kFormatVersion)
    throw DomainError("config: unsupported format_version");

  std::vector<SizeRegime> regimes;
  if (auto it = cfg.find("regime"); it != cfg.end()) {
    for (const auto& r : it->second) {
      if (r == "equal") regimes.push_back(SizeRegime::Equal);
      else if (r == "unequal") regimes.push_back(SizeRegime::Unequal);
      else throw DomainError("config key 'regime': '" + r + "' is invalid (valid: equal, unequal)");
    }
  } else {
    // Infer from the size keys, defaulting to equal sizes.
    if (cfg.contains("n") || !cfg.contains("nbar")) regimes.push_back(SizeRegime::Equal);
    if (cfg.contains("nbar")) regimes.push_back(SizeRegime::Unequal);
  }

  const auto ks = integers(cfg, "K", {kGridK.begin(), kGridK.end()});
  const auto ns = integers(cfg, "n", {kGridEqualN.begin(), kGridEqualN.end()});
  const auto nbars = integers(cfg, "nbar", {kGridUnequalMean.begin(), kGridUnequalMean.end()});
  const auto delta_cs = reals(cfg, "delta_c", {kGridDeltaC.begin(), kGridDeltaC.end()});
  const auto deltas = reals(cfg, "Delta", {kGridDelta.begin(), kGridDelta.end()});
  const auto tau2s = reals(cfg, "tau2", {kGridTau2.begin(), kGridTau2.end()});
  const auto fs = reals(cfg, "f", {0.5});
  const auto levels = reals(cfg, "level", {0.95});
  if (fs.size() != 1 || levels.size() != 1)
    throw DomainError("config keys 'f' and 'level' take a single value");

  const long long reps = ov.reps ? *ov.reps : single_integer(cfg, "reps", 2000);
  const long long seed = ov.seed ? static_cast<long long>(*ov.seed) : single_integer(cfg, "seed", 1);
  if (reps < 100) throw DomainError("reps must be at least 100");
  if (reps > 100'000'000) throw DomainError("reps too large");

  std::vector<SimulationCell> cells;
  for (auto regime : regimes) {
    const auto& sizes = regime == SizeRegime::Equal ? ns : nbars;
    for (double delta_c : delta_cs)
      for (double delta : deltas)
        for (long long n : sizes)
          for (long long k : ks)
            for (double tau2 : tau2s) {
              if (n < 1 || n > 1'000'000 || k < 1 || k > 100'000)
                throw DomainError("config: sizes out of range (standard grid: K = 5, 10, 30; n = 20, 40, "
                                  "100, 250; nbar = 30, 60, 100, 160)");
              SimulationCell c;
              c.k = static_cast<int>(k);
              c.sizes = {regime, static_cast<int>(n)};
              c.f = fs.front();
              c.delta_c = delta_c;
              c.delta = delta;
              c.tau2 = tau2;
              c.reps = static_cast<int>(reps);
              c.seed = ov.seed ? *ov.seed : static_cast<std::uint64_t>(seed);
              c.level = levels.front();
              c.validate();
              cells.push_back(c);
            }
  }
  return cells;
}

}  // namespace dsmeta
