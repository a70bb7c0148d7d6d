#include "dsmeta/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "dsmeta/config.hpp"
#include "dsmeta/errors.hpp"
#include "dsmeta/heterogeneity.hpp"
#include "dsmeta/pooling.hpp"
#include "dsmeta/tau2.hpp"

namespace dsmeta {

using nlohmann::ordered_json;

namespace {

// Runs one method; on failure records the message and returns nullopt.
template <typename F>
auto guarded(F&& f, ordered_json& slot, int& ok, int& failed) -> std::optional<decltype(f())> {
  try {
    auto v = f();
    ++ok;
    return v;
  } catch (const std::exception& e) {
    slot["error"] = e.what();
    ++failed;
    return std::nullopt;
  }
}

}  // namespace

ordered_json analyze_report(const std::vector<StudyRecord>& records, double level,
                            bool* all_failed) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("--level must lie in (0,1)");
  std::vector<StudyDsm> studies;
  studies.reserve(records.size());
  for (const auto& r : records) studies.push_back(r.dsm);

  ordered_json report;
  report["format_version"] = kFormatVersion;
  report["level"] = level;
  report["k"] = studies.size();
  ordered_json rows = ordered_json::array();
  for (const auto& r : records) {
    const auto& s = r.dsm;
    rows.push_back({{"study_id", r.study_id},
                    {"n_t", s.n_t},
                    {"n_c", s.n_c},
                    {"g_t", s.g_t},
                    {"g_c", s.g_c},
                    {"d_hat", s.d_hat},
                    {"v2_hat", s.v2_hat},
                    {"n_tilde", s.n_tilde}});
  }
  report["studies"] = rows;

  int ok = 0, failed = 0;

  ordered_json q;
  for (auto [name, scheme] : {std::pair{"q_iv", WeightScheme::InverseVariance},
                              std::pair{"q_f", WeightScheme::EffectiveSampleSize}}) {
    ordered_json slot;
    if (auto r = guarded([&] { return cochran_q(studies, scheme); }, slot, ok, failed)) {
      slot["q"] = r->q;
      slot["weighted_mean"] = r->weighted_mean;
    }
    q[name] = slot;
  }
  report["q"] = q;

  ordered_json tests = ordered_json::array();
  for (auto a : {HetApproximation::ChiSq, HetApproximation::FSSW}) {
    ordered_json slot{{"approximation", to_string(a)}};
    if (auto t = guarded([&] { return het_test(studies, a); }, slot, ok, failed)) {
      slot["statistic"] = t->statistic;
      slot["p_value"] = t->p_value;
    }
    tests.push_back(slot);
  }
  report["heterogeneity_tests"] = tests;

  std::map<Tau2Method, Tau2Estimate> tau2;
  ordered_json tau2_json = ordered_json::array();
  for (auto m : {Tau2Method::DL, Tau2Method::REML, Tau2Method::MP, Tau2Method::SSC, Tau2Method::SMC}) {
    ordered_json slot{{"method", to_string(m)}};
    if (auto e = guarded([&] { return estimate_tau2(studies, m); }, slot, ok, failed)) {
      slot["value"] = e->value;
      slot["converged"] = e->converged;
      slot["truncated"] = e->truncated;
      tau2.emplace(m, *e);
    }
    tau2_json.push_back(slot);
  }
  report["tau2_estimates"] = tau2_json;

  ordered_json tau2_ci = ordered_json::array();
  for (auto m : {Tau2IntervalMethod::QP, Tau2IntervalMethod::PL, Tau2IntervalMethod::FPC}) {
    ordered_json slot{{"method", to_string(m)}};
    if (auto ci = guarded([&] { return tau2_interval(studies, m, level); }, slot, ok, failed)) {
      slot["lo"] = ci->lo;
      slot["hi"] = ci->hi;
      slot["level"] = ci->level;
    }
    tau2_ci.push_back(slot);
  }
  report["tau2_intervals"] = tau2_ci;

  auto needs = [&](Tau2Method m) -> const Tau2Estimate& {
    const auto it = tau2.find(m);
    if (it == tau2.end()) throw ConvergenceError(std::string("tau2 estimate ") + to_string(m) + " unavailable");
    if (!it->second.converged) throw ConvergenceError(std::string("tau2 estimate ") + to_string(m) + " did not converge");
    return it->second;
  };

  ordered_json delta_json = ordered_json::array();
  auto put_estimate = [&](const char* name, auto&& f) {
    ordered_json slot{{"method", name}};
    if (auto e = guarded(f, slot, ok, failed)) {
      slot["value"] = e->value;
      slot["se"] = e->se;
      slot["tau2_used"] = e->tau2_used;
    }
    delta_json.push_back(slot);
  };
  put_estimate("SSW", [&] { return pool_ssw(studies); });
  for (auto m : {Tau2Method::DL, Tau2Method::REML, Tau2Method::MP})
    put_estimate(to_string(m), [&] { return pool_iv(studies, needs(m)); });
  report["delta_estimates"] = delta_json;

  ordered_json delta_ci = ordered_json::array();
  auto put_interval = [&](const char* name, auto&& f) {
    ordered_json slot{{"method", name}};
    if (auto ci = guarded(f, slot, ok, failed)) {
      slot["center"] = ci->center;
      slot["lo"] = ci->lo;
      slot["hi"] = ci->hi;
      slot["level"] = ci->level;
    }
    delta_ci.push_back(slot);
  };
  for (auto m : {Tau2Method::DL, Tau2Method::REML, Tau2Method::MP})
    put_interval(to_string(m), [&] {
      if (studies.size() < 2) throw DomainError("intervals need at least two studies");
      return ci_iv_normal(studies, needs(m), level);
    });
  put_interval("HKSJ", [&] {
    if (studies.size() < 2) throw DomainError("intervals need at least two studies");
    return ci_hksj(studies, needs(Tau2Method::DL), level);
  });
  for (auto m : {Tau2Method::SMC, Tau2Method::SSC})
    put_interval(to_string(m), [&] {
      if (studies.size() < 2) throw DomainError("intervals need at least two studies");
      return ci_ssw(studies, needs(m), level);
    });
  report["delta_intervals"] = delta_ci;

  if (all_failed) *all_failed = ok == 0 && failed > 0;
  return report;
}

namespace {

std::string cell(const ordered_json& slot, const char* key) {
  if (slot.contains("error")) return "error";
  if (!slot.contains(key)) return "";
  const auto& v = slot[key];
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_number()) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(6) << v.get<double>();
    return s.str();
  }
  return v.dump();
}

void print_errors(std::ostream& out, const ordered_json& list) {
  for (const auto& slot : list)
    if (slot.contains("error"))
      out << "  ! " << slot.value("method", slot.value("approximation", std::string("?"))) << ": "
          << slot["error"].get<std::string>() << '\n';
}

}  // namespace

void write_analysis_text(std::ostream& out, const ordered_json& r) {
  out << "Studies (K = " << r["k"].get<int>() << ")\n";
  std::size_t id_width = 10;
  for (const auto& s : r["studies"])
    id_width = std::max(id_width, s["study_id"].get<std::string>().size() + 2);
  out << std::left << "  " << std::setw(static_cast<int>(id_width)) << "study" << std::setw(8) << "n_t" << std::setw(8) << "n_c"
      << std::setw(12) << "g_t" << std::setw(12) << "g_c" << std::setw(12) << "d_hat"
      << std::setw(12) << "v2_hat" << "n_tilde\n";
  for (const auto& s : r["studies"]) {
    out << "  " << std::setw(static_cast<int>(id_width)) << s["study_id"].get<std::string>() << std::setw(8)
        << s["n_t"].get<int>() << std::setw(8) << s["n_c"].get<int>() << std::setw(12)
        << cell(s, "g_t") << std::setw(12) << cell(s, "g_c") << std::setw(12) << cell(s, "d_hat")
        << std::setw(12) << cell(s, "v2_hat") << cell(s, "n_tilde") << '\n';
  }
  out << "\nHeterogeneity\n";
  out << "  Q_IV = " << cell(r["q"]["q_iv"], "q") << "   Q_F = " << cell(r["q"]["q_f"], "q") << '\n';
  for (const auto& t : r["heterogeneity_tests"])
    out << "  " << std::setw(8) << t["approximation"].get<std::string>()
        << "p = " << cell(t, "p_value") << '\n';
  print_errors(out, r["heterogeneity_tests"]);

  out << "\ntau^2 estimates\n";
  for (const auto& e : r["tau2_estimates"])
    out << "  " << std::setw(8) << e["method"].get<std::string>() << cell(e, "value") << '\n';
  print_errors(out, r["tau2_estimates"]);
  out << "\ntau^2 intervals (level " << r["level"].get<double>() << ")\n";
  for (const auto& e : r["tau2_intervals"])
    out << "  " << std::setw(8) << e["method"].get<std::string>() << "[" << cell(e, "lo") << ", "
        << cell(e, "hi") << "]\n";
  print_errors(out, r["tau2_intervals"]);

  out << "\nOverall effect\n";
  for (const auto& e : r["delta_estimates"])
    out << "  " << std::setw(8) << e["method"].get<std::string>() << std::setw(12) << cell(e, "value")
        << "se " << cell(e, "se") << '\n';
  print_errors(out, r["delta_estimates"]);
  out << "\nOverall effect intervals\n";
  for (const auto& e : r["delta_intervals"])
    out << "  " << std::setw(8) << e["method"].get<std::string>() << "[" << cell(e, "lo") << ", "
        << cell(e, "hi") << "]\n";
  print_errors(out, r["delta_intervals"]);
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(opt.input);
    if (!in) throw InputError("cannot open input file '" + opt.input + "'");
    const auto records = read_studies_csv(in);
    if (records.empty()) throw InputError("input contains no studies");
    bool all_failed = false;
    const auto report = analyze_report(records, opt.level, &all_failed);
    if (opt.json) out << report.dump(2) << '\n';
    else write_analysis_text(out, report);
    return all_failed ? kExitNumerical : kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    if (const auto v = parse_integer(env); v && *v >= 1 && *v <= 1024) return static_cast<int>(*v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<SimulationCell> design;
  try {
    std::ifstream in(opt.config);
    if (!in) throw InputError("cannot open config file '" + opt.config + "'");
    design = design_from_config(parse_config(in), {opt.seed, opt.reps});
    if (design.empty()) throw InputError("config selects no cells");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  const int workers = opt.workers.value_or(default_workers());
  const auto results = run_grid(design, workers);
  if (opt.out.empty()) {
    write_results_csv(out, results);
  } else {
    std::ofstream file(opt.out, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << opt.out << "'\n";
      return kExitInput;
    }
    write_results_csv(file, results);
  }
  // Numerical failure only if no replicate produced any metric at all.
  for (const auto& cm : results)
    for (const auto& r : cm.rows)
      if (r.n_ok > 0) return kExitOk;
  return kExitNumerical;
}

namespace {

const std::vector<std::string> kFacetKeys{"regime", "delta_c", "Delta", "n", "K", "tau2"};

struct Group {
  std::vector<std::string> key_fields;  // appendix, figure, panel, facets..., x, method, metric
  double sum = 0.0;
  double se_sq = 0.0;
  int count = 0;
  bool any_na = false;
};

}  // namespace

void summarize_results(const CsvTable& table, const std::string& facet, std::ostream& out) {
  std::vector<std::string> facets;
  {
    std::stringstream list(facet);
    std::string item;
    while (std::getline(list, item, ',')) {
      const auto b = item.find_first_not_of(' ');
      const auto e = item.find_last_not_of(' ');
      if (b == std::string::npos) continue;
      item = item.substr(b, e - b + 1);
      if (std::find(kFacetKeys.begin(), kFacetKeys.end(), item) == kFacetKeys.end())
        throw InputError("unknown facet key '" + item +
                         "' (valid: regime, delta_c, Delta, n, K, tau2)");
      if (std::find(facets.begin(), facets.end(), item) == facets.end()) facets.push_back(item);
    }
  }

  out << "format_version,appendix,figure,panel";
  for (const auto& f : facets) out << ',' << f;
  out << ",x_name,x_value,method,metric,value,mc_se,n_cells\n";
  if (table.header.empty()) return;

  std::map<std::string, std::size_t> col;
  for (const auto* name : {"regime", "K", "n", "delta_c", "Delta", "tau2", "method", "metric",
                           "alpha", "value", "mc_se"})
    col[name] = table.column(name);

  std::vector<Group> groups;
  std::map<std::vector<std::string>, std::size_t> index;

  for (const auto& row : table.rows) {
    const std::string& metric = row[col["metric"]];
    const std::string& alpha = row[col["alpha"]];
    std::string appendix, x_name;
    if (metric == "relative_level_error") {
      appendix = "A"; x_name = "alpha";
    } else if ((metric == "empirical_level" || metric == "rejection_rate") && alpha == "0.05") {
      appendix = "B"; x_name = "Delta";
    } else if (metric == "tau2_bias") {
      appendix = "C"; x_name = "tau2";
    } else if (metric == "tau2_coverage") {
      appendix = "D"; x_name = "tau2";
    } else if (metric == "delta_bias") {
      appendix = "E"; x_name = "tau2";
    } else if (metric == "delta_coverage") {
      appendix = "F"; x_name = "tau2";
    } else {
      continue;
    }
    const std::string x_value = x_name == "alpha" ? alpha : row[col[x_name]];

    auto facet_value = [&](const std::string& key) -> std::string {
      if (key == x_name) return "NA";
      return row[col[key]];
    };
    std::string figure, panel;
    auto add = [&](std::string& label, const std::string& key) {
      if (std::find(facets.begin(), facets.end(), key) == facets.end() || key == x_name) return;
      if (!label.empty()) label += ';';
      label += key + '=' + row[col[key]];
    };
    add(figure, "delta_c");
    add(figure, "Delta");
    add(panel, "regime");
    add(panel, "n");
    add(panel, "K");
    add(panel, "tau2");

    std::vector<std::string> key{appendix, figure, panel};
    for (const auto& f : facets) key.push_back(facet_value(f));
    key.push_back(x_name);
    key.push_back(x_value);
    key.push_back(row[col["method"]]);
    key.push_back(metric);

    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({key});
    auto& g = groups[it->second];
    const auto v = parse_number(row[col["value"]]);
    const auto se = parse_number(row[col["mc_se"]]);
    if (!v) {
      g.any_na = true;
    } else {
      g.sum += *v;
      g.se_sq += se ? *se * *se : 0.0;
    }
    ++g.count;
  }

  for (const auto& g : groups) {
    out << kFormatVersion;
    for (const auto& f : g.key_fields) out << ',' << f;
    const int used = g.count;
    if (g.any_na) {
      out << ",NA,NA," << used << '\n';
    } else {
      out << ',' << format_number(g.sum / used) << ',' << format_number(std::sqrt(g.se_sq) / used)
          << ',' << used << '\n';
    }
  }
}

int cmd_summarize(const SummarizeOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(opt.results);
    if (!in) throw InputError("cannot open results file '" + opt.results + "'");
    const auto table = read_csv_table(in);
    if (opt.out.empty()) {
      summarize_results(table, opt.facet, out);
    } else {
      std::ostringstream buffer;
      summarize_results(table, opt.facet, buffer);
      std::ofstream file(opt.out, std::ios::binary);
      if (!file) throw InputError("cannot write '" + opt.out + "'");
      file << buffer.str();
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace dsmeta
