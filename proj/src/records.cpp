#include "dsmeta/records.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace dsmeta {

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::vector<StudyRecord> read_studies_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty() && trim(line).front() != '#') {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw InputError("input: missing header row");

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(trim(header[i]));
    if (!col.emplace(name, i).second) throw InputError("input: duplicate column '" + name + "'");
  }
  const std::set<std::string> raw{"study_id", "n_t", "mean_t", "sd_t", "n_c", "mean_c", "sd_c"};
  const std::set<std::string> pre{"study_id", "g_t", "n_t", "g_c", "n_c"};
  std::set<std::string> present;
  for (const auto& [name, idx] : col)
    if (name != "format_version") present.insert(name);
  bool is_raw;
  if (present == raw) {
    is_raw = true;
  } else if (present == pre) {
    is_raw = false;
  } else {
    throw InputError(
        "input: header must be 'study_id,n_t,mean_t,sd_t,n_c,mean_c,sd_c' or "
        "'study_id,g_t,n_t,g_c,n_c'");
  }

  std::vector<StudyRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto fields = split_csv_line(line);
    const std::string where = "row " + std::to_string(line_no);
    if (fields.size() != header.size())
      throw InputError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    auto real = [&](const char* name) {
      const auto v = parse_number(fields[col.at(name)]);
      if (!v) throw InputError(where + ", column " + name + ": not a finite number '" + fields[col.at(name)] + "'");
      return *v;
    };
    auto count = [&](const char* name) {
      const auto v = parse_integer(fields[col.at(name)]);
      if (!v) throw InputError(where + ", column " + name + ": not an integer '" + fields[col.at(name)] + "'");
      if (*v < kMinArmSize)
        throw InputError(where + ", column " + name + ": arm size must be at least " +
                         std::to_string(kMinArmSize));
      if (*v > 1'000'000'000) throw InputError(where + ", column " + name + ": arm size too large");
      return static_cast<int>(*v);
    };
    if (auto it = col.find("format_version"); it != col.end()) {
      const auto v = parse_integer(fields[it->second]);
      if (!v || *v != kFormatVersion)
        throw InputError(where + ", column format_version: unsupported version '" + fields[it->second] + "'");
    }
    StudyRecord rec;
    rec.study_id = std::string(trim(fields[col.at("study_id")]));
    try {
      if (is_raw) {
        const ArmSummary t{count("n_t"), real("mean_t"), real("sd_t")};
        const ArmSummary c{count("n_c"), real("mean_c"), real("sd_c")};
        if (!(t.sd > 0)) throw InputError(where + ", column sd_t: must be positive");
        if (!(c.sd > 0)) throw InputError(where + ", column sd_c: must be positive");
        rec.dsm = study_dsm(t, c);
      } else {
        rec.dsm = study_dsm_from_g(real("g_t"), count("n_t"), real("g_c"), count("n_c"));
      }
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError(where + ": " + e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string results_csv_header() {
  return "format_version,regime,K,n,delta_c,Delta,tau2,level,reps,seed,method,metric,alpha,value,"
         "mc_se,n_ok,n_fail";
}

void write_results_csv(std::ostream& out, const std::vector<CellMetrics>& results) {
  out << results_csv_header() << '\n';
  for (const auto& cm : results) {
    const auto& c = cm.cell;
    const std::string prefix = std::to_string(kFormatVersion) + ',' + to_string(c.sizes.regime) +
                               ',' + std::to_string(c.k) + ',' + std::to_string(c.sizes.value) +
                               ',' + format_number(c.delta_c) + ',' + format_number(c.delta) + ',' +
                               format_number(c.tau2) + ',' + format_number(c.level) + ',' +
                               std::to_string(c.reps) + ',' + std::to_string(c.seed) + ',';
    for (const auto& r : cm.rows) {
      out << prefix << csv_escape(r.method) << ',' << r.metric << ','
          << (r.alpha ? format_number(*r.alpha) : std::string("NA")) << ',' << format_number(r.value)
          << ',' << format_number(r.mc_se) << ',' << r.n_ok << ',' << r.n_fail << '\n';
    }
  }
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw InputError("missing column '" + std::string(name) + "'");
}

CsvTable read_csv_table(std::istream& in) {
  CsvTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (t.header.empty()) {
      for (auto& f : fields) f = std::string(trim(f));
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw InputError("row " + std::to_string(line_no) + ": expected " +
                       std::to_string(t.header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

}  // namespace dsmeta
