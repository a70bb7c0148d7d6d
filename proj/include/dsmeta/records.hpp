#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dsmeta/effects.hpp"
#include "dsmeta/simulation.hpp"

namespace dsmeta {

inline constexpr int kFormatVersion = 1;

/// Malformed input file; the message names the row and column.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StudyRecord {
  std::string study_id;
  StudyDsm dsm;
};

/// Reads study rows in either the raw schema
/// `study_id,n_t,mean_t,sd_t,n_c,mean_c,sd_c` or the precomputed schema
/// `study_id,g_t,n_t,g_c,n_c` (columns in any order, optional
/// `format_version` column).
std::vector<StudyRecord> read_studies_csv(std::istream& in);

/// Splits one CSV line; supports double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

/// Shortest round-trip decimal form, locale independent; "NA" for NaN.
std::string format_number(double x);

/// Locale-independent parse of a whole field; nullopt on any junk.
std::optional<double> parse_number(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

/// One line per (cell × method × metric), with a header.
void write_results_csv(std::ostream& out, const std::vector<CellMetrics>& results);
std::string results_csv_header();

/// Results rows as generic header→value maps (for summarize).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws InputError if absent
};

CsvTable read_csv_table(std::istream& in);

}  // namespace dsmeta
