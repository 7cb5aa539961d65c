#include "ternkey/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "ternkey/errors.hpp"

namespace ternkey {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void preamble(std::ostream& out, CsvKind kind) {
  out << "# ternkey-csv v" << kCsvVersion << ' ' << csv_kind_name(kind) << '\n';
  const auto& cols = csv_columns(kind);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string csv_kind_name(CsvKind kind) {
  switch (kind) {
    case CsvKind::Failure: return "failure";
    case CsvKind::Ber: return "ber";
    case CsvKind::DecoderCompare: return "decoder-compare";
    case CsvKind::Timing: return "timing";
  }
  return "?";
}

const std::vector<std::string>& csv_columns(CsvKind kind) {
  static const std::vector<std::string> failure{"p", "decoder", "trials", "failures", "failure_rate",
                                                "wilson95_upper", "mean_bch_corrections", "mean_decoder_iterations"};
  static const std::vector<std::string> ber{"p", "trials", "percent_key_error_legit", "percent_key_error_attacker"};
  static const std::vector<std::string> compare{"p", "decoder", "trials", "block_error_rate", "mean_runtime_us"};
  static const std::vector<std::string> timing{"decoder", "trials", "median_of_means_us"};
  switch (kind) {
    case CsvKind::Failure: return failure;
    case CsvKind::Ber: return ber;
    case CsvKind::DecoderCompare: return compare;
    case CsvKind::Timing: return timing;
  }
  return failure;
}

void write_failure_csv(std::ostream& out, const std::vector<FailureStats>& rows) {
  preamble(out, CsvKind::Failure);
  for (const auto& r : rows)
    out << num(r.p) << ',' << r.decoder << ',' << r.trials << ',' << r.failures << ',' << num(r.failure_rate) << ','
        << num(r.wilson95_upper) << ',' << num(r.mean_bch_corrections) << ',' << num(r.mean_decoder_iterations)
        << '\n';
}

void write_ber_csv(std::ostream& out, const std::vector<BerPoint>& rows) {
  preamble(out, CsvKind::Ber);
  for (const auto& r : rows)
    out << num(r.p) << ',' << r.trials << ',' << num(r.percent_key_error_legit) << ','
        << num(r.percent_key_error_attacker) << '\n';
}

void write_decoder_compare_csv(std::ostream& out, const std::vector<DecoderComparePoint>& rows) {
  preamble(out, CsvKind::DecoderCompare);
  for (const auto& r : rows)
    out << num(r.p) << ',' << r.decoder << ',' << r.trials << ',' << num(r.block_error_rate) << ','
        << num(r.mean_runtime_us) << '\n';
}

void write_timing_csv(std::ostream& out, const std::vector<TimingPoint>& rows) {
  preamble(out, CsvKind::Timing);
  for (const auto& r : rows) out << r.decoder << ',' << r.trials << ',' << num(r.median_of_means_us) << '\n';
}

std::vector<std::string> CsvTable::text(const std::string& column) const {
  const auto& cols = csv_columns(kind);
  std::size_t idx = 0;
  while (idx < cols.size() && cols[idx] != column) ++idx;
  if (idx == cols.size()) throw DataError("csv: no column '" + column + "'");
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

std::vector<double> CsvTable::numeric(const std::string& column) const {
  std::vector<double> out;
  for (const std::string& s : text(column)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw DataError("csv: column '" + column + "' has non-numeric value '" + s + "'");
    }
  }
  return out;
}

CsvTable read_csv_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty input");
  const std::string prefix = "# ternkey-csv v" + std::to_string(kCsvVersion) + " ";
  if (line.rfind(prefix, 0) != 0) throw DataError("csv: missing '# ternkey-csv v1 <kind>' line");
  const std::string kind_name = line.substr(prefix.size());
  CsvTable table;
  bool known = false;
  for (CsvKind k : {CsvKind::Failure, CsvKind::Ber, CsvKind::DecoderCompare, CsvKind::Timing})
    if (csv_kind_name(k) == kind_name) {
      table.kind = k;
      known = true;
    }
  if (!known) throw DataError("csv: unknown kind '" + kind_name + "'");

  const auto& cols = csv_columns(table.kind);
  if (!std::getline(in, line) || split(line) != cols) throw DataError("csv: header does not match kind " + kind_name);
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != cols.size())
      throw DataError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) + " fields");
    table.rows.push_back(std::move(cells));
  }
  if (table.rows.empty()) throw DataError("csv: no data rows");
  return table;
}

}  // namespace ternkey
