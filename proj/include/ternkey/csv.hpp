#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ternkey/experiments.hpp"

namespace ternkey {

/// Every experiment CSV starts with `# ternkey-csv v1 <kind>` followed by a
/// fixed header row.
inline constexpr int kCsvVersion = 1;

enum class CsvKind { Failure, Ber, DecoderCompare, Timing };

std::string csv_kind_name(CsvKind kind);
const std::vector<std::string>& csv_columns(CsvKind kind);

void write_failure_csv(std::ostream& out, const std::vector<FailureStats>& rows);
void write_ber_csv(std::ostream& out, const std::vector<BerPoint>& rows);
void write_decoder_compare_csv(std::ostream& out, const std::vector<DecoderComparePoint>& rows);
void write_timing_csv(std::ostream& out, const std::vector<TimingPoint>& rows);

struct CsvTable {
  CsvKind kind = CsvKind::Failure;
  std::vector<std::vector<std::string>> rows;

  /// Column by name as doubles; throws DataError on a non-numeric cell.
  std::vector<double> numeric(const std::string& column) const;
  std::vector<std::string> text(const std::string& column) const;
};

/// Throws DataError on a missing or unknown version line, a header that does
/// not match the kind, ragged rows, or an empty data section.
CsvTable read_csv_table(std::istream& in);

}  // namespace ternkey
