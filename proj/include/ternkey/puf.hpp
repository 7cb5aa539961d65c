#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ternkey/bits.hpp"

namespace ternkey {

struct Cell {
  int cell_id = 0;
  std::vector<double> readings;  // R_on in ohms, ordered by reading index
};

enum class PopulationShape { Normal, Uniform };

struct SyntheticParams {
  double pop_mean = 3000.0;  // ohms
  double pop_sd = 600.0;
  double read_sd = 60.0;
  PopulationShape shape = PopulationShape::Uniform;
};

struct SyntheticSource {
  std::uint64_t seed = 0;
  SyntheticParams params;
  std::vector<double> true_means;  // per-cell location the readings scatter around
};

struct CellMeasurementSet {
  std::vector<Cell> cells;
  std::optional<SyntheticSource> synthetic;  // empty for measured data

  std::size_t num_readings() const;  // minimum over cells
};

struct Thresholds {
  double t1 = 0.0;
  double t2 = 0.0;
  double midpoint() const { return 0.5 * (t1 + t2); }
};

enum class CellState : std::uint8_t { Zero, X, One };

struct TernaryProfile {
  double t1 = 0.0;
  double t2 = 0.0;
  std::vector<CellState> states;
  std::vector<std::uint16_t> mask;  // indices into CellMeasurementSet::cells with state != X
};

struct PufResponse {
  Bits bits;
  std::uint32_t mask_checksum = 0;

  bool operator==(const PufResponse&) const = default;
};

/// Splits the pooled [min, max] reading range into equal thirds.
Thresholds compute_thresholds(const CellMeasurementSet& set);

/// Reference value per cell is the mean of its readings: below t1 -> Zero,
/// within [t1, t2] -> X, above t2 -> One.
TernaryProfile classify_cells(const CellMeasurementSet& set, double t1, double t2);

/// Bits of the first `width` masked cells read at `reading_index`, using the
/// band midpoint (t1 + t2) / 2 as the decision level so reads that drift into
/// the X band still produce a bit.
PufResponse extract_response(const CellMeasurementSet& set, const TernaryProfile& profile,
                             std::size_t reading_index, std::size_t width);

/// Bits of the first `width` masked cells taken from their ternary states.
PufResponse reference_response(const TernaryProfile& profile, std::size_t width);

/// CRC32 over the first `width` mask entries (little-endian u16).
std::uint32_t mask_checksum(std::span<const std::uint16_t> mask, std::size_t width);

CellMeasurementSet simulate_cells(std::size_t num_cells, std::size_t num_readings,
                                  const SyntheticParams& params, std::uint64_t seed);

/// Flips every bit independently with probability p. Uses one uniform draw
/// per bit, so for a fixed seed the flipped set grows monotonically in p.
PufResponse flip_bits(const PufResponse& response, double p, std::uint64_t seed);

/// Uniformly random response conditioned on Hamming distance to `reference`
/// of at least ceil(min_inter_hd * width).
PufResponse make_attacker_response(std::size_t width, const PufResponse& reference,
                                   double min_inter_hd, std::uint64_t seed);

/// CSV with header `cell_id,reading_index,r_on_ohms[,v_set_volts]`. The
/// optional V_set column is accepted and ignored.
CellMeasurementSet read_measurement_csv(std::istream& in);
void write_measurement_csv(std::ostream& out, const CellMeasurementSet& set);

}  // namespace ternkey
