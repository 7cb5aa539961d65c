#include "ternkey/puf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ternkey/digest.hpp"
#include "ternkey/errors.hpp"
#include "ternkey/rng.hpp"

namespace ternkey {

std::size_t CellMeasurementSet::num_readings() const {
  if (cells.empty()) return 0;
  std::size_t r = std::numeric_limits<std::size_t>::max();
  for (const Cell& c : cells) r = std::min(r, c.readings.size());
  return r;
}

Thresholds compute_thresholds(const CellMeasurementSet& set) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t count = 0;
  for (const Cell& c : set.cells)
    for (double r : c.readings) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ++count;
    }
  if (count == 0) throw DataError("compute_thresholds: no readings");
  if (!(hi > lo)) throw DataError("compute_thresholds: all readings equal, range is degenerate");
  const double third = (hi - lo) / 3.0;
  return {lo + third, lo + 2.0 * third};
}

TernaryProfile classify_cells(const CellMeasurementSet& set, double t1, double t2) {
  if (!(t1 < t2)) throw std::invalid_argument("classify_cells: need t1 < t2");
  if (set.cells.size() > 65536) throw DataError("classify_cells: more than 65536 cells");
  TernaryProfile prof;
  prof.t1 = t1;
  prof.t2 = t2;
  prof.states.reserve(set.cells.size());
  for (std::size_t i = 0; i < set.cells.size(); ++i) {
    const auto& r = set.cells[i].readings;
    if (r.empty()) throw DataError("classify_cells: cell " + std::to_string(set.cells[i].cell_id) + " has no readings");
    double sum = 0.0;
    for (double v : r) sum += v;
    const double mean = sum / static_cast<double>(r.size());
    CellState s = mean < t1 ? CellState::Zero : mean > t2 ? CellState::One : CellState::X;
    prof.states.push_back(s);
    if (s != CellState::X) prof.mask.push_back(static_cast<std::uint16_t>(i));
  }
  return prof;
}

std::uint32_t mask_checksum(std::span<const std::uint16_t> mask, std::size_t width) {
  width = std::min(width, mask.size());
  std::vector<std::uint8_t> bytes;
  bytes.reserve(2 * width);
  for (std::size_t i = 0; i < width; ++i) {
    bytes.push_back(static_cast<std::uint8_t>(mask[i] & 0xff));
    bytes.push_back(static_cast<std::uint8_t>(mask[i] >> 8));
  }
  return crc32(bytes);
}

PufResponse extract_response(const CellMeasurementSet& set, const TernaryProfile& profile,
                             std::size_t reading_index, std::size_t width) {
  if (width > profile.mask.size())
    throw DataError("extract_response: need " + std::to_string(width) + " stable cells, only " +
                    std::to_string(profile.mask.size()) + " available");
  const double level = 0.5 * (profile.t1 + profile.t2);
  PufResponse out;
  out.bits.reserve(width);
  for (std::size_t j = 0; j < width; ++j) {
    const std::size_t idx = profile.mask[j];
    if (idx >= set.cells.size()) throw DataError("extract_response: mask entry beyond the cell set");
    const auto& r = set.cells[idx].readings;
    if (reading_index >= r.size())
      throw DataError("extract_response: cell " + std::to_string(set.cells[idx].cell_id) + " has no reading " +
                      std::to_string(reading_index));
    out.bits.push_back(r[reading_index] > level ? 1 : 0);
  }
  out.mask_checksum = mask_checksum(profile.mask, width);
  return out;
}

PufResponse reference_response(const TernaryProfile& profile, std::size_t width) {
  if (width > profile.mask.size())
    throw DataError("reference_response: need " + std::to_string(width) + " stable cells, only " +
                    std::to_string(profile.mask.size()) + " available");
  PufResponse out;
  out.bits.reserve(width);
  for (std::size_t j = 0; j < width; ++j) out.bits.push_back(profile.states[profile.mask[j]] == CellState::One);
  out.mask_checksum = mask_checksum(profile.mask, width);
  return out;
}

CellMeasurementSet simulate_cells(std::size_t num_cells, std::size_t num_readings, const SyntheticParams& params,
                                  std::uint64_t seed) {
  if (!(params.pop_mean > 0) || !(params.pop_sd > 0) || !(params.read_sd >= 0))
    throw std::invalid_argument("simulate_cells: parameters must be positive");
  if (num_readings == 0) throw std::invalid_argument("simulate_cells: need at least one reading per cell");

  CellMeasurementSet set;
  SyntheticSource src{seed, params, {}};
  set.cells.resize(num_cells);
  src.true_means.resize(num_cells);
  const double half_width = std::sqrt(3.0) * params.pop_sd;
  for (std::size_t i = 0; i < num_cells; ++i) {
    Rng rng = Rng(seed).split(i);
    std::normal_distribution<double> unit(0.0, 1.0);
    double mean;
    do {
      mean = params.shape == PopulationShape::Normal ? params.pop_mean + params.pop_sd * unit(rng)
                                                     : params.pop_mean + half_width * (2.0 * rng.uniform() - 1.0);
    } while (mean <= 0.0);
    src.true_means[i] = mean;
    Cell& c = set.cells[i];
    c.cell_id = static_cast<int>(i);
    c.readings.resize(num_readings);
    for (double& r : c.readings) {
      if (params.read_sd == 0.0) {
        r = mean;
        continue;
      }
      do r = mean + params.read_sd * unit(rng);
      while (r <= 0.0);
    }
  }
  set.synthetic = std::move(src);
  return set;
}

PufResponse flip_bits(const PufResponse& response, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("flip_bits: p outside [0, 1]");
  PufResponse out = response;
  Rng rng(seed);
  for (auto& b : out.bits)
    if (rng.uniform() < p) b ^= 1U;
  return out;
}

PufResponse make_attacker_response(std::size_t width, const PufResponse& reference, double min_inter_hd,
                                   std::uint64_t seed) {
  if (!(min_inter_hd >= 0.0 && min_inter_hd <= 1.0))
    throw std::invalid_argument("make_attacker_response: min_inter_hd outside [0, 1]");
  if (reference.bits.size() != width) throw std::invalid_argument("make_attacker_response: width mismatch");
  const auto dmin = static_cast<std::size_t>(std::ceil(min_inter_hd * static_cast<double>(width) - 1e-9));

  // Distance d is drawn with weight C(width, d); then a uniform d-subset flips.
  Rng rng(seed);
  std::vector<double> weights(width + 1, 0.0);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t d = dmin; d <= width; ++d) {
    weights[d] = std::lgamma(width + 1.0) - std::lgamma(d + 1.0) - std::lgamma(width - d + 1.0);
    top = std::max(top, weights[d]);
  }
  for (std::size_t d = dmin; d <= width; ++d) weights[d] = std::exp(weights[d] - top);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  const std::size_t d = pick(rng);

  std::vector<std::size_t> idx(width);
  for (std::size_t i = 0; i < width; ++i) idx[i] = i;
  PufResponse out = reference;
  for (std::size_t j = 0; j < d; ++j) {
    std::uniform_int_distribution<std::size_t> u(j, width - 1);
    std::swap(idx[j], idx[u(rng)]);
    out.bits[idx[j]] ^= 1U;
  }
  return out;
}

CellMeasurementSet read_measurement_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::map<int, std::map<long, double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      if (line != "cell_id,reading_index,r_on_ohms" && line != "cell_id,reading_index,r_on_ohms,v_set_volts")
        throw DataError("measurement csv: unexpected header '" + line + "'");
      have_header = true;
      continue;
    }
    std::istringstream fields(line);
    std::string a, b, c;
    if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') || !std::getline(fields, c, ','))
      throw DataError("measurement csv line " + std::to_string(lineno) + ": expected at least 3 fields");
    int cell;
    long reading;
    double r_on;
    try {
      std::size_t pa, pb, pc;
      cell = std::stoi(a, &pa);
      reading = std::stol(b, &pb);
      r_on = std::stod(c, &pc);
      if (pa != a.size() || pb != b.size() || pc != c.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError("measurement csv line " + std::to_string(lineno) + ": malformed number");
    }
    if (!(r_on > 0.0) || !std::isfinite(r_on))
      throw DataError("measurement csv line " + std::to_string(lineno) + ": r_on must be positive");
    if (reading < 0) throw DataError("measurement csv line " + std::to_string(lineno) + ": negative reading index");
    if (!rows[cell].emplace(reading, r_on).second)
      throw DataError("measurement csv line " + std::to_string(lineno) + ": duplicate reading for cell " +
                      std::to_string(cell));
  }
  if (!have_header) throw DataError("measurement csv: missing header");
  if (rows.empty()) throw DataError("measurement csv: no data rows");

  CellMeasurementSet set;
  for (auto& [cell, readings] : rows) {
    Cell c;
    c.cell_id = cell;
    long expect = 0;
    for (auto& [index, value] : readings) {
      if (index != expect)
        throw DataError("measurement csv: cell " + std::to_string(cell) + " is missing reading " +
                        std::to_string(expect));
      c.readings.push_back(value);
      ++expect;
    }
    set.cells.push_back(std::move(c));
  }
  return set;
}

void write_measurement_csv(std::ostream& out, const CellMeasurementSet& set) {
  out << "cell_id,reading_index,r_on_ohms\n";
  char buf[64];
  for (const Cell& c : set.cells)
    for (std::size_t r = 0; r < c.readings.size(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", c.readings[r]);
      out << c.cell_id << ',' << r << ',' << buf << '\n';
    }
}

}  // namespace ternkey
