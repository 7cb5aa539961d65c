#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ternkey/fuzzy.hpp"
#include "ternkey/polar.hpp"
#include "ternkey/puf.hpp"

namespace ternkey {

struct ExperimentSpec {
  std::vector<double> p_values{0.15};
  std::size_t trials = 1000;
  std::vector<DecoderConfig> decoders{DecoderConfig{}};
  std::uint64_t seed = 1;

  double channel_p = 0.15;  // flip rate the decoder assumes
  RegenMode mode = RegenMode::Principled;
  double parity_llr_scale = 0.0;
  double attacker_min_hd = 0.4;
  Embedding embedding = Embedding::InformationSet;

  std::size_t num_cells = 254;
  std::size_t num_readings = 102;
  SyntheticParams synthetic;

  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct FailureStats {
  double p = 0.0;
  std::string decoder;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double failure_rate = 0.0;
  double wilson95_upper = 0.0;
  double mean_bch_corrections = 0.0;
  double mean_decoder_iterations = 0.0;
};

struct BerPoint {
  double p = 0.0;
  std::size_t trials = 0;
  double percent_key_error_legit = 0.0;
  double percent_key_error_attacker = 0.0;
  std::size_t legit_failures = 0;
  std::size_t attacker_matches = 0;
};

struct DecoderComparePoint {
  double p = 0.0;
  std::string decoder;
  std::size_t trials = 0;
  std::size_t block_errors = 0;
  double block_error_rate = 0.0;
  double mean_runtime_us = 0.0;
};

struct TimingPoint {
  std::string decoder;
  std::size_t trials = 0;
  double median_of_means_us = 0.0;
};

/// One-sided 95% Wilson score upper bound on a binomial proportion.
double wilson_upper_95(std::size_t failures, std::size_t trials);

/// A fresh synthetic device with at least k stable cells, redrawn from
/// sub-seeds until the mask is wide enough.
struct Device {
  CellMeasurementSet cells;
  TernaryProfile profile;
  PufResponse response;  // enrollment bits of the first k masked cells
};
Device make_device(const ExperimentSpec& spec, std::size_t k, std::uint64_t seed);

/// Per p and decoder: fresh device per trial, flip at p, regenerate, count
/// hash mismatches. All decoders see the same devices and noise.
std::vector<FailureStats> run_failure_mc(const ExperimentSpec& spec);

/// Per p: mean pre-hash key bit-error for legitimate regeneration at p and for
/// attacker responses at inter-distance >= attacker_min_hd. Uses the first
/// decoder of the spec.
std::vector<BerPoint> run_ber_sweep(const ExperimentSpec& spec);

std::vector<DecoderComparePoint> run_decoder_compare(const ExperimentSpec& spec);

/// Median over 10 groups of the mean regeneration time per group, after 10
/// warm-up regenerations. Needs trials >= 100. Uses the first p value.
std::vector<TimingPoint> run_timing(const ExperimentSpec& spec);

}  // namespace ternkey
