#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ternkey/bits.hpp"

namespace ternkey {

/// Magnitude cap for log-likelihood ratios; also the prior given to bits the
/// decoder knows with certainty.
inline constexpr double kLlrMax = 40.0;

/// Immutable polar code description. Indices follow the natural-order
/// transform x = u F^{(x)n}, F = [[1,0],[1,1]], without bit reversal.
struct PolarCodeSpec {
  std::size_t N = 0;
  int n = 0;                           // log2(N)
  std::vector<int> frozen;             // sorted ascending
  std::vector<int> unfrozen;           // sorted ascending
  std::vector<int> reliability_order;  // least reliable first
  double design_param = 0.5;
  Bits frozen_mask;  // frozen_mask[i] == 1 iff i is frozen

  std::size_t num_frozen() const { return frozen.size(); }
};

/// Bhattacharyya parameters of the N synthesized channels of a BEC with
/// erasure probability z, via Z- = 2Z - Z^2 and Z+ = Z^2.
std::vector<double> bhattacharyya_parameters(std::size_t N, double z);

/// Frozen set = the num_frozen least reliable indices (largest Z, ties by
/// ascending index).
PolarCodeSpec construct_frozen_set(std::size_t N, std::size_t num_frozen, double design_param);

/// Spec with an explicitly chosen frozen set; reliability order is still
/// derived from design_param.
PolarCodeSpec polar_spec_with_frozen(std::size_t N, std::vector<int> frozen, double design_param);

void polar_transform_inplace(std::span<std::uint8_t> bits);
Bits polar_transform(BitsView u);

enum class DecoderKind { SC, SCL, BP };

struct DecoderConfig {
  DecoderKind kind = DecoderKind::SC;
  int list_size = 1;        // SCL only, power of two
  int max_iterations = 60;  // BP only
  int permutations = 1;     // BP only: stage orders tried until one is valid
  bool hash_aided = false;  // SCL only

  /// Parses "sc", "scl:<L>", "hascl:<L>", "bp:<iters>" ("bp" alone uses 60)
  /// or "bpl:<P>" (BP over P stage orders, 60 iterations each).
  static DecoderConfig parse(std::string_view text);
  std::string name() const;
  void validate() const;
};

struct DecodeOutput {
  Bits u;
  int iterations = 1;
  bool converged = true;
  /// Hash-aided SCL only: no list candidate passed the predicate and the best
  /// metric path was returned instead.
  bool predicate_fallback = false;
};

/// Validity check on a complete decoded input vector. SCL uses it to pick a
/// list candidate; BP uses it as its stopping rule and to accept a stage order.
using CandidatePredicate = std::function<bool(BitsView u)>;

/// `llr` holds one value per code bit, ln(P(0)/P(1)). `frozen_values` lists the
/// values of the frozen positions in ascending index order.
Bits sc_decode(std::span<const double> llr, BitsView frozen_values, const PolarCodeSpec& spec);

DecodeOutput scl_decode(std::span<const double> llr, BitsView frozen_values,
                        const PolarCodeSpec& spec, const DecoderConfig& config,
                        const CandidatePredicate& predicate = {});

/// Min-sum BP. Stops when the predicate accepts the hard decisions, or, with
/// no predicate, when they are unchanged for one iteration. With
/// permutations > 1 and a predicate, further stage orders of the same
/// transform are tried until one yields an accepted vector; otherwise the
/// natural-order result is returned unconverged.
DecodeOutput bp_decode(std::span<const double> llr, BitsView frozen_values,
                       const PolarCodeSpec& spec, const DecoderConfig& config,
                       const CandidatePredicate& predicate = {});

/// Stage order used by BP attempt `attempt` (0: natural, 1: reversed, then
/// fixed pseudo-random shuffles).
std::vector<int> bp_stage_order(int n, int attempt);

/// Dispatches on config.kind.
DecodeOutput polar_decode(std::span<const double> llr, BitsView frozen_values,
                          const PolarCodeSpec& spec, const DecoderConfig& config,
                          const CandidatePredicate& predicate = {});

/// LLR magnitude of a BSC with crossover p, capped at kLlrMax.
double bsc_llr_magnitude(double p);

}  // namespace ternkey
