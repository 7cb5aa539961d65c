#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ternkey/bits.hpp"
#include "ternkey/gf.hpp"

namespace ternkey {

/// Immutable description of a narrow-sense binary BCH code.
struct BchCodeSpec {
  int m = 0;
  int n = 0;  // 2^m - 1
  int k = 0;
  int t = 0;  // correction capability: alpha^1 .. alpha^(2t) are roots of g
  std::uint32_t primitive_poly = 0;
  Bits generator;  // degree n - k, generator[i] = coefficient of x^i

  bool operator==(const BchCodeSpec&) const = default;
};

struct BchDecoded {
  Bits message;
  int corrections = 0;
};

/// Systematic binary BCH encoder/decoder. Codewords carry the message in
/// positions [0, k) and parity in [k, n); as a polynomial every codeword is a
/// multiple of the generator.
///
/// Instances are immutable; encode and decode keep all scratch state local, so
/// a single code may be shared between threads.
class BchCode {
 public:
  /// Generator = lcm of the minimal polynomials of alpha^1 .. alpha^(2 t_target)
  /// over the smallest primitive polynomial of degree m. Requires 3 <= m <= 12.
  static BchCode build(int m, int t_target);
  static BchCode build(int m, int t_target, std::uint32_t primitive_poly);

  const BchCodeSpec& spec() const { return spec_; }
  const GaloisField& field() const { return field_; }
  int n() const { return spec_.n; }
  int k() const { return spec_.k; }
  int t() const { return spec_.t; }

  Bits encode(BitsView message) const;

  /// Syndrome decoding with Berlekamp-Massey and Chien search. Returns nullopt
  /// when the word is detectably uncorrectable (locator degree > t, root count
  /// mismatch, or the corrected word fails the parity check).
  std::optional<BchDecoded> decode(BitsView word) const;

  bool is_codeword(BitsView word) const;

 private:
  BchCode(GaloisField field, BchCodeSpec spec);

  Bits parity_of(BitsView message) const;
  std::vector<GFElement> syndromes(BitsView word) const;

  GaloisField field_;
  BchCodeSpec spec_;
  std::size_t parity_words_ = 0;
  // Row i holds x^(i + n - k) mod g packed into 64-bit words, i.e. the parity
  // contributed by message bit i.
  std::vector<std::uint64_t> parity_rows_;
};

}  // namespace ternkey
