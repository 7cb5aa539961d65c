#pragma once

#include <cstdint>
#include <vector>

namespace ternkey {

/// Element of GF(2^m): a polynomial over GF(2) of degree < m, bit i holding
/// the coefficient of x^i.
using GFElement = std::uint32_t;

/// GF(2^m) with exp/log tables over a primitive polynomial, 2 <= m <= 16.
class GaloisField {
 public:
  GaloisField(int m, std::uint32_t primitive_poly);

  /// Smallest primitive polynomial of degree m when polynomials are ordered
  /// by their integer encoding, e.g. 0x11d (x^8+x^4+x^3+x^2+1) for m = 8.
  static std::uint32_t smallest_primitive_poly(int m);
  static bool is_primitive(std::uint32_t poly, int m);

  int m() const { return m_; }
  std::uint32_t order() const { return order_; }  // 2^m - 1
  std::uint32_t primitive_poly() const { return poly_; }

  static GFElement add(GFElement a, GFElement b) { return a ^ b; }
  GFElement mul(GFElement a, GFElement b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  GFElement div(GFElement a, GFElement b) const;
  GFElement inv(GFElement a) const;
  /// alpha^e for any integer exponent (reduced modulo 2^m - 1).
  GFElement alpha_pow(long long e) const;
  /// Discrete log base alpha; a must be nonzero.
  std::uint32_t log(GFElement a) const;

 private:
  int m_;
  std::uint32_t poly_;
  std::uint32_t order_;
  std::vector<GFElement> exp_;      // 2 * order entries, no reduction needed in mul
  std::vector<std::uint32_t> log_;  // log_[0] unused
};

}  // namespace ternkey
