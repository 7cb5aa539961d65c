#include "ternkey/gf.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace ternkey {

namespace {

// x * a mod poly, for a of degree < m.
std::uint32_t times_x(std::uint32_t a, std::uint32_t poly, int m) {
  a <<= 1;
  if (a >> m) a ^= poly;
  return a;
}

}  // namespace

bool GaloisField::is_primitive(std::uint32_t poly, int m) {
  if (m < 2 || m > 16) return false;
  if (std::bit_width(poly) != static_cast<unsigned>(m + 1) || (poly & 1U) == 0) return false;
  // x is a generator of the multiplicative group iff its order is 2^m - 1;
  // a reducible modulus has fewer than 2^m - 1 units, so this also implies
  // irreducibility.
  const std::uint32_t order = (1U << m) - 1;
  std::uint32_t a = 1;
  for (std::uint32_t i = 1; i <= order; ++i) {
    a = times_x(a, poly, m);
    if (a == 1) return i == order;
  }
  return false;
}

std::uint32_t GaloisField::smallest_primitive_poly(int m) {
  if (m < 2 || m > 16) throw std::invalid_argument("smallest_primitive_poly: m out of range");
  for (std::uint32_t p = (1U << m) | 1U; p < (1U << (m + 1)); p += 2)
    if (is_primitive(p, m)) return p;
  throw std::logic_error("no primitive polynomial found");
}

GaloisField::GaloisField(int m, std::uint32_t primitive_poly)
    : m_(m), poly_(primitive_poly), order_(m >= 2 && m <= 16 ? (1U << m) - 1 : 0) {
  if (!is_primitive(primitive_poly, m))
    throw std::invalid_argument("GaloisField: polynomial " + std::to_string(primitive_poly) +
                                " is not primitive of degree " + std::to_string(m));
  exp_.resize(2 * static_cast<std::size_t>(order_));
  log_.assign(static_cast<std::size_t>(order_) + 1, 0);
  std::uint32_t a = 1;
  for (std::uint32_t i = 0; i < order_; ++i) {
    exp_[i] = a;
    log_[a] = i;
    a = times_x(a, poly_, m_);
  }
  for (std::uint32_t i = order_; i < 2 * order_; ++i) exp_[i] = exp_[i - order_];
}

GFElement GaloisField::inv(GFElement a) const {
  if (a == 0 || a > order_) throw std::domain_error("GaloisField::inv: zero or out-of-range element");
  return exp_[(order_ - log_[a]) % order_];
}

GFElement GaloisField::div(GFElement a, GFElement b) const {
  if (b == 0) throw std::domain_error("GaloisField::div: division by zero");
  if (a == 0) return 0;
  return exp_[log_[a] + order_ - log_[b]];
}

GFElement GaloisField::alpha_pow(long long e) const {
  long long r = e % static_cast<long long>(order_);
  if (r < 0) r += order_;
  return exp_[static_cast<std::size_t>(r)];
}

std::uint32_t GaloisField::log(GFElement a) const {
  if (a == 0 || a > order_) throw std::domain_error("GaloisField::log: zero or out-of-range element");
  return log_[a];
}

}  // namespace ternkey
