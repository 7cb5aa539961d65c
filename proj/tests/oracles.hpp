#pragma once

// Reference implementations used only by tests. They are deliberately naive
// and share no code with the library.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Bits = std::vector<std::uint8_t>;

// Carry-less multiply followed by reduction modulo the field polynomial.
inline std::uint32_t gf_mul(std::uint32_t a, std::uint32_t b, int m, std::uint32_t poly) {
  std::uint64_t prod = 0;
  for (int i = 0; i < m; ++i)
    if ((b >> i) & 1U) prod ^= static_cast<std::uint64_t>(a) << i;
  for (int d = 2 * m - 2; d >= m; --d)
    if ((prod >> d) & 1U) prod ^= static_cast<std::uint64_t>(poly) << (d - m);
  return static_cast<std::uint32_t>(prod);
}

inline std::uint32_t gf_pow(std::uint32_t a, long e, int m, std::uint32_t poly) {
  std::uint32_t r = 1;
  for (long i = 0; i < e; ++i) r = gf_mul(r, a, m, poly);
  return r;
}

// Remainder of GF(2) polynomial long division; index = degree.
inline Bits poly_mod(Bits num, const Bits& den) {
  int dd = static_cast<int>(den.size()) - 1;
  while (dd >= 0 && !den[static_cast<std::size_t>(dd)]) --dd;
  for (int i = static_cast<int>(num.size()) - 1; i >= dd; --i)
    if (num[static_cast<std::size_t>(i)])
      for (int j = 0; j <= dd; ++j) num[static_cast<std::size_t>(i - dd + j)] ^= den[static_cast<std::size_t>(j)];
  num.resize(static_cast<std::size_t>(std::max(dd, 0)));
  return num;
}

inline Bits poly_mul(const Bits& a, const Bits& b) {
  Bits r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i])
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] ^= b[j];
  return r;
}

inline bool is_zero(const Bits& v) {
  for (auto b : v)
    if (b) return false;
  return true;
}

// Row-vector times the explicitly built matrix [[1,0],[1,1]]^{(x)n}.
inline Bits kron_transform(const Bits& u) {
  const std::size_t N = u.size();
  std::vector<Bits> G{{1}};
  for (std::size_t size = 1; size < N; size *= 2) {
    std::vector<Bits> next(2 * size, Bits(2 * size, 0));
    for (std::size_t r = 0; r < size; ++r)
      for (std::size_t c = 0; c < size; ++c) {
        next[r][c] = G[r][c];
        next[r + size][c] = G[r][c];
        next[r + size][c + size] = G[r][c];
      }
    G = std::move(next);
  }
  Bits x(N, 0);
  for (std::size_t r = 0; r < N; ++r)
    if (u[r])
      for (std::size_t c = 0; c < N; ++c) x[c] ^= G[r][c];
  return x;
}

inline std::size_t distance(const Bits& a, const Bits& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

inline Bits random_bits(std::mt19937_64& g, std::size_t n) {
  Bits b(n);
  for (auto& v : b) v = static_cast<std::uint8_t>(g() & 1U);
  return b;
}

// Weight-w error pattern at distinct random positions.
inline Bits random_error(std::mt19937_64& g, std::size_t n, std::size_t w) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), g);
  Bits e(n, 0);
  for (std::size_t i = 0; i < w; ++i) e[idx[i]] = 1;
  return e;
}

inline Bits xor_of(const Bits& a, const Bits& b) {
  Bits r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] ^ b[i];
  return r;
}

}  // namespace oracle
