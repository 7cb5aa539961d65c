#include "ternkey/bch.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace ternkey {

namespace {

std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

bool test_bit(const std::uint64_t* row, std::size_t i) { return (row[i / 64] >> (i % 64)) & 1U; }

}  // namespace

BchCode BchCode::build(int m, int t_target) {
  if (m < 3 || m > 12) throw std::invalid_argument("build_bch_spec: m must be in [3, 12]");
  return build(m, t_target, GaloisField::smallest_primitive_poly(m));
}

BchCode BchCode::build(int m, int t_target, std::uint32_t primitive_poly) {
  if (m < 3 || m > 12) throw std::invalid_argument("build_bch_spec: m must be in [3, 12]");
  if (t_target < 1) throw std::invalid_argument("build_bch_spec: t must be >= 1");

  GaloisField field(m, primitive_poly);
  const int n = static_cast<int>(field.order());
  if (2 * t_target >= n)
    throw std::invalid_argument("build_bch_spec: t = " + std::to_string(t_target) + " leaves no message bits");

  // Roots of g: the union of the cyclotomic cosets of 1 .. 2t.
  std::set<int> roots;
  for (int j = 1; j <= 2 * t_target; ++j) {
    int e = j % n;
    while (roots.insert(e).second) e = (2 * e) % n;
  }

  // g(x) = prod (x - alpha^e), coefficients in GF(2^m) that must land in GF(2).
  std::vector<GFElement> g{1};
  for (int e : roots) {
    const GFElement r = field.alpha_pow(e);
    std::vector<GFElement> next(g.size() + 1, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      next[i + 1] ^= g[i];
      next[i] ^= field.mul(g[i], r);
    }
    g = std::move(next);
  }

  BchCodeSpec spec;
  spec.m = m;
  spec.n = n;
  spec.k = n - static_cast<int>(roots.size());
  if (spec.k <= 0)
    throw std::invalid_argument("build_bch_spec: generator degree leaves k <= 0");
  spec.primitive_poly = primitive_poly;
  spec.generator.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 1) throw std::logic_error("BCH generator has a coefficient outside GF(2)");
    spec.generator[i] = static_cast<std::uint8_t>(g[i]);
  }
  int t = 0;
  while (roots.count(2 * t + 1) && roots.count(2 * t + 2)) ++t;
  spec.t = t;

  return BchCode(std::move(field), std::move(spec));
}

BchCode::BchCode(GaloisField field, BchCodeSpec spec) : field_(std::move(field)), spec_(std::move(spec)) {
  const std::size_t r = static_cast<std::size_t>(spec_.n - spec_.k);
  parity_words_ = words_for(r);
  parity_rows_.assign(static_cast<std::size_t>(spec_.k) * parity_words_, 0);

  // cur = x^r mod g, then repeatedly multiplied by x.
  std::vector<std::uint64_t> cur(parity_words_, 0);
  for (std::size_t i = 0; i < r; ++i)
    if (spec_.generator[i]) cur[i / 64] |= 1ULL << (i % 64);
  for (int row = 0; row < spec_.k; ++row) {
    std::copy(cur.begin(), cur.end(), parity_rows_.begin() + static_cast<std::ptrdiff_t>(row * parity_words_));
    const bool carry = test_bit(cur.data(), r - 1);
    for (std::size_t w = parity_words_; w-- > 0;) {
      cur[w] <<= 1;
      if (w > 0) cur[w] |= cur[w - 1] >> 63;
    }
    if (r % 64) cur.back() &= (1ULL << (r % 64)) - 1;
    if (carry)
      for (std::size_t i = 0; i < r; ++i)
        if (spec_.generator[i]) cur[i / 64] ^= 1ULL << (i % 64);
  }
}

Bits BchCode::parity_of(BitsView message) const {
  std::vector<std::uint64_t> acc(parity_words_, 0);
  for (int i = 0; i < spec_.k; ++i) {
    if (!message[i]) continue;
    const std::uint64_t* row = parity_rows_.data() + static_cast<std::size_t>(i) * parity_words_;
    for (std::size_t w = 0; w < parity_words_; ++w) acc[w] ^= row[w];
  }
  const std::size_t r = static_cast<std::size_t>(spec_.n - spec_.k);
  Bits parity(r);
  for (std::size_t i = 0; i < r; ++i) parity[i] = test_bit(acc.data(), i);
  return parity;
}

Bits BchCode::encode(BitsView message) const {
  if (message.size() != static_cast<std::size_t>(spec_.k))
    throw std::invalid_argument("bch_encode: message length " + std::to_string(message.size()) +
                                " != k = " + std::to_string(spec_.k));
  Bits word(message.begin(), message.end());
  const Bits parity = parity_of(message);
  word.insert(word.end(), parity.begin(), parity.end());
  return word;
}

bool BchCode::is_codeword(BitsView word) const {
  if (word.size() != static_cast<std::size_t>(spec_.n)) return false;
  const Bits parity = parity_of(word.first(static_cast<std::size_t>(spec_.k)));
  return std::equal(parity.begin(), parity.end(), word.begin() + spec_.k);
}

std::vector<GFElement> BchCode::syndromes(BitsView word) const {
  const int two_t = 2 * spec_.t;
  std::vector<GFElement> s(static_cast<std::size_t>(two_t) + 1, 0);  // s[0] unused
  const int order = spec_.n;
  for (int i = 0; i < spec_.n; ++i) {
    if (!word[static_cast<std::size_t>(i)]) continue;
    int e = 0;
    for (int j = 1; j <= two_t; ++j) {
      e += i;
      if (e >= order) e -= order;
      s[static_cast<std::size_t>(j)] ^= field_.alpha_pow(e);
    }
  }
  return s;
}

std::optional<BchDecoded> BchCode::decode(BitsView word) const {
  if (word.size() != static_cast<std::size_t>(spec_.n))
    throw std::invalid_argument("bch_decode: word length " + std::to_string(word.size()) +
                                " != n = " + std::to_string(spec_.n));
  const auto k = static_cast<std::size_t>(spec_.k);
  const std::vector<GFElement> s = syndromes(word);
  if (std::all_of(s.begin() + 1, s.end(), [](GFElement v) { return v == 0; }))
    return BchDecoded{Bits(word.begin(), word.begin() + spec_.k), 0};

  // Berlekamp-Massey: shortest LFSR lambda generating s[1..2t].
  const int two_t = 2 * spec_.t;
  std::vector<GFElement> lambda{1}, prev{1};
  int length = 0;
  int shift = 1;
  GFElement prev_discrepancy = 1;
  for (int r = 0; r < two_t; ++r) {
    GFElement d = s[static_cast<std::size_t>(r + 1)];
    for (int i = 1; i <= length && i < static_cast<int>(lambda.size()); ++i)
      d ^= field_.mul(lambda[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(r + 1 - i)]);
    if (d == 0) {
      ++shift;
      continue;
    }
    const GFElement coef = field_.div(d, prev_discrepancy);
    std::vector<GFElement> next = lambda;
    if (next.size() < prev.size() + static_cast<std::size_t>(shift)) next.resize(prev.size() + static_cast<std::size_t>(shift), 0);
    for (std::size_t i = 0; i < prev.size(); ++i) next[i + static_cast<std::size_t>(shift)] ^= field_.mul(coef, prev[i]);
    if (2 * length <= r) {
      prev = std::move(lambda);
      length = r + 1 - length;
      prev_discrepancy = d;
      shift = 1;
    } else {
      ++shift;
    }
    lambda = std::move(next);
  }
  while (lambda.size() > 1 && lambda.back() == 0) lambda.pop_back();
  const int degree = static_cast<int>(lambda.size()) - 1;
  if (degree != length || degree > spec_.t) return std::nullopt;

  // Chien search: position i is in error iff lambda(alpha^-i) = 0.
  Bits corrected(word.begin(), word.end());
  int roots = 0;
  for (int i = 0; i < spec_.n; ++i) {
    GFElement acc = lambda[0];
    for (int l = 1; l <= degree; ++l)
      acc ^= field_.mul(lambda[static_cast<std::size_t>(l)], field_.alpha_pow(-static_cast<long long>(i) * l));
    if (acc == 0) {
      corrected[static_cast<std::size_t>(i)] ^= 1U;
      ++roots;
    }
  }
  if (roots != degree || !is_codeword(corrected)) return std::nullopt;
  corrected.resize(k);
  return BchDecoded{std::move(corrected), roots};
}

}  // namespace ternkey
