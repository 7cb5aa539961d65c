#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "ternkey/bch.hpp"
#include "ternkey/gf.hpp"

using namespace ternkey;

TEST_CASE("smallest primitive polynomials") {
  CHECK(GaloisField::smallest_primitive_poly(3) == 0xb);
  CHECK(GaloisField::smallest_primitive_poly(4) == 0x13);
  CHECK(GaloisField::smallest_primitive_poly(8) == 0x11d);
  CHECK_FALSE(GaloisField::is_primitive(0x11b, 8));  // irreducible, x has order 51
}

TEST_CASE("field multiplication matches carry-less reference") {
  for (int m : {3, 4, 8}) {
    const std::uint32_t poly = GaloisField::smallest_primitive_poly(m);
    GaloisField f(m, poly);
    const std::uint32_t q = 1U << m;
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; b += (m == 8 ? 7 : 1)) {
        REQUIRE(f.mul(a, b) == oracle::gf_mul(a, b, m, poly));
        CHECK(f.mul(a, b) < q);
      }
    for (std::uint32_t a = 1; a < q; ++a) {
      REQUIRE(f.mul(a, f.inv(a)) == 1);
      CHECK(f.alpha_pow(f.log(a)) == a);
    }
    CHECK_THROWS(f.inv(0));
    CHECK(f.alpha_pow(-1) == f.inv(2));
  }
}

TEST_CASE("Hamming code from m = 3, t = 1") {
  const BchCode c = BchCode::build(3, 1);
  CHECK(c.n() == 7);
  CHECK(c.k() == 4);
  CHECK(c.t() == 1);
  CHECK(c.spec().generator == Bits{1, 1, 0, 1});  // the primitive polynomial
}

TEST_CASE("(15,7) generator equals lcm of brute-force minimal polynomials") {
  const int m = 4;
  const std::uint32_t poly = 0x13;
  // Minimal polynomial of beta: lowest-degree monic binary polynomial with beta
  // as a root, found by trying every candidate.
  auto minimal = [&](std::uint32_t beta) {
    for (std::uint32_t cand = 2; cand < (1U << (m + 1)); ++cand) {
      std::uint32_t acc = 0;
      for (int d = 0; d <= m; ++d)
        if ((cand >> d) & 1U) acc ^= oracle::gf_pow(beta, d, m, poly);
      if (acc == 0) return cand;
    }
    return 0U;
  };
  std::set<std::uint32_t> factors;
  for (int j = 1; j <= 4; ++j) factors.insert(minimal(oracle::gf_pow(2, j, m, poly)));
  oracle::Bits g{1};
  for (std::uint32_t f : factors) {
    oracle::Bits fb;
    for (int d = 0; d <= m; ++d) fb.push_back((f >> d) & 1U);
    while (fb.back() == 0) fb.pop_back();
    g = oracle::poly_mul(g, fb);
  }
  const BchCode c = BchCode::build(4, 2);
  CHECK(c.n() == 15);
  CHECK(c.k() == 7);
  CHECK(c.spec().generator.size() == 9);
  CHECK(c.spec().generator == g);
}

TEST_CASE("(255,131) code with t = 18") {
  const BchCode c = BchCode::build(8, 18);
  CHECK(c.n() == 255);
  CHECK(c.k() == 131);
  CHECK(c.t() == 18);
  CHECK(c.spec().primitive_poly == 0x11d);
  CHECK(c.spec().generator.size() == 125);
  oracle::Bits xn1(256, 0);
  xn1[0] = xn1[255] = 1;
  CHECK(oracle::is_zero(oracle::poly_mod(xn1, c.spec().generator)));
}

TEST_CASE("build rejects bad parameters") {
  CHECK_THROWS_AS(BchCode::build(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(BchCode::build(13, 1), std::invalid_argument);
  CHECK_THROWS_AS(BchCode::build(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(BchCode::build(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(BchCode::build(4, 8), std::invalid_argument);
}

TEST_CASE("encoding is systematic and divisible by g") {
  std::mt19937_64 rng(11);
  for (auto [m, t] : {std::pair{3, 1}, {4, 2}, {8, 18}}) {
    const BchCode c = BchCode::build(m, t);
    CHECK(oracle::is_zero(c.encode(Bits(static_cast<std::size_t>(c.k()), 0))));
    for (int trial = 0; trial < 200; ++trial) {
      const Bits msg = oracle::random_bits(rng, static_cast<std::size_t>(c.k()));
      const Bits cw = c.encode(msg);
      REQUIRE(cw.size() == static_cast<std::size_t>(c.n()));
      CHECK(Bits(cw.begin(), cw.begin() + c.k()) == msg);
      CHECK(oracle::is_zero(oracle::poly_mod(cw, c.spec().generator)));
      CHECK(c.is_codeword(cw));
      const Bits other = oracle::random_bits(rng, static_cast<std::size_t>(c.k()));
      CHECK(c.encode(oracle::xor_of(msg, other)) == oracle::xor_of(cw, c.encode(other)));
    }
  }
  const BchCode c = BchCode::build(4, 2);
  CHECK_THROWS_AS(c.encode(Bits(6, 0)), std::invalid_argument);
  CHECK_THROWS_AS(c.decode(Bits(14, 0)), std::invalid_argument);
}

// Every message and every error pattern of weight <= t.
void exhaustive_correction(const BchCode& c) {
  const auto n = static_cast<std::size_t>(c.n());
  const auto k = static_cast<std::size_t>(c.k());
  std::vector<std::vector<std::size_t>> patterns{{}};
  for (int w = 1; w <= c.t(); ++w) {
    std::vector<std::vector<std::size_t>> grown;
    for (const auto& p : patterns)
      if (p.size() == static_cast<std::size_t>(w - 1))
        for (std::size_t i = p.empty() ? 0 : p.back() + 1; i < n; ++i) {
          auto q = p;
          q.push_back(i);
          grown.push_back(q);
        }
    patterns.insert(patterns.end(), grown.begin(), grown.end());
  }
  for (std::uint32_t v = 0; v < (1U << k); ++v) {
    Bits msg(k);
    for (std::size_t i = 0; i < k; ++i) msg[i] = (v >> i) & 1U;
    const Bits cw = c.encode(msg);
    for (const auto& p : patterns) {
      Bits word = cw;
      for (std::size_t i : p) word[i] ^= 1U;
      const auto d = c.decode(word);
      REQUIRE(d.has_value());
      REQUIRE(d->message == msg);
      REQUIRE(d->corrections == static_cast<int>(p.size()));
    }
  }
}

TEST_CASE("exhaustive correction on (7,4)") { exhaustive_correction(BchCode::build(3, 1)); }
TEST_CASE("exhaustive correction on (15,7)") { exhaustive_correction(BchCode::build(4, 2)); }

TEST_CASE("(15,7) with t flips decodes to the unique nearest codeword") {
  const BchCode c = BchCode::build(4, 2);
  std::vector<Bits> book;
  for (std::uint32_t v = 0; v < 128; ++v) {
    Bits msg(7);
    for (int i = 0; i < 7; ++i) msg[static_cast<std::size_t>(i)] = (v >> i) & 1U;
    book.push_back(c.encode(msg));
  }
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const Bits msg = oracle::random_bits(rng, 7);
    const Bits word = oracle::xor_of(c.encode(msg), oracle::random_error(rng, 15, 2));
    int within = 0;
    for (const Bits& cw : book) within += oracle::distance(cw, word) <= 2;
    REQUIRE(within == 1);
    const auto d = c.decode(word);
    REQUIRE(d);
    CHECK(d->message == msg);
    CHECK(d->corrections == 2);
  }
}

TEST_CASE("(255,131) randomized correction up to t") {
  const BchCode c = BchCode::build(8, 18);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const Bits msg = oracle::random_bits(rng, 131);
    const std::size_t w = static_cast<std::size_t>(trial % 19);
    const auto d = c.decode(oracle::xor_of(c.encode(msg), oracle::random_error(rng, 255, w)));
    REQUIRE(d);
    REQUIRE(d->message == msg);
    REQUIRE(d->corrections == static_cast<int>(w));
  }
}

TEST_CASE("(255,131) beyond t never returns a far codeword") {
  const BchCode c = BchCode::build(8, 18);
  std::mt19937_64 rng(9);
  int failures = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Bits msg = oracle::random_bits(rng, 131);
    const Bits word = oracle::xor_of(c.encode(msg), oracle::random_error(rng, 255, 19 + trial % 8));
    const auto d = c.decode(word);
    if (!d) {
      ++failures;
      continue;
    }
    const Bits re = c.encode(d->message);
    CHECK(oracle::is_zero(oracle::poly_mod(re, c.spec().generator)));
    CHECK(oracle::distance(re, word) <= 18);
    CHECK(static_cast<std::size_t>(d->corrections) == oracle::distance(re, word));
  }
  CHECK(failures > 1900);
}
