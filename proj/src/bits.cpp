#include "ternkey/bits.hpp"

#include <stdexcept>

namespace ternkey {

std::size_t weight(BitsView bits) {
  std::size_t w = 0;
  for (auto b : bits) w += b & 1U;
  return w;
}

std::size_t hamming_distance(BitsView a, BitsView b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] ^ b[i]) & 1U;
  return d;
}

Bits xor_bits(BitsView a, BitsView b) {
  if (a.size() != b.size()) throw std::invalid_argument("xor_bits: length mismatch");
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] ^ b[i]) & 1U;
  return out;
}

std::vector<std::uint8_t> pack_msb_first(BitsView bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i] & 1U) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  return out;
}

Bits unpack_msb_first(std::span<const std::uint8_t> bytes, std::size_t num_bits) {
  if (bytes.size() * 8 < num_bits) throw std::invalid_argument("unpack_msb_first: not enough bytes");
  Bits out(num_bits);
  for (std::size_t i = 0; i < num_bits; ++i) out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1U;
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

std::string bits_to_string(BitsView bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

Bits bits_from_string(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1')
      out.push_back(static_cast<std::uint8_t>(c - '0'));
    else
      throw std::invalid_argument("bits_from_string: expected only '0' and '1'");
  }
  return out;
}

}  // namespace ternkey
