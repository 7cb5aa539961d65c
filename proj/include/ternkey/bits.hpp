#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ternkey {

/// Bit vector with one 0/1 value per element. Index 0 is the lowest
/// polynomial degree wherever a vector is read as a polynomial.
using Bits = std::vector<std::uint8_t>;
using BitsView = std::span<const std::uint8_t>;

std::size_t weight(BitsView bits);
std::size_t hamming_distance(BitsView a, BitsView b);
Bits xor_bits(BitsView a, BitsView b);

/// Packs bits most-significant-bit first; the final partial byte is
/// zero-padded.
std::vector<std::uint8_t> pack_msb_first(BitsView bits);
Bits unpack_msb_first(std::span<const std::uint8_t> bytes, std::size_t num_bits);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string bits_to_string(BitsView bits);
Bits bits_from_string(std::string_view text);

}  // namespace ternkey
