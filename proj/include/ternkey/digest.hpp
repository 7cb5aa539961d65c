#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace ternkey {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);

/// Constant-time comparison of two digests.
bool digests_equal(const Digest& a, const Digest& b);

std::uint32_t crc32(std::span<const std::uint8_t> data);

/// Overwrites memory in a way the optimizer may not elide.
void secure_zero(std::span<std::uint8_t> data);

}  // namespace ternkey
