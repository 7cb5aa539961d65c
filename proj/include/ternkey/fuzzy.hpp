#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ternkey/bch.hpp"
#include "ternkey/bits.hpp"
#include "ternkey/digest.hpp"
#include "ternkey/polar.hpp"

namespace ternkey {

/// Where the BCH codeword sits inside the N-bit pre-transform vector. The
/// remaining positions carry zeros that the decoder treats as known.
enum class Embedding : std::uint8_t {
  /// BCH bits on positions [0, n), zeros on [n, N).
  Tail = 0,
  /// BCH bits on the n most reliable indices, in ascending index order.
  InformationSet = 1,
};

/// Public helper data plus everything needed to rebuild both codes.
struct EnrollmentRecord {
  static constexpr std::uint16_t kVersion = 1;

  std::uint16_t version = kVersion;
  std::uint16_t bch_m = 0;
  std::uint16_t bch_n = 0;
  std::uint16_t bch_k = 0;
  std::uint16_t bch_t = 0;
  std::uint32_t bch_primitive_poly = 0;
  std::uint32_t polar_n = 0;
  std::uint32_t num_frozen = 0;
  double design_param = 0.5;
  std::uint32_t frozen_set_crc32 = 0;
  std::vector<std::uint16_t> mask;
  Bits helper_bits;
  Digest key_hash{};
  Embedding embedding = Embedding::InformationSet;

  bool operator==(const EnrollmentRecord&) const = default;
};

/// Raw key bits live only as long as this object; they are wiped on
/// destruction and never serialized.
class SecretKey {
 public:
  SecretKey() = default;
  explicit SecretKey(Bits raw_bits);
  SecretKey(const SecretKey&) = delete;
  SecretKey& operator=(const SecretKey&) = delete;
  SecretKey(SecretKey&& other) noexcept;
  SecretKey& operator=(SecretKey&& other) noexcept;
  ~SecretKey();

  const Bits& raw_bits() const { return raw_; }
  const Digest& hash() const { return hash_; }

 private:
  void wipe();

  Bits raw_;
  Digest hash_{};
};

/// SHA-256 over the raw key packed MSB-first, final byte zero-padded.
Digest hash_key_bits(BitsView raw_key);

struct Registration {
  EnrollmentRecord record;
  SecretKey key;
};

enum class RegenMode {
  /// Decode the transform input with the helper bits as frozen values and the
  /// re-encoded noisy response as channel observation.
  Principled,
  /// Overwrite the frozen positions of the transformed noisy vector with the
  /// helper bits, then hard-decision decode the inner code whose frozen
  /// positions are the known-zero padding.
  LiteralSubstitution,
};

struct RegenOptions {
  DecoderConfig decoder;
  double channel_p = 0.15;
  RegenMode mode = RegenMode::Principled;
  /// Confidence given to the re-encoded parity bits relative to message bits.
  /// Any message error randomizes the re-encoded parity, so the default
  /// treats parity as erased.
  double parity_llr_scale = 0.0;
  /// A decoded response at Hamming distance >= this fraction of k from the
  /// presented response is rejected as belonging to another device.
  double max_distance_fraction = 0.4;
  /// Enrolled PUF bits, when known, to report pre-hash key bit errors.
  std::optional<Bits> ground_truth;
};

struct RegenDiagnostics {
  int bch_corrections = 0;
  bool bch_failure = false;
  bool distance_rejected = false;
  int response_distance = 0;  // between corrected and presented response
  DecoderKind decoder = DecoderKind::SC;
  int decoder_iterations = 0;
  bool decoder_converged = true;
  bool predicate_fallback = false;
  std::optional<int> prehash_bit_errors;
};

struct RegenResult {
  Digest key_hash{};
  bool match = false;
  RegenDiagnostics diagnostics;
};

/// BCH-polar concatenated fuzzy extractor.
///
/// Registration: w = BCH(x) embedded into N bits, c = polar_transform(w);
/// helper = c[F], key = c[F_C], stored key = SHA-256(key).
///
/// Regeneration relies on the transform being its own inverse: c is the
/// input of a polar code whose codeword is w, so recovering c from a noisy
/// observation of w with c[F] = helper is ordinary polar decoding.
///
/// Immutable after construction and safe to share across threads.
class FuzzyExtractor {
 public:
  FuzzyExtractor(BchCode bch, PolarCodeSpec polar, Embedding embedding = Embedding::InformationSet);

  /// (255, 131) BCH with t = 18 inside an N = 512 polar code with 262 frozen
  /// indices at design parameter 0.5.
  static FuzzyExtractor default_instance(Embedding embedding = Embedding::InformationSet);
  /// Rebuilds both codes from a record and checks the frozen-set checksum.
  static FuzzyExtractor from_record(const EnrollmentRecord& record);

  const BchCode& bch() const { return bch_; }
  const PolarCodeSpec& polar() const { return polar_; }
  Embedding embedding() const { return embedding_; }
  const std::vector<int>& embedding_positions() const { return positions_; }
  std::size_t key_bits() const { return polar_.unfrozen.size(); }
  std::size_t helper_bits() const { return polar_.frozen.size(); }

  /// Transform-domain vector c for a response.
  Bits codeword_of(BitsView puf_bits) const;

  Registration register_response(BitsView puf_bits) const;

  RegenResult regenerate(BitsView noisy_puf_bits, const EnrollmentRecord& record,
                         const RegenOptions& options = {}) const;

  /// Throws IntegrityError when the record does not describe this extractor.
  void check_record(const EnrollmentRecord& record) const;

 private:
  Bits embed(BitsView bch_codeword) const;
  Bits extract_embedded(BitsView w) const;
  // Zero padding and a BCH codeword on the embedding positions.
  bool is_valid_embedding(BitsView w) const;
  std::optional<BchDecoded> decode_principled(BitsView noisy_codeword, const EnrollmentRecord& record,
                                              const RegenOptions& options, RegenDiagnostics& diag) const;
  std::optional<BchDecoded> decode_literal(BitsView noisy_codeword, const EnrollmentRecord& record,
                                           const RegenOptions& options, RegenDiagnostics& diag) const;

  BchCode bch_;
  PolarCodeSpec polar_;
  Embedding embedding_;
  std::vector<int> positions_;  // embedding positions, ascending
  Bits padding_mask_;           // 1 where the pre-transform vector is known zero
  PolarCodeSpec inner_spec_;    // frozen = padding positions (literal mode)
  std::uint32_t frozen_crc_ = 0;
};

/// Constant-time comparison against the record's stored hash.
bool verify(const Digest& candidate_hash, const EnrollmentRecord& record);

std::uint32_t frozen_set_crc32(std::span<const int> frozen);

/// Little-endian wire format, magic "PUFK":
///   u16 version, u16 bch_m, u16 bch_n, u16 bch_k, u16 bch_t,
///   u32 bch_primitive_poly, u32 polar_N, u32 num_frozen, f64 design_param,
///   u32 frozen_set_crc32, u32 mask_len, u16 mask[mask_len],
///   u32 helper_bit_len, packed helper bytes (MSB first),
///   32-byte key hash, u32 crc32 of all preceding bytes.
std::vector<std::uint8_t> serialize_record(const EnrollmentRecord& record);
EnrollmentRecord deserialize_record(std::span<const std::uint8_t> bytes);

}  // namespace ternkey
