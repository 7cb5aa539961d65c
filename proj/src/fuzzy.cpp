#include "ternkey/fuzzy.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ternkey/errors.hpp"

namespace ternkey {

SecretKey::SecretKey(Bits raw_bits) : raw_(std::move(raw_bits)), hash_(hash_key_bits(raw_)) {}

SecretKey::SecretKey(SecretKey&& other) noexcept : raw_(std::move(other.raw_)), hash_(other.hash_) {
  other.wipe();
}

SecretKey& SecretKey::operator=(SecretKey&& other) noexcept {
  if (this != &other) {
    wipe();
    raw_ = std::move(other.raw_);
    hash_ = other.hash_;
    other.wipe();
  }
  return *this;
}

SecretKey::~SecretKey() { wipe(); }

void SecretKey::wipe() {
  secure_zero(raw_);
  raw_.clear();
  secure_zero(hash_);
}

Digest hash_key_bits(BitsView raw_key) {
  std::vector<std::uint8_t> packed = pack_msb_first(raw_key);
  const Digest d = sha256(packed);
  secure_zero(packed);
  return d;
}

bool verify(const Digest& candidate_hash, const EnrollmentRecord& record) {
  return digests_equal(candidate_hash, record.key_hash);
}

std::uint32_t frozen_set_crc32(std::span<const int> frozen) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(4 * frozen.size());
  for (int f : frozen) {
    const auto v = static_cast<std::uint32_t>(f);
    for (int s = 0; s < 32; s += 8) bytes.push_back(static_cast<std::uint8_t>(v >> s));
  }
  return crc32(bytes);
}

namespace {

Bits gather(BitsView v, const std::vector<int>& idx) {
  Bits out(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) out[j] = v[static_cast<std::size_t>(idx[j])];
  return out;
}

}  // namespace

FuzzyExtractor::FuzzyExtractor(BchCode bch, PolarCodeSpec polar, Embedding embedding)
    : bch_(std::move(bch)), polar_(std::move(polar)), embedding_(embedding) {
  const auto n = static_cast<std::size_t>(bch_.n());
  if (polar_.N < n)
    throw std::invalid_argument("fuzzy extractor: polar length " + std::to_string(polar_.N) +
                                " is shorter than the BCH length " + std::to_string(n));
  if (embedding_ == Embedding::Tail) {
    for (std::size_t i = 0; i < n; ++i) positions_.push_back(static_cast<int>(i));
  } else {
    positions_.assign(polar_.reliability_order.end() - static_cast<std::ptrdiff_t>(n), polar_.reliability_order.end());
    std::sort(positions_.begin(), positions_.end());
  }
  padding_mask_.assign(polar_.N, 1);
  for (int p : positions_) padding_mask_[static_cast<std::size_t>(p)] = 0;
  std::vector<int> padding;
  for (std::size_t i = 0; i < polar_.N; ++i)
    if (padding_mask_[i]) padding.push_back(static_cast<int>(i));
  inner_spec_ = polar_spec_with_frozen(polar_.N, std::move(padding), polar_.design_param);
  frozen_crc_ = frozen_set_crc32(polar_.frozen);
}

FuzzyExtractor FuzzyExtractor::default_instance(Embedding embedding) {
  return FuzzyExtractor(BchCode::build(8, 18), construct_frozen_set(512, 262, 0.5), embedding);
}

FuzzyExtractor FuzzyExtractor::from_record(const EnrollmentRecord& record) {
  if (record.version != EnrollmentRecord::kVersion)
    throw DataError("record: unsupported version " + std::to_string(record.version));
  try {
    FuzzyExtractor fx(BchCode::build(record.bch_m, record.bch_t, record.bch_primitive_poly),
                      construct_frozen_set(record.polar_n, record.num_frozen, record.design_param),
                      record.embedding);
    fx.check_record(record);
    return fx;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("record: parameters do not describe a valid code: ") + e.what());
  }
}

void FuzzyExtractor::check_record(const EnrollmentRecord& record) const {
  const BchCodeSpec& b = bch_.spec();
  auto fail = [](const std::string& what) { throw IntegrityError("record: " + what); };
  if (record.version != EnrollmentRecord::kVersion) fail("unsupported version");
  if (record.bch_m != b.m || record.bch_n != b.n || record.bch_k != b.k || record.bch_t != b.t ||
      record.bch_primitive_poly != b.primitive_poly)
    fail("BCH parameters differ from this extractor");
  if (record.polar_n != polar_.N || record.num_frozen != polar_.num_frozen() ||
      record.design_param != polar_.design_param)
    fail("polar parameters differ from this extractor");
  if (record.frozen_set_crc32 != frozen_crc_) fail("frozen-set checksum mismatch");
  if (record.helper_bits.size() != polar_.num_frozen()) fail("helper length differs from the frozen-set size");
  if (record.embedding != embedding_) fail("embedding differs from this extractor");
}

Bits FuzzyExtractor::embed(BitsView bch_codeword) const {
  Bits w(polar_.N, 0);
  for (std::size_t j = 0; j < positions_.size(); ++j) w[static_cast<std::size_t>(positions_[j])] = bch_codeword[j];
  return w;
}

Bits FuzzyExtractor::extract_embedded(BitsView w) const { return gather(w, positions_); }

bool FuzzyExtractor::is_valid_embedding(BitsView w) const {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (padding_mask_[i] && w[i]) return false;
  return bch_.is_codeword(extract_embedded(w));
}

Bits FuzzyExtractor::codeword_of(BitsView puf_bits) const {
  if (puf_bits.size() != static_cast<std::size_t>(bch_.k()))
    throw std::invalid_argument("register: " + std::to_string(puf_bits.size()) + " PUF bits, expected " +
                                std::to_string(bch_.k()));
  Bits cw = bch_.encode(puf_bits);
  Bits c = embed(cw);
  polar_transform_inplace(c);
  secure_zero(cw);
  return c;
}

Registration FuzzyExtractor::register_response(BitsView puf_bits) const {
  Bits c = codeword_of(puf_bits);
  Registration reg;
  EnrollmentRecord& r = reg.record;
  const BchCodeSpec& b = bch_.spec();
  r.bch_m = static_cast<std::uint16_t>(b.m);
  r.bch_n = static_cast<std::uint16_t>(b.n);
  r.bch_k = static_cast<std::uint16_t>(b.k);
  r.bch_t = static_cast<std::uint16_t>(b.t);
  r.bch_primitive_poly = b.primitive_poly;
  r.polar_n = static_cast<std::uint32_t>(polar_.N);
  r.num_frozen = static_cast<std::uint32_t>(polar_.num_frozen());
  r.design_param = polar_.design_param;
  r.frozen_set_crc32 = frozen_crc_;
  r.helper_bits = gather(c, polar_.frozen);
  r.embedding = embedding_;
  reg.key = SecretKey(gather(c, polar_.unfrozen));
  r.key_hash = reg.key.hash();
  secure_zero(c);
  return reg;
}

std::optional<BchDecoded> FuzzyExtractor::decode_principled(BitsView noisy_codeword, const EnrollmentRecord& record,
                                                            const RegenOptions& options,
                                                            RegenDiagnostics& diag) const {
  const double lambda = bsc_llr_magnitude(options.channel_p);
  const auto k = static_cast<std::size_t>(bch_.k());
  std::vector<double> llr(polar_.N, kLlrMax);
  for (std::size_t j = 0; j < positions_.size(); ++j) {
    const double mag = std::clamp(j < k ? lambda : lambda * options.parity_llr_scale, -kLlrMax, kLlrMax);
    llr[static_cast<std::size_t>(positions_[j])] = noisy_codeword[j] ? -mag : mag;
  }

  CandidatePredicate predicate;
  if (options.decoder.hash_aided) {
    predicate = [&](BitsView u) { return verify(hash_key_bits(gather(u, polar_.unfrozen)), record); };
  } else if (options.decoder.kind == DecoderKind::BP) {
    predicate = [&](BitsView u) {
      Bits w(u.begin(), u.end());
      polar_transform_inplace(w);
      return is_valid_embedding(w);
    };
  }

  DecodeOutput out = polar_decode(llr, record.helper_bits, polar_, options.decoder, predicate);
  diag.decoder_iterations = out.iterations;
  diag.decoder_converged = out.converged;
  diag.predicate_fallback = out.predicate_fallback;
  polar_transform_inplace(out.u);
  Bits embedded = extract_embedded(out.u);
  secure_zero(out.u);
  return bch_.decode(embedded);
}

std::optional<BchDecoded> FuzzyExtractor::decode_literal(BitsView noisy_codeword, const EnrollmentRecord& record,
                                                         const RegenOptions& options, RegenDiagnostics& diag) const {
  Bits c = embed(noisy_codeword);
  polar_transform_inplace(c);
  for (std::size_t j = 0; j < polar_.frozen.size(); ++j) c[static_cast<std::size_t>(polar_.frozen[j])] = record.helper_bits[j];

  const double lambda = bsc_llr_magnitude(options.channel_p);
  std::vector<double> llr(polar_.N);
  for (std::size_t i = 0; i < polar_.N; ++i) llr[i] = c[i] ? -lambda : lambda;
  secure_zero(c);

  CandidatePredicate predicate;
  if (options.decoder.kind == DecoderKind::BP)
    predicate = [&](BitsView w) { return is_valid_embedding(w); };
  if (options.decoder.hash_aided)
    predicate = [&](BitsView w) {
      auto d = bch_.decode(extract_embedded(w));
      if (!d) return false;
      Bits cc = codeword_of(d->message);
      const bool ok = verify(hash_key_bits(gather(cc, polar_.unfrozen)), record);
      secure_zero(cc);
      return ok;
    };

  const Bits zeros(inner_spec_.num_frozen(), 0);
  DecodeOutput out = polar_decode(llr, zeros, inner_spec_, options.decoder, predicate);
  diag.decoder_iterations = out.iterations;
  diag.decoder_converged = out.converged;
  diag.predicate_fallback = out.predicate_fallback;
  return bch_.decode(extract_embedded(out.u));
}

RegenResult FuzzyExtractor::regenerate(BitsView noisy_puf_bits, const EnrollmentRecord& record,
                                       const RegenOptions& options) const {
  check_record(record);
  options.decoder.validate();
  const auto k = static_cast<std::size_t>(bch_.k());
  if (noisy_puf_bits.size() != k)
    throw std::invalid_argument("regenerate: " + std::to_string(noisy_puf_bits.size()) + " PUF bits, expected " +
                                std::to_string(k));
  if (options.ground_truth && options.ground_truth->size() != k)
    throw std::invalid_argument("regenerate: ground truth length differs from k");

  RegenResult res;
  RegenDiagnostics& diag = res.diagnostics;
  diag.decoder = options.decoder.kind;

  Bits noisy_cw = bch_.encode(noisy_puf_bits);
  std::optional<BchDecoded> decoded = options.mode == RegenMode::Principled
                                          ? decode_principled(noisy_cw, record, options, diag)
                                          : decode_literal(noisy_cw, record, options, diag);
  secure_zero(noisy_cw);

  Bits estimate(noisy_puf_bits.begin(), noisy_puf_bits.end());
  if (!decoded) {
    diag.bch_failure = true;
  } else {
    diag.bch_corrections = decoded->corrections;
    diag.response_distance = static_cast<int>(hamming_distance(decoded->message, noisy_puf_bits));
    if (diag.response_distance >= options.max_distance_fraction * static_cast<double>(k))
      diag.distance_rejected = true;
    else
      estimate = decoded->message;
    secure_zero(decoded->message);
  }

  Bits c = codeword_of(estimate);
  Bits key = gather(c, polar_.unfrozen);
  res.key_hash = hash_key_bits(key);
  res.match = verify(res.key_hash, record);
  if (options.ground_truth) {
    Bits truth = codeword_of(*options.ground_truth);
    Bits true_key = gather(truth, polar_.unfrozen);
    diag.prehash_bit_errors = static_cast<int>(hamming_distance(key, true_key));
    secure_zero(truth);
    secure_zero(true_key);
  }
  secure_zero(c);
  secure_zero(key);
  secure_zero(estimate);
  return res;
}

}  // namespace ternkey
