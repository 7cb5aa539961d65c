#include <bit>
#include <cstring>
#include <stdexcept>
#include <string>

#include "ternkey/errors.hpp"
#include "ternkey/fuzzy.hpp"

namespace ternkey {

namespace {

constexpr std::uint8_t kMagic[4] = {'P', 'U', 'F', 'K'};

class Writer {
 public:
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  void le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DataError("record: truncated at byte " + std::to_string(pos_));
  }
  std::uint64_t le(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_record(const EnrollmentRecord& record) {
  if (record.embedding != Embedding::InformationSet)
    throw std::invalid_argument("serialize_record: only information-set records have a file format");
  if (record.helper_bits.size() != record.num_frozen)
    throw std::invalid_argument("serialize_record: helper length differs from num_frozen");
  Writer w;
  w.raw(kMagic);
  w.u16(record.version);
  w.u16(record.bch_m);
  w.u16(record.bch_n);
  w.u16(record.bch_k);
  w.u16(record.bch_t);
  w.u32(record.bch_primitive_poly);
  w.u32(record.polar_n);
  w.u32(record.num_frozen);
  w.f64(record.design_param);
  w.u32(record.frozen_set_crc32);
  w.u32(static_cast<std::uint32_t>(record.mask.size()));
  for (std::uint16_t m : record.mask) w.u16(m);
  w.u32(static_cast<std::uint32_t>(record.helper_bits.size()));
  w.raw(pack_msb_first(record.helper_bits));
  w.raw(record.key_hash);
  w.u32(crc32(w.bytes()));
  return std::move(w.bytes());
}

EnrollmentRecord deserialize_record(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.raw(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw DataError("record: bad magic");
  EnrollmentRecord rec;
  rec.version = r.u16();
  if (rec.version != EnrollmentRecord::kVersion)
    throw DataError("record: unsupported version " + std::to_string(rec.version));
  rec.bch_m = r.u16();
  rec.bch_n = r.u16();
  rec.bch_k = r.u16();
  rec.bch_t = r.u16();
  rec.bch_primitive_poly = r.u32();
  rec.polar_n = r.u32();
  rec.num_frozen = r.u32();
  rec.design_param = r.f64();
  rec.frozen_set_crc32 = r.u32();
  const std::uint32_t mask_len = r.u32();
  if (mask_len > bytes.size()) throw DataError("record: truncated mask");
  rec.mask.resize(mask_len);
  for (auto& m : rec.mask) m = r.u16();
  const std::uint32_t helper_len = r.u32();
  if (helper_len > 8 * bytes.size()) throw DataError("record: truncated helper data");
  rec.helper_bits = unpack_msb_first(r.raw((helper_len + 7) / 8), helper_len);
  auto hash = r.raw(32);
  std::copy(hash.begin(), hash.end(), rec.key_hash.begin());
  const std::size_t body = r.pos();
  const std::uint32_t stored_crc = r.u32();
  if (r.pos() != bytes.size()) throw DataError("record: trailing bytes after checksum");
  if (crc32(bytes.first(body)) != stored_crc) throw IntegrityError("record: file checksum mismatch");
  if (helper_len != rec.num_frozen) throw IntegrityError("record: helper length differs from num_frozen");
  rec.embedding = Embedding::InformationSet;

  PolarCodeSpec polar;
  try {
    polar = construct_frozen_set(rec.polar_n, rec.num_frozen, rec.design_param);
  } catch (const std::exception& e) {
    throw DataError(std::string("record: invalid polar parameters: ") + e.what());
  }
  if (frozen_set_crc32(polar.frozen) != rec.frozen_set_crc32)
    throw IntegrityError("record: frozen-set checksum does not match the recomputed frozen set");
  return rec;
}

}  // namespace ternkey
