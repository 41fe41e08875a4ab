#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "msr/bytes.hpp"
#include "msr/metagen.hpp"

namespace msr {

// ---------------------------------------------------------------------------
// Adaptive binary arithmetic coder
//
// Byte-oriented range coder with carry propagation (the LZMA "rc" scheme):
// 32-bit range, 33-bit low, renormalization whenever range < 2^24. Each
// context holds a 16-bit probability that the next bit is 0 plus a saturating
// hit count n:
//
//   shift = min(7, bit_width(n + 1))       // 1, 2, 2, 3, 3, 3, 3, 4, ...
//   bit 0: p += (65536 - p) >> shift
//   bit 1: p -= p >> shift
//   n = min(n + 1, 255)
//
// Initial state p = 32768, n = 0. Split point: bound = (range >> 16) * p.
// The encoder drops the constant leading zero byte LZMA emits, so the
// decoder primes its code register with 4 bytes.
// ---------------------------------------------------------------------------

struct ContextState {
  std::uint16_t p0 = 32768;
  std::uint8_t hits = 0;

  void update(int bit) noexcept;
};

class ArithEncoder {
 public:
  void encode(int bit, ContextState& ctx);
  Bytes finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  bool first_ = true;
  Bytes out_;
};

class ArithDecoder {
 public:
  explicit ArithDecoder(std::span<const std::uint8_t> data);
  int decode(ContextState& ctx);
  // Bytes consumed so far; equals the payload size after the last symbol of a
  // valid stream.
  std::size_t consumed() const noexcept { return pos_; }

 private:
  std::uint8_t next();

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

// ---------------------------------------------------------------------------
// Generic-region context template (template_id 0)
//
//   row y-2:          c9 c8 c7             offsets x-1, x, x+1
//   row y-1:       c6 c5 c4 c3 c2          offsets x-2 .. x+2
//   row y  :       c1 c0  ?                offsets x-2, x-1
//
// context = sum(ci << i); out-of-bounds neighbours read 0. Depth-2 planes are
// coded as two bit-planes, LSB first then MSB; MSB contexts append the
// co-located LSB as bit 10.
// ---------------------------------------------------------------------------

inline constexpr std::uint8_t kTemplate0 = 0;
inline constexpr int kTemplateBits = 10;

// Context number for site (x, y) of a bit-plane (values 0/1, row-major).
std::uint32_t template_context(std::span<const std::uint8_t> bits, int width, int height, int x,
                               int y);

struct MetaBitstream {
  Bytes payload;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t depth = 1;
  std::uint8_t template_id = kTemplate0;

  std::uint64_t bit_count() const noexcept { return 8ULL * payload.size(); }
};

// magic(4) + width(4) + height(4) + depth(1) + template_id(1) + length(4).
inline constexpr std::size_t kMetaHeaderBytes = 18;

MetaBitstream meta_encode(const MetadataPlane& m);
MetadataPlane meta_decode(const MetaBitstream& stream);

// Metadata contribution to R, container header included.
inline std::uint64_t meta_rate(const MetaBitstream& s) noexcept {
  return s.bit_count() + 8ULL * kMetaHeaderBytes;
}

Bytes serialize(const MetaBitstream& s);
MetaBitstream parse_meta_container(std::span<const std::uint8_t> bytes);

}  // namespace msr
