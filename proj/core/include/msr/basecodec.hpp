#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "msr/bytes.hpp"
#include "msr/pixelcore.hpp"

namespace msr {

// JPEG-style quality knob, 1..100 (IJG convention).
class QualityFactor {
 public:
  explicit QualityFactor(int q);
  int value() const noexcept { return q_; }
  friend bool operator==(QualityFactor, QualityFactor) = default;

 private:
  int q_;
};

using QuantTable = std::array<std::uint16_t, 64>;  // natural (row-major) order
using CoeffBlock = std::array<std::int16_t, 64>;   // zigzag order

// ITU-T T.81 Annex K.1 luminance quantization table, natural order.
extern const QuantTable kAnnexKLuminance;
// Zigzag position -> natural index.
extern const std::array<std::uint8_t, 64> kZigzag;

// IJG scaling: scale = 5000/q for q < 50 else 200 - 2q;
// entry = clamp(floor((base * scale + 50) / 100), 1, 255).
QuantTable quant_table(QualityFactor q);

// Payload plus the header fields of the "MSRB" container.
struct BaseBitstream {
  Bytes payload;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t q = 50;

  std::uint64_t bit_count() const noexcept { return 8ULL * payload.size(); }
};

// Fixed container header size in bytes: magic(4) + width(4) + height(4) + q(1) + length(4).
inline constexpr std::size_t kBaseHeaderBytes = 17;

BaseBitstream base_encode(const ImagePlane& plane, QualityFactor q);
ImagePlane base_decode(const BaseBitstream& stream);

// Base-layer contribution to R; payload bits only.
inline std::uint64_t rate_of(const BaseBitstream& s) noexcept { return s.bit_count(); }

Bytes serialize(const BaseBitstream& s);
BaseBitstream parse_base_container(std::span<const std::uint8_t> bytes);

// Entropy layer on its own: DC differential + AC run-length Huffman coding of
// quantized blocks with the Annex K typical tables. DC values must lie in
// [-1024, 1023] and AC values in [-1023, 1023].
Bytes entropy_encode_blocks(std::span<const CoeffBlock> blocks);
std::vector<CoeffBlock> entropy_decode_blocks(std::span<const std::uint8_t> payload,
                                              std::size_t block_count);

}  // namespace msr
