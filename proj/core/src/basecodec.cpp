#include "msr/basecodec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace msr {

QualityFactor::QualityFactor(int q) : q_(q) {
  if (q < 1 || q > 100) throw ParameterError("quality factor must be in [1, 100]");
}

const QuantTable kAnnexKLuminance = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

const std::array<std::uint8_t, 64> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

QuantTable quant_table(QualityFactor q) {
  const int qv = q.value();
  const int scale = qv < 50 ? 5000 / qv : 200 - 2 * qv;
  QuantTable t{};
  for (int i = 0; i < 64; ++i) {
    const int v = (kAnnexKLuminance[i] * scale + 50) / 100;
    t[i] = static_cast<std::uint16_t>(std::clamp(v, 1, 255));
  }
  return t;
}

namespace {

// ------------------------------------------------------------ Huffman tables

constexpr std::array<std::uint8_t, 16> kDcBits = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
constexpr std::array<std::uint8_t, 12> kDcVals = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

constexpr std::array<std::uint8_t, 16> kAcBits = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d};
constexpr std::array<std::uint8_t, 162> kAcVals = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51,
    0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1,
    0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18,
    0x19, 0x1a, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
    0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57,
    0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92,
    0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
    0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3,
    0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8,
    0xd9, 0xda, 0xe1, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2,
    0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

// Canonical code assignment (T.81 Annex C) plus decode tables (Annex F.2.2.3).
struct HuffTable {
  std::array<std::uint16_t, 256> code{};
  std::array<std::uint8_t, 256> length{};
  std::array<std::int32_t, 17> maxcode{};
  std::array<std::int32_t, 17> valptr{};
  std::array<std::int32_t, 17> mincode{};
  std::vector<std::uint8_t> vals;

  HuffTable(std::span<const std::uint8_t, 16> bits, std::span<const std::uint8_t> values)
      : vals(values.begin(), values.end()) {
    std::uint16_t c = 0;
    std::size_t k = 0;
    for (int len = 1; len <= 16; ++len) {
      valptr[len] = static_cast<std::int32_t>(k);
      mincode[len] = c;
      for (int i = 0; i < bits[len - 1]; ++i) {
        code[vals[k]] = c;
        length[vals[k]] = static_cast<std::uint8_t>(len);
        ++c;
        ++k;
      }
      maxcode[len] = bits[len - 1] ? c - 1 : -1;
      c = static_cast<std::uint16_t>(c << 1);
    }
  }
};

const HuffTable& dc_table() {
  static const HuffTable t(kDcBits, kDcVals);
  return t;
}

const HuffTable& ac_table() {
  static const HuffTable t(kAcBits, kAcVals);
  return t;
}

// ------------------------------------------------------------ bit I/O

class BitWriter {
 public:
  void put(std::uint32_t bits, int n) {
    for (int i = n - 1; i >= 0; --i) {
      acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((bits >> i) & 1U));
      if (++fill_ == 8) {
        out_.push_back(acc_);
        acc_ = 0;
        fill_ = 0;
      }
    }
  }

  // Pads the last partial byte with 1-bits, as JPEG does.
  Bytes finish() {
    if (fill_ > 0) put((1U << (8 - fill_)) - 1, 8 - fill_);
    return std::move(out_);
  }

 private:
  Bytes out_;
  std::uint8_t acc_ = 0;
  int fill_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}

  int bit() {
    if (byte_ >= data_.size()) throw DecodeError(byte_, "payload truncated");
    const int b = (data_[byte_] >> (7 - bitpos_)) & 1;
    if (++bitpos_ == 8) {
      bitpos_ = 0;
      ++byte_;
    }
    return b;
  }

  std::uint32_t bits(int n) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | static_cast<std::uint32_t>(bit());
    return v;
  }

  std::size_t offset() const noexcept { return byte_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t byte_ = 0;
  int bitpos_ = 0;
};

int category(int v) {
  int a = std::abs(v);
  int n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

void put_value(BitWriter& w, int v, int cat) {
  if (cat == 0) return;
  // Negative values are sent as v - 1 in cat bits (one's complement form).
  const std::uint32_t bits = v >= 0 ? static_cast<std::uint32_t>(v)
                                    : static_cast<std::uint32_t>(v + (1 << cat) - 1);
  w.put(bits, cat);
}

int extend(std::uint32_t bits, int cat) {
  if (cat == 0) return 0;
  const int v = static_cast<int>(bits);
  return v < (1 << (cat - 1)) ? v - (1 << cat) + 1 : v;
}

void put_symbol(BitWriter& w, const HuffTable& t, std::uint8_t sym) {
  w.put(t.code[sym], t.length[sym]);
}

std::uint8_t read_symbol(BitReader& r, const HuffTable& t) {
  std::int32_t code = r.bit();
  for (int len = 1; len <= 16; ++len) {
    if (t.maxcode[len] >= 0 && code <= t.maxcode[len] && code >= t.mincode[len])
      return t.vals[t.valptr[len] + code - t.mincode[len]];
    if (len < 16) code = (code << 1) | r.bit();
  }
  throw DecodeError(r.offset(), "invalid Huffman code");
}

// ------------------------------------------------------------ DCT

// Orthonormal 8-point DCT-II basis: basis[u][x] = c(u) cos((2x+1) u pi / 16).
const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> b{};
    for (int u = 0; u < 8; ++u)
      for (int x = 0; x < 8; ++x) {
        const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
        b[u][x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    return b;
  }();
  return basis;
}

void fdct(const double in[64], double out[64]) {
  const auto& b = dct_basis();
  double tmp[64];
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += b[u][x] * in[y * 8 + x];
      tmp[y * 8 + u] = s;
    }
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += b[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = s;
    }
}

void idct(const double in[64], double out[64]) {
  const auto& b = dct_basis();
  double tmp[64];
  for (int v = 0; v < 8; ++v)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int u = 0; u < 8; ++u) s += b[u][x] * in[v * 8 + u];
      tmp[v * 8 + x] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int v = 0; v < 8; ++v) s += b[v][y] * tmp[v * 8 + x];
      out[y * 8 + x] = s;
    }
}

constexpr int kDcMin = -1024, kDcMax = 1023, kAcMax = 1023;

}  // namespace

// ------------------------------------------------------------ entropy layer

Bytes entropy_encode_blocks(std::span<const CoeffBlock> blocks) {
  BitWriter w;
  const auto& dc = dc_table();
  const auto& ac = ac_table();
  int pred = 0;
  for (const auto& blk : blocks) {
    if (blk[0] < kDcMin || blk[0] > kDcMax) throw ParameterError("DC coefficient out of range");
    const int diff = blk[0] - pred;
    pred = blk[0];
    const int dcat = category(diff);
    put_symbol(w, dc, static_cast<std::uint8_t>(dcat));
    put_value(w, diff, dcat);

    int run = 0;
    for (int k = 1; k < 64; ++k) {
      const int v = blk[k];
      if (std::abs(v) > kAcMax) throw ParameterError("AC coefficient out of range");
      if (v == 0) {
        ++run;
        continue;
      }
      while (run > 15) {
        put_symbol(w, ac, 0xF0);  // ZRL
        run -= 16;
      }
      const int cat = category(v);
      put_symbol(w, ac, static_cast<std::uint8_t>((run << 4) | cat));
      put_value(w, v, cat);
      run = 0;
    }
    if (run > 0) put_symbol(w, ac, 0x00);  // EOB
  }
  return w.finish();
}

std::vector<CoeffBlock> entropy_decode_blocks(std::span<const std::uint8_t> payload,
                                              std::size_t block_count) {
  BitReader r(payload);
  const auto& dc = dc_table();
  const auto& ac = ac_table();
  std::vector<CoeffBlock> blocks(block_count);
  int pred = 0;
  for (auto& blk : blocks) {
    blk.fill(0);
    const int dcat = read_symbol(r, dc);
    if (dcat > 11) throw DecodeError(r.offset(), "DC category out of range");
    const int dc_value = pred + extend(r.bits(dcat), dcat);
    if (dc_value < kDcMin || dc_value > kDcMax) throw DecodeError(r.offset(), "DC value out of range");
    blk[0] = static_cast<std::int16_t>(dc_value);
    pred = dc_value;

    int k = 1;
    while (k < 64) {
      const std::uint8_t rs = read_symbol(r, ac);
      const int run = rs >> 4;
      const int cat = rs & 0x0F;
      if (cat == 0) {
        if (run == 15) {
          k += 16;
          if (k > 64) throw DecodeError(r.offset(), "zero run past end of block");
          continue;
        }
        break;  // EOB
      }
      k += run;
      if (k > 63) throw DecodeError(r.offset(), "coefficient index past end of block");
      blk[k++] = static_cast<std::int16_t>(extend(r.bits(cat), cat));
    }
  }
  if (r.offset() + 1 < payload.size()) throw DecodeError(r.offset(), "trailing data after last block");
  return blocks;
}

// ------------------------------------------------------------ image layer

BaseBitstream base_encode(const ImagePlane& plane, QualityFactor q) {
  const auto qt = quant_table(q);
  const int bw = (plane.width() + 7) / 8;
  const int bh = (plane.height() + 7) / 8;
  std::vector<CoeffBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(bw) * bh);

  double spatial[64], freq[64];
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          spatial[y * 8 + x] = plane.clamped(bx * 8 + x, by * 8 + y) - 128.0;
      fdct(spatial, freq);
      CoeffBlock blk{};
      for (int k = 0; k < 64; ++k) {
        const int nat = kZigzag[k];
        const double v = round_half_away(freq[nat] / qt[nat]);
        const int lim = k == 0 ? kDcMax : kAcMax;
        const int lo = k == 0 ? kDcMin : -kAcMax;
        blk[k] = static_cast<std::int16_t>(std::clamp(static_cast<int>(v), lo, lim));
      }
      blocks.push_back(blk);
    }

  BaseBitstream s;
  s.payload = entropy_encode_blocks(blocks);
  s.width = static_cast<std::uint32_t>(plane.width());
  s.height = static_cast<std::uint32_t>(plane.height());
  s.q = static_cast<std::uint8_t>(q.value());
  return s;
}

ImagePlane base_decode(const BaseBitstream& stream) {
  if (stream.width < 1 || stream.height < 1) throw DecodeError(0, "zero image dimension");
  const QualityFactor q(stream.q);
  const auto qt = quant_table(q);
  const int w = static_cast<int>(stream.width);
  const int h = static_cast<int>(stream.height);
  const int bw = (w + 7) / 8;
  const int bh = (h + 7) / 8;
  const auto blocks = entropy_decode_blocks(stream.payload, static_cast<std::size_t>(bw) * bh);

  ImagePlane out(w, h);
  double freq[64], spatial[64];
  std::size_t i = 0;
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx, ++i) {
      for (int k = 0; k < 64; ++k) {
        const int nat = kZigzag[k];
        freq[nat] = static_cast<double>(blocks[i][k]) * qt[nat];
      }
      idct(freq, spatial);
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const int px = bx * 8 + x, py = by * 8 + y;
          if (px < w && py < h) out.at(px, py) = to_u8(spatial[y * 8 + x] + 128.0);
        }
    }
  return out;
}

Bytes serialize(const BaseBitstream& s) {
  Bytes out = {'M', 'S', 'R', 'B'};
  put_u32(out, s.width);
  put_u32(out, s.height);
  put_u8(out, s.q);
  put_u32(out, static_cast<std::uint32_t>(s.payload.size()));
  out.insert(out.end(), s.payload.begin(), s.payload.end());
  return out;
}

BaseBitstream parse_base_container(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), "MSRB")) throw FormatError("magic", "expected MSRB");
  BaseBitstream s;
  s.width = r.u32("width");
  s.height = r.u32("height");
  s.q = r.u8("q");
  if (s.width == 0) throw FormatError("width", "must be >= 1");
  if (s.height == 0) throw FormatError("height", "must be >= 1");
  if (s.q < 1 || s.q > 100) throw FormatError("q", "must be in [1, 100]");
  const auto len = r.u32("payload length");
  auto payload = r.take(len, "payload");
  s.payload.assign(payload.begin(), payload.end());
  if (r.remaining() != 0) throw FormatError("payload", "trailing bytes after payload");
  return s;
}

}  // namespace msr
