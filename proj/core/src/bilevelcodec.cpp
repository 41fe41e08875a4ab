#include "msr/bilevelcodec.hpp"

#include <algorithm>
#include <bit>

namespace msr {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
}

void ContextState::update(int bit) noexcept {
  const int shift = std::min(7, static_cast<int>(std::bit_width(static_cast<unsigned>(hits) + 1)));
  if (bit == 0)
    p0 = static_cast<std::uint16_t>(p0 + ((65536u - p0) >> shift));
  else
    p0 = static_cast<std::uint16_t>(p0 - (p0 >> shift));
  if (hits < 255) ++hits;
}

void ArithEncoder::encode(int bit, ContextState& ctx) {
  const std::uint32_t bound = (range_ >> 16) * ctx.p0;
  if (bit == 0) {
    range_ = bound;
  } else {
    low_ += bound;
    range_ -= bound;
  }
  ctx.update(bit);
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void ArithEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      if (!first_) out_.push_back(static_cast<std::uint8_t>(temp + carry));
      first_ = false;
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

Bytes ArithEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

ArithDecoder::ArithDecoder(std::span<const std::uint8_t> data) : data_(data) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next();
}

std::uint8_t ArithDecoder::next() {
  if (pos_ >= data_.size()) throw DecodeError(pos_, "arithmetic payload truncated");
  return data_[pos_++];
}

int ArithDecoder::decode(ContextState& ctx) {
  const std::uint32_t bound = (range_ >> 16) * ctx.p0;
  int bit;
  if (code_ < bound) {
    range_ = bound;
    bit = 0;
  } else {
    code_ -= bound;
    range_ -= bound;
    bit = 1;
  }
  ctx.update(bit);
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | next();
  }
  return bit;
}

std::uint32_t template_context(std::span<const std::uint8_t> bits, int width, int height, int x,
                               int y) {
  (void)height;
  auto px = [&](int xx, int yy) -> std::uint32_t {
    if (xx < 0 || yy < 0 || xx >= width) return 0;
    return bits[static_cast<std::size_t>(yy) * width + xx];
  };
  std::uint32_t c = 0;
  c |= px(x - 1, y) << 0;
  c |= px(x - 2, y) << 1;
  c |= px(x + 2, y - 1) << 2;
  c |= px(x + 1, y - 1) << 3;
  c |= px(x, y - 1) << 4;
  c |= px(x - 1, y - 1) << 5;
  c |= px(x - 2, y - 1) << 6;
  c |= px(x + 1, y - 2) << 7;
  c |= px(x, y - 2) << 8;
  c |= px(x - 1, y - 2) << 9;
  return c;
}

namespace {

std::vector<std::uint8_t> bit_plane(const MetadataPlane& m, int bit) {
  std::vector<std::uint8_t> out(m.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (m.sites()[i] >> bit) & 1;
  return out;
}

}  // namespace

MetaBitstream meta_encode(const MetadataPlane& m) {
  const int w = m.width(), h = m.height();
  ArithEncoder enc;
  const auto lsb = bit_plane(m, 0);
  std::vector<ContextState> ctx(1u << kTemplateBits);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      enc.encode(lsb[static_cast<std::size_t>(y) * w + x], ctx[template_context(lsb, w, h, x, y)]);

  if (m.depth() == 2) {
    const auto msb = bit_plane(m, 1);
    std::vector<ContextState> mctx(1u << (kTemplateBits + 1));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const auto c = template_context(msb, w, h, x, y) | (std::uint32_t{lsb[i]} << kTemplateBits);
        enc.encode(msb[i], mctx[c]);
      }
  }

  MetaBitstream s;
  s.payload = enc.finish();
  s.width = static_cast<std::uint32_t>(w);
  s.height = static_cast<std::uint32_t>(h);
  s.depth = static_cast<std::uint8_t>(m.depth());
  s.template_id = kTemplate0;
  return s;
}

MetadataPlane meta_decode(const MetaBitstream& s) {
  if (s.template_id != kTemplate0) throw DecodeError(0, "unsupported template id");
  if (s.depth != 1 && s.depth != 2) throw DecodeError(0, "unsupported depth");
  if (s.width < 1 || s.height < 1) throw DecodeError(0, "zero dimension");
  const int w = static_cast<int>(s.width), h = static_cast<int>(s.height);
  ArithDecoder dec(s.payload);

  std::vector<std::uint8_t> lsb(static_cast<std::size_t>(w) * h);
  std::vector<ContextState> ctx(1u << kTemplateBits);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      lsb[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(dec.decode(ctx[template_context(lsb, w, h, x, y)]));

  std::vector<std::uint8_t> sites = lsb;
  if (s.depth == 2) {
    std::vector<std::uint8_t> msb(lsb.size());
    std::vector<ContextState> mctx(1u << (kTemplateBits + 1));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const auto c = template_context(msb, w, h, x, y) | (std::uint32_t{lsb[i]} << kTemplateBits);
        msb[i] = static_cast<std::uint8_t>(dec.decode(mctx[c]));
        sites[i] = static_cast<std::uint8_t>(lsb[i] | (msb[i] << 1));
      }
  }
  if (dec.consumed() != s.payload.size())
    throw DecodeError(dec.consumed(), "trailing bytes after arithmetic payload");
  return MetadataPlane(w, h, s.depth, std::move(sites));
}

Bytes serialize(const MetaBitstream& s) {
  Bytes out = {'M', 'S', 'R', 'M'};
  put_u32(out, s.width);
  put_u32(out, s.height);
  put_u8(out, s.depth);
  put_u8(out, s.template_id);
  put_u32(out, static_cast<std::uint32_t>(s.payload.size()));
  out.insert(out.end(), s.payload.begin(), s.payload.end());
  return out;
}

MetaBitstream parse_meta_container(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), "MSRM")) throw FormatError("magic", "expected MSRM");
  MetaBitstream s;
  s.width = r.u32("width");
  s.height = r.u32("height");
  s.depth = r.u8("depth");
  s.template_id = r.u8("template_id");
  if (s.width == 0) throw FormatError("width", "must be >= 1");
  if (s.height == 0) throw FormatError("height", "must be >= 1");
  if (s.depth != 1 && s.depth != 2) throw FormatError("depth", "must be 1 or 2");
  if (s.template_id != kTemplate0) throw FormatError("template_id", "unknown template");
  const auto len = r.u32("payload length");
  auto payload = r.take(len, "payload");
  s.payload.assign(payload.begin(), payload.end());
  if (r.remaining() != 0) throw FormatError("payload", "trailing bytes after payload");
  return s;
}

}  // namespace msr
