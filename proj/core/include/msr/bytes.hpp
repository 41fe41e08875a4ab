#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msr/errors.hpp"

namespace msr {

using Bytes = std::vector<std::uint8_t>;

// Little-endian append helpers for the private containers.
inline void put_u8(Bytes& out, std::uint8_t v) { out.push_back(v); }

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Bounds-checked little-endian reader; failures name the field being read.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8(const std::string& field) {
    require(1, field);
    return data_[pos_++];
  }

  std::uint32_t u32(const std::string& field) {
    require(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{data_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const std::string& field) {
    require(n, field);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void require(std::size_t n, const std::string& field) const {
    if (data_.size() - pos_ < n) throw FormatError(field, "truncated");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

// 64-bit FNV-1a, used for manifest input/output digests.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace msr
