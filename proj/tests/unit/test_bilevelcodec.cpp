#include <array>
#include <random>

#include "doctest.h"
#include "msr/bilevelcodec.hpp"
#include "msr/corpus.hpp"
#include "msr/errors.hpp"

using namespace msr;

namespace {

MetadataPlane random_map(std::mt19937_64& rng, int w, int h, double density, int depth = 1) {
  std::bernoulli_distribution on(density);
  std::uniform_int_distribution<int> level(1, 3);
  MetadataPlane m(w, h, depth);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (on(rng)) m.set(x, y, static_cast<std::uint8_t>(depth == 1 ? 1 : level(rng)));
  return m;
}

bool round_trips(const MetadataPlane& m) {
  const auto s = meta_encode(m);
  return meta_decode(s) == m && meta_decode(parse_meta_container(serialize(s))) == m;
}

std::uint64_t raw_bits(const MetadataPlane& m) { return 8 * ((m.size() + 7) / 8); }

}  // namespace

TEST_CASE("context template reads the documented neighbourhood") {
  // 5x3 plane, site (2, 2): every template position set in turn.
  const int w = 5, h = 3;
  const std::pair<int, int> offsets[10] = {{-1, 0}, {-2, 0}, {2, -1}, {1, -1}, {0, -1},
                                           {-1, -1}, {-2, -1}, {1, -2}, {0, -2}, {-1, -2}};
  for (int i = 0; i < 10; ++i) {
    std::vector<std::uint8_t> bits(w * h, 0);
    bits[(2 + offsets[i].second) * w + 2 + offsets[i].first] = 1;
    CHECK(template_context(bits, w, h, 2, 2) == (1u << i));
  }
  std::vector<std::uint8_t> ones(w * h, 1);
  CHECK(template_context(ones, w, h, 2, 2) == 1023u);
  CHECK(template_context(ones, w, h, 0, 0) == 0u);
  // Left border: only c3, c4, c8, c7 and c2 (offsets >= 0 above) are in bounds at x = 0.
  CHECK(template_context(ones, w, h, 0, 2) == ((1u << 2) | (1u << 3) | (1u << 4) | (1u << 7) | (1u << 8)));
}

TEST_CASE("exhaustive round-trip of every plane with w*h <= 16") {
  std::uint64_t checked = 0, bad = 0;
  for (int h = 1; h <= 8; ++h)
    for (int w = 1; w <= 8; ++w) {
      if (w * h > 16) continue;
      const std::uint32_t n = 1u << (w * h);
      for (std::uint32_t pattern = 0; pattern < n; ++pattern) {
        std::vector<std::uint8_t> sites(w * h);
        for (int i = 0; i < w * h; ++i) sites[i] = (pattern >> i) & 1u;
        const MetadataPlane m(w, h, 1, std::move(sites));
        if (meta_decode(meta_encode(m)) != m) ++bad;
        ++checked;
      }
    }
  CHECK(bad == 0);
  CHECK(checked > 3 * 65536);
}

TEST_CASE("random planes round-trip at several densities") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 128);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double density = std::array{0.01, 0.05, 0.20, 0.50}[i % 4];
    if (!round_trips(random_map(rng, dim(rng), dim(rng), density))) ++bad;
  }
  CHECK(bad == 0);
  for (int i = 0; i < 100; ++i)
    CHECK(round_trips(random_map(rng, dim(rng), dim(rng), 0.1 + 0.2 * (i % 4), 2)));
}

TEST_CASE("all-zero 64x64 is tiny") {
  const MetadataPlane zero(64, 64, 1);
  const auto s = meta_encode(zero);
  CHECK(s.payload.size() < 16);
  CHECK(meta_decode(s) == zero);
  CHECK(meta_rate(s) == s.bit_count() + 8 * kMetaHeaderBytes);
  CHECK(meta_rate(s) == 8 * serialize(s).size());
}

TEST_CASE("uniform random bits do not compress") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const auto m = random_map(rng, 64, 64, 0.5);
    CHECK(meta_encode(m).bit_count() >= 0.95 * m.size());
  }
}

TEST_CASE("sparse Canny maps compress at least 4x") {
  int sparse = 0;
  for (const auto& item : corpus::all()) {
    for (const auto& m : sweep_sparsity(item.image, CannyParams{}, 5).maps) {
      INFO(item.name << " density " << m.density());
      if (m.density() > 0.05 || m.count_nonzero() == 0) continue;
      ++sparse;
      CHECK(static_cast<double>(raw_bits(m)) / meta_encode(m).bit_count() >= 4.0);
    }
  }
  CHECK(sparse >= 5);
  const auto natural = canny(corpus::texture(), CannyParams{});
  CHECK(natural.count_nonzero() > 0);
  CHECK(static_cast<double>(raw_bits(natural)) / meta_encode(natural).bit_count() >= 4.0);
}

TEST_CASE("every sweep level and 2-bit map of the corpus round-trips") {
  int pairs = 0, monotone = 0;
  for (const auto& item : corpus::all()) {
    const auto sweep = sweep_sparsity(item.image, CannyParams{}, 5);
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < sweep.maps.size(); ++i) {
      const auto s = meta_encode(sweep.maps[i]);
      CHECK(meta_decode(s) == sweep.maps[i]);
      if (i > 0) {
        ++pairs;
        if (s.bit_count() <= prev) ++monotone;
      }
      prev = s.bit_count();
    }
    const auto g2 = gradient_2bit(item.image, 1.0);
    CHECK(round_trips(g2));
    CHECK(round_trips(downsample_metadata(g2, 4)));
  }
  CHECK(monotone >= 0.9 * pairs);
}

TEST_CASE("decoder consumes exactly the payload") {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution b(0.3);
  std::vector<int> bits(5000);
  for (auto& v : bits) v = b(rng);
  ContextState enc_ctx[4];
  ArithEncoder enc;
  for (std::size_t i = 0; i < bits.size(); ++i) enc.encode(bits[i], enc_ctx[i % 4]);
  const auto payload = enc.finish();
  ContextState dec_ctx[4];
  ArithDecoder dec(payload);
  for (std::size_t i = 0; i < bits.size(); ++i) REQUIRE(dec.decode(dec_ctx[i % 4]) == bits[i]);
  CHECK(dec.consumed() == payload.size());
  for (int i = 0; i < 4; ++i) {
    CHECK(dec_ctx[i].p0 == enc_ctx[i].p0);
    CHECK(dec_ctx[i].hits == enc_ctx[i].hits);
  }
}

TEST_CASE("context adaptation rule") {
  ContextState c;
  c.update(0);
  CHECK(c.p0 == 32768 + (32768 >> 1));
  CHECK(c.hits == 1);
  const std::uint16_t p = c.p0;
  c.update(1);
  CHECK(c.p0 == p - (p >> 2));
  for (int i = 0; i < 400; ++i) c.update(0);
  CHECK(c.hits == 255);
}

TEST_CASE("corrupt meta streams are rejected") {
  std::mt19937_64 rng(4);
  const auto m = random_map(rng, 40, 30, 0.1);
  const auto s = meta_encode(m);

  auto cut = s;
  cut.payload.resize(s.payload.size() / 2);
  CHECK_THROWS_AS(meta_decode(cut), DecodeError);

  auto extra = s;
  extra.payload.push_back(0);
  CHECK_THROWS_AS(meta_decode(extra), DecodeError);

  auto tmpl = s;
  tmpl.template_id = 3;
  CHECK_THROWS_AS(meta_decode(tmpl), DecodeError);

  auto file = serialize(s);
  file[1] = '?';
  CHECK_THROWS_AS(parse_meta_container(file), FormatError);
  file = serialize(s);
  file.resize(file.size() - 1);
  CHECK_THROWS_AS(parse_meta_container(file), FormatError);
}
