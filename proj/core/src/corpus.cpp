#include "msr/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace msr::corpus {

namespace {

std::uint64_t hash64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform integer in [0, n) from a hashed key.
int pick(std::uint64_t key, int n) { return static_cast<int>(hash64(key) % static_cast<std::uint64_t>(n)); }

void fill_rect(ImagePlane& p, int x0, int y0, int x1, int y1, std::uint8_t v) {
  x0 = std::max(x0, 0), y0 = std::max(y0, 0);
  x1 = std::min(x1, p.width()), y1 = std::min(y1, p.height());
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) p.at(x, y) = v;
}

}  // namespace

ImagePlane steps(int size) {
  ImagePlane p(size, size, 40);
  const int h = size / 2;
  fill_rect(p, h, 0, size, h, 200);               // vertical step, top half
  fill_rect(p, 0, h, size, size, 120);            // horizontal step
  fill_rect(p, size / 8, h + size / 8, size / 2, size - size / 8, 230);  // bright box
  // Diagonal step in the lower right quadrant.
  for (int y = h; y < size; ++y)
    for (int x = h; x < size; ++x)
      if ((x - h) > (y - h)) p.at(x, y) = 20;
  // Thin bars in the top-left quadrant.
  for (int k = 0; k < 5; ++k) fill_rect(p, size / 16 + k * size / 12, size / 16, size / 16 + k * size / 12 + 3, h - size / 16, 255);
  return p;
}

ImagePlane gradient(int size) {
  ImagePlane p(size, size);
  const int span = 2 * (size - 1);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) p.at(x, y) = static_cast<std::uint8_t>((255 * (x + y) + span / 2) / span);
  return p;
}

ImagePlane glyphs(int size) {
  // Rows of 5x7 pseudo-random dot-matrix glyphs scaled by 2, dark on light.
  ImagePlane p(size, size, 235);
  const int cell = 2, gw = 5 * cell, gh = 7 * cell, adv = gw + 4, line = gh + 8;
  int glyph = 0;
  for (int top = 6; top + gh < size; top += line)
    for (int left = 6; left + gw < size; left += adv, ++glyph) {
      if (pick(static_cast<std::uint64_t>(glyph) * 977 + 1, 9) == 0) continue;  // word gap
      for (int gy = 0; gy < 7; ++gy)
        for (int gx = 0; gx < 5; ++gx) {
          // Vertical stroke bias keeps glyphs letter-like rather than noise.
          const bool stem = gx == 0 || (gx == 4 && pick(glyph * 31 + 7, 2));
          const bool bar = gy == 0 || gy == 3 || gy == 6;
          const bool on = stem || (bar && pick(static_cast<std::uint64_t>(glyph) * 131 + gy * 7 + gx, 3) != 0);
          if (on) fill_rect(p, left + gx * cell, top + gy * cell, left + (gx + 1) * cell, top + (gy + 1) * cell, 25);
        }
    }
  return p;
}

ImagePlane checkerboard(int size, int cell) {
  ImagePlane p(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) p.at(x, y) = ((x / cell + y / cell) % 2) ? 208 : 48;
  return p;
}

ImagePlane blobs(int size) {
  FloatPlane f(size, size, 60.0);
  for (int k = 0; k < 6; ++k) {
    const double cx = size * (0.15 + 0.7 * pick(k * 3 + 11, 1000) / 1000.0);
    const double cy = size * (0.15 + 0.7 * pick(k * 3 + 12, 1000) / 1000.0);
    const double r = size * (0.08 + 0.12 * pick(k * 3 + 13, 1000) / 1000.0);
    const double amp = (k % 2 ? 1.0 : -0.5) * 110.0;
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        f.at(x, y) += amp * std::exp(-d2 / (2.0 * r * r));
      }
  }
  return to_plane(f);
}

ImagePlane texture(int size) {
  // Multi-octave value noise with bilinear interpolation plus a few hard
  // occluding shapes, a stand-in for a natural photograph.
  FloatPlane f(size, size, 0.0);
  double amp = 64.0;
  for (int octave = 0, cell = 64; octave < 5; ++octave, cell /= 2, amp *= 0.55) {
    auto lattice = [&](int gx, int gy) {
      return pick((static_cast<std::uint64_t>(octave) << 40) ^ (static_cast<std::uint64_t>(gx) << 20) ^ gy, 1024) / 1023.0 - 0.5;
    };
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const int gx = x / cell, gy = y / cell;
        const double tx = static_cast<double>(x % cell) / cell, ty = static_cast<double>(y % cell) / cell;
        const double sx = tx * tx * (3 - 2 * tx), sy = ty * ty * (3 - 2 * ty);
        const double a = lattice(gx, gy), b = lattice(gx + 1, gy);
        const double c = lattice(gx, gy + 1), d = lattice(gx + 1, gy + 1);
        f.at(x, y) += 2.0 * amp * ((a * (1 - sx) + b * sx) * (1 - sy) + (c * (1 - sx) + d * sx) * sy);
      }
  }
  for (auto& v : f.data) v += 128.0;
  // Occluders: a disc and two rectangles with their own shading.
  const double cx = size * 0.65, cy = size * 0.35, r = size * 0.14;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < r * r) f.at(x, y) = 200.0 + 0.1 * (x - cx);
      if (x > size / 8 && x < size * 3 / 8 && y > size * 5 / 8 && y < size * 7 / 8) f.at(x, y) = 45.0 + 0.2 * y - 0.2 * size * 5 / 8;
      if (x > size / 2 && x < size * 7 / 8 && y > size * 11 / 16 && y < size * 3 / 4) f.at(x, y) = 170.0;
    }
  return to_plane(f);
}

std::vector<Item> all(int size) {
  return {
      {"steps", steps(size), true, false},       {"gradient", gradient(size), false, true},
      {"glyphs", glyphs(size), true, false},     {"checker", checkerboard(size), true, false},
      {"blobs", blobs(size), false, true},       {"texture", texture(size), false, false},
  };
}

std::vector<Item> edge_rich(int size) {
  auto items = all(size);
  std::erase_if(items, [](const Item& i) { return !i.edge_rich; });
  return items;
}

}  // namespace msr::corpus
