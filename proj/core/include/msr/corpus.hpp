#pragma once

#include <string>
#include <vector>

#include "msr/pixelcore.hpp"

namespace msr::corpus {

// Bundled synthetic test images. All generators are integer/hash based and
// bit-reproducible across platforms.
struct Item {
  std::string name;
  ImagePlane image;
  bool edge_rich;
  bool smooth;
};

inline constexpr int kSize = 256;

ImagePlane steps(int size = kSize);
ImagePlane gradient(int size = kSize);
ImagePlane glyphs(int size = kSize);
ImagePlane checkerboard(int size = kSize, int cell = 16);
ImagePlane blobs(int size = kSize);
ImagePlane texture(int size = kSize);  // the "natural" stand-in

std::vector<Item> all(int size = kSize);
std::vector<Item> edge_rich(int size = kSize);

}  // namespace msr::corpus
