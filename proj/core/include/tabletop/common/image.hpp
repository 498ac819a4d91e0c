#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace tabletop {

template <typename T>
class Image {
 public:
  Image() : width_(0), height_(0) {}
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  T& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const {
    return data_[static_cast<size_t>(y) * width_ + x];
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const Image&) const = default;

 private:
  int width_;
  int height_;
  std::vector<T> data_;
};

using MaskImage = Image<std::uint8_t>;   // nonzero = foreground
using DepthImage = Image<double>;        // meters, 0 = no return
using IndexImage = Image<std::int32_t>;  // object index, -1 = background

// Binary PGM (P5). Masks are written with foreground 255 so they are
// viewable; readers treat any nonzero sample as foreground. P2 is accepted
// on read for hand-written files.
void write_pgm(const MaskImage& img, const std::filesystem::path& path);
MaskImage read_pgm(const std::filesystem::path& path);

// Grayscale dump of a scalar field scaled to [0, 255] over its finite range.
void write_pgm_scaled(const Image<double>& img, const std::filesystem::path& path);

int mask_area(const MaskImage& mask);
// (x, y) mean of foreground pixel centers; call only on nonempty masks.
std::pair<double, double> mask_centroid(const MaskImage& mask);

}  // namespace tabletop
