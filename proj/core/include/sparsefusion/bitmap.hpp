// Bit-packed row-major bitmap with word-parallel 3x3 morphology, the
// storage behind instance masks.
#pragma once

#include <cstdint>
#include <vector>

namespace sparsefusion {

class Bitmap {
 public:
  Bitmap() = default;
  Bitmap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool get(int x, int y) const {
    return (words_[row_offset(y) + (x >> 6)] >> (x & 63)) & 1ULL;
  }
  void set(int x, int y) {
    words_[row_offset(y) + (x >> 6)] |= 1ULL << (x & 63);
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  // 3x3 square structuring element applied radius times. Dilation pads
  // with zeros; erosion pads with ones, so closing (dilate then erode by
  // the same radius) is always a superset of the input, image border
  // included.
  void dilate(int radius);
  void erode(int radius);

  void union_with(const Bitmap& other);
  bool intersects(const Bitmap& other) const;

  // Tight bounds of set bits as half-open-free inclusive pixel coords;
  // returns false when no bit is set.
  bool tight_bounds(int& min_x, int& min_y, int& max_x, int& max_y) const;

  // Row-major run-length encoding: alternating run lengths starting with
  // a (possibly zero) run of unset bits. Runs sum to width*height.
  std::vector<std::uint32_t> run_length_encode() const;
  static Bitmap run_length_decode(int width, int height,
                                  const std::vector<std::uint32_t>& runs);

  bool operator==(const Bitmap& other) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int words_per_row_ = 0;
  std::vector<std::uint64_t> words_;

  std::size_t row_offset(int y) const {
    return static_cast<std::size_t>(y) * words_per_row_;
  }
  void dilate_once();
  void erode_once();
  void clear_tail_bits();
};

}  // namespace sparsefusion
