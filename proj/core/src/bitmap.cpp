#include "sparsefusion/bitmap.hpp"

#include <bit>
#include <stdexcept>

namespace sparsefusion {

Bitmap::Bitmap(int width, int height)
    : width_(width),
      height_(height),
      words_per_row_((width + 63) / 64),
      words_(static_cast<std::size_t>(words_per_row_) * height, 0) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("Bitmap: dims must be positive");
  }
}

std::size_t Bitmap::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

void Bitmap::clear_tail_bits() {
  const int tail = width_ & 63;
  if (tail == 0) return;
  const std::uint64_t mask = (1ULL << tail) - 1;
  for (int y = 0; y < height_; ++y) {
    words_[row_offset(y) + words_per_row_ - 1] &= mask;
  }
}

namespace {

// out = row shifted one pixel left/right in image space, zero fill.
void shift_row_left(const std::uint64_t* row, std::uint64_t* out, int words) {
  for (int i = 0; i < words; ++i) {
    out[i] = row[i] >> 1;
    if (i + 1 < words) out[i] |= row[i + 1] << 63;
  }
}

void shift_row_right(const std::uint64_t* row, std::uint64_t* out, int words) {
  for (int i = words - 1; i >= 0; --i) {
    out[i] = row[i] << 1;
    if (i > 0) out[i] |= row[i - 1] >> 63;
  }
}

}  // namespace

void Bitmap::dilate_once() {
  // Horizontal pass: or of left/center/right, then vertical or of rows.
  std::vector<std::uint64_t> horiz(words_.size(), 0);
  std::vector<std::uint64_t> tmp(words_per_row_);
  for (int y = 0; y < height_; ++y) {
    const std::uint64_t* row = &words_[row_offset(y)];
    std::uint64_t* out = &horiz[row_offset(y)];
    for (int i = 0; i < words_per_row_; ++i) out[i] = row[i];
    shift_row_left(row, tmp.data(), words_per_row_);
    for (int i = 0; i < words_per_row_; ++i) out[i] |= tmp[i];
    shift_row_right(row, tmp.data(), words_per_row_);
    for (int i = 0; i < words_per_row_; ++i) out[i] |= tmp[i];
  }
  for (int y = 0; y < height_; ++y) {
    std::uint64_t* out = &words_[row_offset(y)];
    const std::uint64_t* mid = &horiz[row_offset(y)];
    for (int i = 0; i < words_per_row_; ++i) out[i] = mid[i];
    if (y > 0) {
      const std::uint64_t* up = &horiz[row_offset(y - 1)];
      for (int i = 0; i < words_per_row_; ++i) out[i] |= up[i];
    }
    if (y + 1 < height_) {
      const std::uint64_t* down = &horiz[row_offset(y + 1)];
      for (int i = 0; i < words_per_row_; ++i) out[i] |= down[i];
    }
  }
  clear_tail_bits();
}

void Bitmap::erode_once() {
  // Erosion with ones padding: a bit survives iff all in-image neighbors
  // in the 3x3 window are set.
  const int tail = width_ & 63;
  std::vector<std::uint64_t> horiz(words_.size(), 0);
  std::vector<std::uint64_t> tmp(words_per_row_);
  for (int y = 0; y < height_; ++y) {
    const std::uint64_t* row = &words_[row_offset(y)];
    std::uint64_t* out = &horiz[row_offset(y)];
    for (int i = 0; i < words_per_row_; ++i) out[i] = row[i];
    // Left shift with ones entering at the right image edge.
    shift_row_left(row, tmp.data(), words_per_row_);
    if (tail) {
      tmp[words_per_row_ - 1] |= 1ULL << (tail - 1);
    } else {
      tmp[words_per_row_ - 1] |= 1ULL << 63;
    }
    for (int i = 0; i < words_per_row_; ++i) out[i] &= tmp[i];
    // Right shift with a one entering at the left image edge.
    shift_row_right(row, tmp.data(), words_per_row_);
    tmp[0] |= 1ULL;
    for (int i = 0; i < words_per_row_; ++i) out[i] &= tmp[i];
  }
  for (int y = 0; y < height_; ++y) {
    std::uint64_t* out = &words_[row_offset(y)];
    const std::uint64_t* mid = &horiz[row_offset(y)];
    for (int i = 0; i < words_per_row_; ++i) out[i] = mid[i];
    if (y > 0) {
      const std::uint64_t* up = &horiz[row_offset(y - 1)];
      for (int i = 0; i < words_per_row_; ++i) out[i] &= up[i];
    }
    if (y + 1 < height_) {
      const std::uint64_t* down = &horiz[row_offset(y + 1)];
      for (int i = 0; i < words_per_row_; ++i) out[i] &= down[i];
    }
  }
  clear_tail_bits();
}

void Bitmap::dilate(int radius) {
  for (int i = 0; i < radius; ++i) dilate_once();
}

void Bitmap::erode(int radius) {
  for (int i = 0; i < radius; ++i) erode_once();
}

void Bitmap::union_with(const Bitmap& other) {
  if (other.width_ != width_ || other.height_ != height_) {
    throw std::invalid_argument("Bitmap::union_with: size mismatch");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
}

bool Bitmap::intersects(const Bitmap& other) const {
  if (other.width_ != width_ || other.height_ != height_) return false;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & other.words_[i]) return true;
  }
  return false;
}

bool Bitmap::tight_bounds(int& min_x, int& min_y, int& max_x,
                          int& max_y) const {
  min_x = width_;
  min_y = height_;
  max_x = -1;
  max_y = -1;
  for (int y = 0; y < height_; ++y) {
    const std::uint64_t* row = &words_[row_offset(y)];
    for (int i = 0; i < words_per_row_; ++i) {
      std::uint64_t w = row[i];
      if (!w) continue;
      if (y < min_y) min_y = y;
      max_y = y;
      const int lo = i * 64 + std::countr_zero(w);
      const int hi = i * 64 + 63 - std::countl_zero(w);
      if (lo < min_x) min_x = lo;
      if (hi > max_x) max_x = hi;
    }
  }
  return max_y >= 0;
}

std::vector<std::uint32_t> Bitmap::run_length_encode() const {
  std::vector<std::uint32_t> runs;
  std::uint32_t run = 0;
  bool current = false;  // encoding starts with a run of unset bits
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (get(x, y) == current) {
        ++run;
      } else {
        runs.push_back(run);
        current = !current;
        run = 1;
      }
    }
  }
  runs.push_back(run);
  return runs;
}

Bitmap Bitmap::run_length_decode(int width, int height,
                                 const std::vector<std::uint32_t>& runs) {
  Bitmap bm(width, height);
  std::uint64_t pos = 0;
  bool current = false;
  for (std::uint32_t run : runs) {
    if (current) {
      for (std::uint64_t i = pos; i < pos + run; ++i) {
        bm.set(static_cast<int>(i % width), static_cast<int>(i / width));
      }
    }
    pos += run;
    current = !current;
  }
  if (pos != static_cast<std::uint64_t>(width) * height) {
    throw std::invalid_argument("Bitmap: run lengths do not cover the grid");
  }
  return bm;
}

bool Bitmap::operator==(const Bitmap& other) const {
  return width_ == other.width_ && height_ == other.height_ &&
         words_ == other.words_;
}

}  // namespace sparsefusion
