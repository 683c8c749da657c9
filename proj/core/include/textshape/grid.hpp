#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "textshape/error.hpp"

namespace textshape {

/// Dense row-major 2D array. Index as (x, y) = (column, row).
template <typename T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width < 0 ? 0 : width) * static_cast<std::size_t>(height < 0 ? 0 : height),
              fill) {
    if (width < 0 || height < 0) throw ShapeMismatchError("negative grid dimension");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  template <typename U>
  bool same_shape(const Grid2D<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Mask = Grid2D<std::uint8_t>;
using RealGrid = Grid2D<double>;

template <typename A, typename B>
void require_same_shape(const Grid2D<A>& a, const Grid2D<B>& b, const char* what) {
  if (!a.same_shape(b)) throw ShapeMismatchError(std::string("shape mismatch: ") + what);
}

}  // namespace textshape
