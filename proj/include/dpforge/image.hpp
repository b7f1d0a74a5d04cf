#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dpforge {

// Single-channel linear-intensity image, row-major, nominally in [0,1].
class ImagePlane {
 public:
  ImagePlane(int width, int height, double fill = 0.0);
  ImagePlane(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& at(int x, int y) { return data_[index(x, y)]; }
  double at(int x, int y) const { return data_[index(x, y)]; }

  std::span<double> pixels() noexcept { return data_; }
  std::span<const double> pixels() const noexcept { return data_; }

  bool same_geometry(const ImagePlane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  // Clamp every value into [0,1]; NaN becomes 0.
  void clamp_unit() noexcept;

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<double> data_;
};

enum class MaskKind { binary, soft };

// Raindrop coverage map. Binary masks hold exactly {0,1}; soft masks hold [0,1].
class RaindropMask {
 public:
  RaindropMask(int width, int height, MaskKind kind);

  // Validates the range (and {0,1} for binary); throws std::invalid_argument.
  RaindropMask(ImagePlane plane, MaskKind kind);

  // Soft mask from an arbitrary plane, clamped into [0,1].
  static RaindropMask soft_from(ImagePlane plane);

  // Binary mask with 1 wherever plane(x) >= threshold.
  static RaindropMask threshold(const ImagePlane& plane, double threshold);

  int width() const noexcept { return plane_.width(); }
  int height() const noexcept { return plane_.height(); }
  MaskKind kind() const noexcept { return kind_; }

  double at(int x, int y) const { return plane_.at(x, y); }
  void set(int x, int y, double value);

  const ImagePlane& plane() const noexcept { return plane_; }

  // Fraction of pixels with a nonzero value.
  double coverage() const noexcept;

  friend bool operator==(const RaindropMask&, const RaindropMask&) = default;

 private:
  ImagePlane plane_;
  MaskKind kind_;
};

// out(x) = a(x) * b(x). Throws DimensionError on geometry mismatch.
ImagePlane pixel_multiply(const ImagePlane& a, const ImagePlane& b);
ImagePlane pixel_multiply(const RaindropMask& a, const ImagePlane& b);

// out(x) = (l(x) + r(x)) / 2.
ImagePlane average_pair(const ImagePlane& l, const ImagePlane& r);

// out(x) = max(a(x), b(x)); result kind is binary only if both inputs are.
RaindropMask pixel_max(const RaindropMask& a, const RaindropMask& b);

void require_same_geometry(const ImagePlane& a, const ImagePlane& b, const char* what);

}  // namespace dpforge
