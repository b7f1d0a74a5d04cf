#include "dpforge/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dpforge/errors.hpp"

namespace dpforge {

namespace {

std::size_t checked_area(int width, int height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("image dimensions must be >= 1, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

ImagePlane::ImagePlane(int width, int height, double fill)
    : width_(width), height_(height), data_(checked_area(width, height), fill) {}

ImagePlane::ImagePlane(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != checked_area(width, height)) {
    throw std::invalid_argument("pixel buffer size does not match image dimensions");
  }
}

void ImagePlane::clamp_unit() noexcept {
  for (double& v : data_) {
    v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  }
}

RaindropMask::RaindropMask(int width, int height, MaskKind kind)
    : plane_(width, height, 0.0), kind_(kind) {}

RaindropMask::RaindropMask(ImagePlane plane, MaskKind kind) : plane_(std::move(plane)), kind_(kind) {
  for (double v : plane_.pixels()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("mask value outside [0,1]");
    }
    if (kind_ == MaskKind::binary && v != 0.0 && v != 1.0) {
      throw std::invalid_argument("binary mask value not in {0,1}");
    }
  }
}

RaindropMask RaindropMask::soft_from(ImagePlane plane) {
  plane.clamp_unit();
  return RaindropMask(std::move(plane), MaskKind::soft);
}

RaindropMask RaindropMask::threshold(const ImagePlane& plane, double threshold) {
  ImagePlane out(plane.width(), plane.height());
  auto src = plane.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] >= threshold ? 1.0 : 0.0;
  }
  return RaindropMask(std::move(out), MaskKind::binary);
}

void RaindropMask::set(int x, int y, double value) {
  if (!(value >= 0.0 && value <= 1.0) ||
      (kind_ == MaskKind::binary && value != 0.0 && value != 1.0)) {
    throw std::invalid_argument("mask value violates mask kind");
  }
  plane_.at(x, y) = value;
}

double RaindropMask::coverage() const noexcept {
  auto px = plane_.pixels();
  auto covered = std::count_if(px.begin(), px.end(), [](double v) { return v > 0.0; });
  return static_cast<double>(covered) / static_cast<double>(px.size());
}

void require_same_geometry(const ImagePlane& a, const ImagePlane& b, const char* what) {
  if (!a.same_geometry(b)) {
    throw DimensionError(std::string(what) + ": geometry mismatch " + std::to_string(a.width()) +
                         "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                         "x" + std::to_string(b.height()));
  }
}

ImagePlane pixel_multiply(const ImagePlane& a, const ImagePlane& b) {
  require_same_geometry(a, b, "pixel_multiply");
  ImagePlane out(a.width(), a.height());
  auto pa = a.pixels();
  auto pb = b.pixels();
  auto po = out.pixels();
  for (std::size_t i = 0; i < po.size(); ++i) {
    po[i] = pa[i] * pb[i];
  }
  return out;
}

ImagePlane pixel_multiply(const RaindropMask& a, const ImagePlane& b) {
  return pixel_multiply(a.plane(), b);
}

ImagePlane average_pair(const ImagePlane& l, const ImagePlane& r) {
  require_same_geometry(l, r, "average_pair");
  ImagePlane out(l.width(), l.height());
  auto pl = l.pixels();
  auto pr = r.pixels();
  auto po = out.pixels();
  for (std::size_t i = 0; i < po.size(); ++i) {
    po[i] = (pl[i] + pr[i]) * 0.5;
  }
  return out;
}

RaindropMask pixel_max(const RaindropMask& a, const RaindropMask& b) {
  require_same_geometry(a.plane(), b.plane(), "pixel_max");
  ImagePlane out(a.width(), a.height());
  auto pa = a.plane().pixels();
  auto pb = b.plane().pixels();
  auto po = out.pixels();
  for (std::size_t i = 0; i < po.size(); ++i) {
    po[i] = std::max(pa[i], pb[i]);
  }
  const MaskKind kind =
      a.kind() == MaskKind::binary && b.kind() == MaskKind::binary ? MaskKind::binary : MaskKind::soft;
  return RaindropMask(std::move(out), kind);
}

}  // namespace dpforge
