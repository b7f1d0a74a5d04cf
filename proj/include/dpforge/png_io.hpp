#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dpforge/image.hpp"

namespace dpforge {

// Raw single-channel PNG samples as stored on disk (8- or 16-bit codes).
struct GrayImage {
  int width = 0;
  int height = 0;
  int bit_depth = 16;
  std::vector<std::uint16_t> samples;

  std::uint16_t at(int x, int y) const {
    return samples[static_cast<std::size_t>(y) * width + x];
  }
  std::uint16_t max_code() const { return bit_depth == 16 ? 65535 : 255; }
};

// Throws FormatError for unreadable files, color images, or alpha channels.
GrayImage read_gray_png(const std::filesystem::path& path);
void write_gray_png(const std::filesystem::path& path, const GrayImage& image);

// Codes divided by the maximum code of the bit depth.
ImagePlane to_plane(const GrayImage& image);
// Clamp to [0,1], scale by 65535, round to nearest.
GrayImage quantize16(const ImagePlane& plane);
// Binary mask as 8-bit {0, 255}.
GrayImage binary_mask8(const RaindropMask& mask);

inline ImagePlane read_plane(const std::filesystem::path& path) { return to_plane(read_gray_png(path)); }
inline void write_plane16(const std::filesystem::path& path, const ImagePlane& plane) {
  write_gray_png(path, quantize16(plane));
}

}  // namespace dpforge

namespace dpforge {

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  bool grayscale = false;  // single channel, no alpha
};

// Header-only probe; throws FormatError if the file is not a readable PNG.
PngInfo read_png_info(const std::filesystem::path& path);

}  // namespace dpforge
