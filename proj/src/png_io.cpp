#include "dpforge/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <cstdio>
#include <memory>
#include <string>

#include "dpforge/errors.hpp"

namespace dpforge {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors by longjmp, so the code between setjmp and the libpng
// calls below holds only trivially destructible locals.
struct ReadHeader {
  png_uint_32 width;
  png_uint_32 height;
  int bit_depth;
  int color_type;
};

const char* read_header(std::FILE* fp, png_structp png, png_infop info, ReadHeader* hdr) {
  if (setjmp(png_jmpbuf(png))) return "corrupt PNG data";
  png_init_io(png, fp);
  png_read_info(png, info);
  png_get_IHDR(png, info, &hdr->width, &hdr->height, &hdr->bit_depth, &hdr->color_type, nullptr,
               nullptr, nullptr);
  if (hdr->color_type != PNG_COLOR_TYPE_GRAY) return "not a single-channel grayscale PNG";
  if (hdr->bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (hdr->bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  return nullptr;
}

const char* read_rows(png_structp png, png_infop info, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return "corrupt PNG data";
  png_read_image(png, rows);
  png_read_end(png, info);
  return nullptr;
}

const char* write_all(std::FILE* fp, png_structp png, png_infop info, int width, int height,
                      int bit_depth, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return "PNG encoding failed";
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return nullptr;
}

void silent_warning(png_structp, png_const_charp) {}

}  // namespace

GrayImage read_gray_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw FormatError("cannot open " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, silent_warning);
  if (!png) throw FormatError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  png_set_sig_bytes(png, 8);

  ReadHeader hdr{};
  const char* err = info ? read_header(fp.get(), png, info, &hdr) : "libpng initialisation failed";
  GrayImage image;
  if (!err) {
    image.width = static_cast<int>(hdr.width);
    image.height = static_cast<int>(hdr.height);
    image.bit_depth = hdr.bit_depth == 16 ? 16 : 8;
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<png_byte> raw(rowbytes * image.height);
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
    for (int y = 0; y < image.height; ++y) rows[y] = raw.data() + rowbytes * y;
    err = read_rows(png, info, rows.data());
    if (!err) {
      image.samples.resize(static_cast<std::size_t>(image.width) * image.height);
      for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
          std::uint16_t v;
          if (image.bit_depth == 16) {
            std::memcpy(&v, rows[y] + 2 * x, 2);
          } else {
            v = rows[y][x];
          }
          image.samples[static_cast<std::size_t>(y) * image.width + x] = v;
        }
      }
    }
  }
  png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  if (err) throw FormatError(path.string() + ": " + err);
  return image;
}

void write_gray_png(const std::filesystem::path& path, const GrayImage& image) {
  if (image.bit_depth != 8 && image.bit_depth != 16) throw FormatError("bit depth must be 8 or 16");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw FormatError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, silent_warning);
  if (!png) throw FormatError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);

  const std::size_t bytes_per = image.bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> raw(bytes_per * image.samples.size());
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    if (bytes_per == 2) {
      std::memcpy(&raw[2 * i], &image.samples[i], 2);
    } else {
      raw[i] = static_cast<png_byte>(image.samples[i]);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) rows[y] = raw.data() + bytes_per * image.width * y;

  const char* err = info ? write_all(fp.get(), png, info, image.width, image.height,
                                     image.bit_depth, rows.data())
                         : "libpng initialisation failed";
  png_destroy_write_struct(&png, info ? &info : nullptr);
  if (err) throw FormatError(path.string() + ": " + err);
  if (std::fflush(fp.get()) != 0) throw FormatError("write failed for " + path.string());
}

ImagePlane to_plane(const GrayImage& image) {
  ImagePlane plane(image.width, image.height);
  const double scale = 1.0 / image.max_code();
  auto px = plane.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = image.samples[i] * scale;
  return plane;
}

GrayImage quantize16(const ImagePlane& plane) {
  GrayImage image{plane.width(), plane.height(), 16, {}};
  image.samples.reserve(plane.size());
  for (double v : plane.pixels()) {
    const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    image.samples.push_back(static_cast<std::uint16_t>(std::lround(c * 65535.0)));
  }
  return image;
}

GrayImage binary_mask8(const RaindropMask& mask) {
  GrayImage image{mask.width(), mask.height(), 8, {}};
  image.samples.reserve(mask.plane().size());
  for (double v : mask.plane().pixels()) image.samples.push_back(v >= 0.5 ? 255 : 0);
  return image;
}

}  // namespace dpforge

namespace dpforge {

namespace {

const char* probe(std::FILE* fp, png_structp png, png_infop info, PngInfo* out) {
  if (setjmp(png_jmpbuf(png))) return "corrupt PNG header";
  png_init_io(png, fp);
  png_read_info(png, info);
  out->width = static_cast<int>(png_get_image_width(png, info));
  out->height = static_cast<int>(png_get_image_height(png, info));
  out->bit_depth = png_get_bit_depth(png, info);
  out->grayscale = png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY;
  return nullptr;
}

}  // namespace

PngInfo read_png_info(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw FormatError("cannot open " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, silent_warning);
  if (!png) throw FormatError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  png_set_sig_bytes(png, 8);
  PngInfo result;
  const char* err = info ? probe(fp.get(), png, info, &result) : "libpng initialisation failed";
  png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  if (err) throw FormatError(path.string() + ": " + err);
  return result;
}

}  // namespace dpforge
