#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dpforge {

enum class Side : std::uint8_t { left = 0, right = 1, full = 2 };

const char* to_string(Side side);

// Square, odd-sized, normalized blur kernel. Index (0,0) is the top-left tap;
// the kernel center sits at (half(), half()).
class PsfKernel {
 public:
  PsfKernel(int size, std::vector<double> weights, Side side, double nominal_radius_px);

  // 1x1 identity kernel.
  static PsfKernel delta(Side side);

  int size() const noexcept { return size_; }
  int half() const noexcept { return size_ / 2; }
  Side side() const noexcept { return side_; }
  // Zero for a delta kernel.
  double nominal_radius_px() const noexcept { return nominal_radius_px_; }
  bool is_delta() const noexcept { return size_ == 1; }

  // dx, dy are offsets from the kernel center in [-half, half].
  double at(int dx, int dy) const {
    return weights_[static_cast<std::size_t>(dy + half()) * size_ + (dx + half())];
  }
  std::span<const double> weights() const noexcept { return weights_; }

  double sum() const noexcept;

  // Weighted mean tap offset relative to the center.
  struct Centroid {
    double x, y;
  };
  Centroid centroid() const noexcept;

 private:
  int size_;
  std::vector<double> weights_;
  Side side_;
  double nominal_radius_px_;
};

// rows x cols kernels, one per image sub-patch, in row-major grid order.
// All cells share side, size and nominal radius.
class PsfGrid {
 public:
  PsfGrid(int rows, int cols, std::vector<PsfKernel> kernels);

  static PsfGrid uniform(int rows, int cols, const PsfKernel& kernel);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  Side side() const noexcept { return kernels_.front().side(); }
  int kernel_size() const noexcept { return kernels_.front().size(); }
  double nominal_radius_px() const noexcept { return kernels_.front().nominal_radius_px(); }

  const PsfKernel& kernel(int row, int col) const {
    return kernels_[static_cast<std::size_t>(row) * cols_ + col];
  }
  std::span<const PsfKernel> kernels() const noexcept { return kernels_; }

 private:
  int rows_;
  int cols_;
  std::vector<PsfKernel> kernels_;
};

struct HalfDiskOptions {
  int rows = 6;
  int cols = 8;
  // Largest horizontal shear, reached at the grid corners; zero at the center.
  double max_shear = 0.15;
};

// Half-disk DP kernels of radius r_px. For front focus (orientation_sign < 0) the
// left kernel keeps x <= 0 and the right kernel x >= 0; back focus mirrors both.
// Side::full yields the whole disk. Radii below 0.5 px give delta kernels.
PsfGrid synthesize_half_disk_grid(double r_px, Side side, int orientation_sign,
                                  const HalfDiskOptions& options = {});

// Resample every kernel by new_r_px / nominal radius with bilinear scaling and
// renormalize. Throws ConfigError for factors above 20.
PsfGrid rescale_grid(const PsfGrid& grid, double new_r_px);

// Reads a .dppsf file. Kernels off normalization by at most 1e-3 are
// renormalized; anything else malformed throws FormatError.
PsfGrid load_psf_grid(const std::filesystem::path& path);
void save_psf_grid(const PsfGrid& grid, const std::filesystem::path& path);

// In-memory variants used by the file functions.
PsfGrid decode_psf_grid(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_psf_grid(const PsfGrid& grid);

}  // namespace dpforge
