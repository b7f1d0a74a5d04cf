#include "dpforge/psf.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <string>

#include "dpforge/errors.hpp"

namespace dpforge {

const char* to_string(Side side) {
  switch (side) {
    case Side::left:
      return "left";
    case Side::right:
      return "right";
    case Side::full:
      return "full";
  }
  return "?";
}

PsfKernel::PsfKernel(int size, std::vector<double> weights, Side side, double nominal_radius_px)
    : size_(size), weights_(std::move(weights)), side_(side), nominal_radius_px_(nominal_radius_px) {
  if (size_ < 1 || size_ % 2 == 0) throw std::invalid_argument("kernel size must be odd and >= 1");
  if (weights_.size() != static_cast<std::size_t>(size_) * size_) {
    throw std::invalid_argument("kernel weight count does not match size");
  }
  if (!(nominal_radius_px_ >= 0.0) || size_ < 2 * static_cast<int>(std::ceil(nominal_radius_px_)) + 1) {
    throw std::invalid_argument("kernel canvas too small for its nominal radius");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("kernel weights must be >= 0");
  }
  if (std::abs(sum() - 1.0) > 1e-6) throw std::invalid_argument("kernel is not normalized");
}

PsfKernel PsfKernel::delta(Side side) { return PsfKernel(1, {1.0}, side, 0.0); }

double PsfKernel::sum() const noexcept { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

PsfKernel::Centroid PsfKernel::centroid() const noexcept {
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (int dy = -half(); dy <= half(); ++dy) {
    for (int dx = -half(); dx <= half(); ++dx) {
      const double w = at(dx, dy);
      mass += w;
      mx += w * dx;
      my += w * dy;
    }
  }
  return {mx / mass, my / mass};
}

PsfGrid::PsfGrid(int rows, int cols, std::vector<PsfKernel> kernels)
    : rows_(rows), cols_(cols), kernels_(std::move(kernels)) {
  if (rows_ < 1 || cols_ < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  if (kernels_.size() != static_cast<std::size_t>(rows_) * cols_) {
    throw std::invalid_argument("grid kernel count does not match rows x cols");
  }
  for (const auto& k : kernels_) {
    if (k.side() != kernels_.front().side() || k.size() != kernels_.front().size() ||
        k.nominal_radius_px() != kernels_.front().nominal_radius_px()) {
      throw std::invalid_argument("grid cells must share side, size and nominal radius");
    }
  }
}

PsfGrid PsfGrid::uniform(int rows, int cols, const PsfKernel& kernel) {
  return PsfGrid(rows, cols, std::vector<PsfKernel>(static_cast<std::size_t>(rows) * cols, kernel));
}

namespace {

std::vector<double> normalized(std::vector<double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

// Cosine roll-off from 1 at r - 0.5 to 0 at r + 0.5.
double radial_profile(double rho, double r) {
  if (rho <= r - 0.5) return 1.0;
  if (rho >= r + 0.5) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (rho - (r - 0.5))));
}

}  // namespace

PsfGrid synthesize_half_disk_grid(double r_px, Side side, int orientation_sign,
                                  const HalfDiskOptions& options) {
  if (options.rows < 1 || options.cols < 1) throw ConfigError("grid dimensions must be >= 1");
  if (!(r_px >= 0.0)) throw ConfigError("PSF radius must be >= 0");
  if (r_px < 0.5) return PsfGrid::uniform(options.rows, options.cols, PsfKernel::delta(side));

  // +1 keeps x >= 0, -1 keeps x <= 0, 0 keeps both.
  int keep = 0;
  if (side != Side::full) {
    keep = side == Side::left ? -1 : 1;
    if (orientation_sign > 0) keep = -keep;
  }

  const double shear_bound = std::abs(options.max_shear);
  const int half = static_cast<int>(std::ceil((r_px + 0.5) * (1.0 + shear_bound)));
  const int size = 2 * half + 1;

  std::vector<PsfKernel> kernels;
  kernels.reserve(static_cast<std::size_t>(options.rows) * options.cols);
  for (int row = 0; row < options.rows; ++row) {
    for (int col = 0; col < options.cols; ++col) {
      const double u = (col + 0.5) / options.cols * 2.0 - 1.0;
      const double v = (row + 0.5) / options.rows * 2.0 - 1.0;
      const double shear = options.max_shear * 0.5 * (u + v);

      std::vector<double> w(static_cast<std::size_t>(size) * size, 0.0);
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
          const double xs = dx - shear * dy;
          const double radial = radial_profile(std::hypot(xs, static_cast<double>(dy)), r_px);
          const double cover = keep == 0 ? 1.0 : std::clamp(keep * xs + 0.5, 0.0, 1.0);
          w[static_cast<std::size_t>(dy + half) * size + (dx + half)] = radial * cover;
        }
      }
      kernels.emplace_back(size, normalized(std::move(w)), side, r_px);
    }
  }
  return PsfGrid(options.rows, options.cols, std::move(kernels));
}

PsfGrid rescale_grid(const PsfGrid& grid, double new_r_px) {
  if (!(new_r_px > 0.0)) throw ConfigError("target PSF radius must be > 0");
  if (grid.nominal_radius_px() <= 0.0) throw ConfigError("cannot rescale a delta grid");
  const double factor = new_r_px / grid.nominal_radius_px();
  if (factor > 20.0) {
    throw ConfigError("PSF rescale factor " + std::to_string(factor) + " exceeds 20");
  }

  const int old_half = grid.kernel_size() / 2;
  const int half = std::max(static_cast<int>(std::ceil(old_half * factor - 1e-9)),
                            static_cast<int>(std::ceil(new_r_px)));
  const int size = 2 * half + 1;

  std::vector<PsfKernel> kernels;
  kernels.reserve(grid.kernels().size());
  for (const auto& src : grid.kernels()) {
    auto tap = [&](int x, int y) {
      return (std::abs(x) > old_half || std::abs(y) > old_half) ? 0.0 : src.at(x, y);
    };
    std::vector<double> w(static_cast<std::size_t>(size) * size, 0.0);
    for (int dy = -half; dy <= half; ++dy) {
      for (int dx = -half; dx <= half; ++dx) {
        const double sx = dx / factor;
        const double sy = dy / factor;
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0;
        const double fy = sy - y0;
        const double value = (1 - fy) * ((1 - fx) * tap(x0, y0) + fx * tap(x0 + 1, y0)) +
                             fy * ((1 - fx) * tap(x0, y0 + 1) + fx * tap(x0 + 1, y0 + 1));
        w[static_cast<std::size_t>(dy + half) * size + (dx + half)] = value;
      }
    }
    if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) {
      w.assign(w.size(), 0.0);
      w[static_cast<std::size_t>(half) * size + half] = 1.0;
    }
    kernels.emplace_back(size, normalized(std::move(w)), src.side(), new_r_px);
  }
  return PsfGrid(grid.rows(), grid.cols(), std::move(kernels));
}

namespace {

constexpr std::array<std::uint8_t, 6> kMagic{'D', 'P', 'P', 'S', 'F', '\0'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 6 + 2 + 2 + 2 + 2 + 1 + 4;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

float get_f32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::vector<std::uint8_t> encode_psf_grid(const PsfGrid& grid) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_u16(out, kVersion);
  put_u16(out, static_cast<std::uint16_t>(grid.rows()));
  put_u16(out, static_cast<std::uint16_t>(grid.cols()));
  put_u16(out, static_cast<std::uint16_t>(grid.kernel_size()));
  out.push_back(static_cast<std::uint8_t>(grid.side()));
  put_f32(out, static_cast<float>(grid.nominal_radius_px()));
  for (const auto& k : grid.kernels()) {
    for (double w : k.weights()) put_f32(out, static_cast<float>(w));
  }
  return out;
}

PsfGrid decode_psf_grid(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("dppsf: truncated header");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("dppsf: bad magic");
  }
  const auto version = get_u16(bytes, 6);
  if (version != kVersion) throw FormatError("dppsf: unsupported version " + std::to_string(version));
  const int rows = get_u16(bytes, 8);
  const int cols = get_u16(bytes, 10);
  const int k = get_u16(bytes, 12);
  const std::uint8_t side_code = bytes[14];
  const double nominal = get_f32(bytes, 15);
  if (rows < 1 || cols < 1) throw FormatError("dppsf: empty grid");
  if (k < 1 || k % 2 == 0) throw FormatError("dppsf: kernel size must be odd");
  if (side_code > 2) throw FormatError("dppsf: bad side code");
  if (!std::isfinite(nominal) || nominal < 0.0 ||
      k < 2 * static_cast<int>(std::ceil(nominal)) + 1) {
    throw FormatError("dppsf: nominal radius inconsistent with kernel size");
  }

  const std::size_t taps = static_cast<std::size_t>(k) * k;
  const std::size_t count = static_cast<std::size_t>(rows) * cols * taps;
  if (bytes.size() != kHeaderSize + 4 * count) {
    throw FormatError("dppsf: expected " + std::to_string(count) + " weights, file holds " +
                      std::to_string((bytes.size() - kHeaderSize) / 4.0));
  }

  std::vector<PsfKernel> kernels;
  kernels.reserve(static_cast<std::size_t>(rows) * cols);
  std::size_t at = kHeaderSize;
  for (int cell = 0; cell < rows * cols; ++cell) {
    std::vector<double> w(taps);
    double total = 0.0;
    for (auto& v : w) {
      v = get_f32(bytes, at);
      at += 4;
      if (!std::isfinite(v) || v < 0.0) {
        throw FormatError("dppsf: negative or non-finite weight in kernel " + std::to_string(cell));
      }
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-3) {
      throw FormatError("dppsf: kernel " + std::to_string(cell) + " sums to " +
                        std::to_string(total));
    }
    kernels.emplace_back(k, normalized(std::move(w)), static_cast<Side>(side_code), nominal);
  }
  return PsfGrid(rows, cols, std::move(kernels));
}

PsfGrid load_psf_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_psf_grid(bytes);
}

void save_psf_grid(const PsfGrid& grid, const std::filesystem::path& path) {
  const auto bytes = encode_psf_grid(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace dpforge
