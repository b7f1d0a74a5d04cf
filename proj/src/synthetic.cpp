#include "dpforge/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "dpforge/png_io.hpp"
#include "dpforge/seed.hpp"

namespace dpforge {

ImagePlane synthetic_background(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ImagePlane img(width, height);

  const double gx = unit(rng) - 0.5;
  const double gy = unit(rng) - 0.5;
  const double base = 0.3 + 0.3 * unit(rng);

  struct Blob {
    double x, y, r, a;
  };
  std::vector<Blob> blobs(12);
  for (auto& b : blobs) {
    b = {unit(rng) * width, unit(rng) * height, (0.03 + 0.12 * unit(rng)) * std::min(width, height),
         0.25 * (unit(rng) - 0.5)};
  }
  const double freq = 2.0 * std::numbers::pi / (6.0 + 10.0 * unit(rng));
  const double angle = std::numbers::pi * unit(rng);
  const double stripe = 0.04 + 0.04 * unit(rng);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) / width - 0.5;
      const double v = static_cast<double>(y) / height - 0.5;
      double value = base + 0.3 * (gx * u + gy * v);
      for (const auto& b : blobs) {
        const double d2 = ((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (b.r * b.r);
        value += b.a * std::exp(-d2);
      }
      value += stripe * std::sin(freq * (x * std::cos(angle) + y * std::sin(angle)));
      img.at(x, y) = value;
    }
  }
  img.clamp_unit();
  return img;
}

void write_synthetic_backgrounds(const std::filesystem::path& dir, int count, int width, int height,
                                 std::uint64_t seed, double right_noise_sigma) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    const auto left = synthetic_background(width, height, seed + static_cast<std::uint64_t>(i));
    ImagePlane right = left;
    if (right_noise_sigma > 0.0) {
      std::mt19937_64 rng(mix64(seed ^ (0xabcdefULL + static_cast<std::uint64_t>(i))));
      std::normal_distribution<double> noise(0.0, right_noise_sigma);
      for (double& v : right.pixels()) v += noise(rng);
      right.clamp_unit();
    }
    char name[32];
    std::snprintf(name, sizeof name, "bg%03d", i);
    write_plane16(dir / (std::string(name) + "_left.png"), left);
    write_plane16(dir / (std::string(name) + "_right.png"), right);
  }
}

}  // namespace dpforge
