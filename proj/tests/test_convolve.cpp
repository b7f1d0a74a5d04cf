#include "doctest.h"

#include <cmath>

#include "dpforge/convolve.hpp"
#include "dpforge/errors.hpp"
#include "dpforge/psf.hpp"
#include "support/oracles.hpp"

using namespace dpforge;

namespace {

double max_abs_diff(const ImagePlane& a, const ImagePlane& b, int margin = 0) {
  double worst = 0.0;
  for (int y = margin; y < a.height() - margin; ++y)
    for (int x = margin; x < a.width() - margin; ++x)
      worst = std::max(worst, std::abs(a.at(x, y) - b.at(x, y)));
  return worst;
}

PatchwiseOptions with(ConvolutionMethod m) {
  PatchwiseOptions o;
  o.method = m;
  o.clamp_output = false;
  return o;
}

}  // namespace

TEST_CASE("all-delta grid is the identity") {
  const auto img = oracle::random_plane(50, 40, 1);
  const auto grid = PsfGrid::uniform(3, 4, PsfKernel::delta(Side::left));
  CHECK(max_abs_diff(patchwise_convolve(img, grid), img) < 1e-6);
}

TEST_CASE("FFT and direct paths agree") {
  const auto grid = synthesize_half_disk_grid(8.0, Side::left, -1, {2, 2, 0.15});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto img = oracle::random_plane(64, 64, seed);
    const auto a = patchwise_convolve(img, grid, with(ConvolutionMethod::direct));
    const auto b = patchwise_convolve(img, grid, with(ConvolutionMethod::fft));
    CHECK(max_abs_diff(a, b) < 1e-5);
  }
}

TEST_CASE("uniform grid equals a global convolution") {
  const auto k = synthesize_half_disk_grid(5.0, Side::right, -1, {1, 1, 0.0}).kernel(0, 0);
  const auto grid = PsfGrid::uniform(2, 3, k);
  const auto img = oracle::random_plane(90, 70, 11);
  const auto ref = oracle::convolve_global(img, k);
  for (auto m : {ConvolutionMethod::direct, ConvolutionMethod::fft}) {
    CHECK(max_abs_diff(patchwise_convolve(img, grid, with(m)), ref) < 1e-4);
  }
}

TEST_CASE("spatially varying grid matches the oracle inside each cell") {
  const auto grid = synthesize_half_disk_grid(3.0, Side::left, -1, {2, 2, 0.3});
  const auto img = oracle::random_plane(80, 80, 5);
  PatchwiseOptions o = with(ConvolutionMethod::direct);
  o.overlap_px = 4;
  const auto out = patchwise_convolve(img, grid, o);
  // pixels at least one overlap away from every seam use only their own kernel
  const auto ref00 = oracle::convolve_global(img, grid.kernel(0, 0));
  const auto ref11 = oracle::convolve_global(img, grid.kernel(1, 1));
  double worst = 0.0;
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 30; ++x) {
      worst = std::max(worst, std::abs(out.at(x, y) - ref00.at(x, y)));
      worst = std::max(worst, std::abs(out.at(x + 50, y + 50) - ref11.at(x + 50, y + 50)));
    }
  CHECK(worst < 1e-9);
}

TEST_CASE("flat field is preserved") {
  const auto grid = synthesize_half_disk_grid(6.0, Side::left, -1, {2, 2, 0.15});
  const ImagePlane img(64, 64, 0.37);
  for (auto m : {ConvolutionMethod::direct, ConvolutionMethod::fft}) {
    const auto out = patchwise_convolve(img, grid, with(m));
    CHECK(max_abs_diff(out, img) < 1e-5);
  }
}

TEST_CASE("interior mean is conserved") {
  const auto grid = synthesize_half_disk_grid(7.0, Side::right, -1, {3, 3, 0.15});
  const auto img = oracle::random_plane(120, 120, 8);
  const auto out = patchwise_convolve(img, grid);
  const int m = grid.kernel_size() / 2;
  double a = 0.0, b = 0.0;
  int n = 0;
  for (int y = m; y < 120 - m; ++y)
    for (int x = m; x < 120 - m; ++x) {
      a += img.at(x, y);
      b += out.at(x, y);
      ++n;
    }
  CHECK(std::abs(a / n - b / n) < 1e-3);
}

TEST_CASE("kernel larger than a patch is a configuration error") {
  const auto grid = synthesize_half_disk_grid(10.0, Side::left, -1, {4, 4, 0.0});
  CHECK_THROWS_AS(patchwise_convolve(ImagePlane(40, 40, 0.5), grid), ConfigError);
}

TEST_CASE("output geometry and clamping") {
  const auto grid = synthesize_half_disk_grid(4.0, Side::left, -1, {3, 5, 0.15});
  const auto img = oracle::random_plane(73, 51, 2);
  const auto out = patchwise_convolve(img, grid);
  CHECK(out.width() == 73);
  CHECK(out.height() == 51);
  for (double v : out.pixels()) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("zero image stays zero") {
  const auto grid = synthesize_half_disk_grid(9.0, Side::left, -1, {2, 2, 0.15});
  const ImagePlane img(64, 64, 0.0);
  CHECK(patchwise_convolve(img, grid) == img);
}
