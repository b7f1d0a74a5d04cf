#include "doctest.h"

#include <cmath>

#include "dpforge/metrics.hpp"
#include "dpforge/png_io.hpp"
#include "support/oracles.hpp"

using namespace dpforge;

TEST_CASE("psnr closed forms") {
  CHECK(psnr_from_mse(0.0) == 100.0);
  CHECK(psnr_from_mse(0.01) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(std::abs(psnr_from_mse(1.0, 255.0) - 48.1308036086791) < 1e-9);
  const auto a = oracle::random_plane(16, 16, 1);
  CHECK(psnr(a, a) == 100.0);
  const ImagePlane z(10, 10, 0.0), o(10, 10, 0.1);
  CHECK(mean_squared_error(z, o) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(psnr(z, o) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("ssim closed forms") {
  const auto a = oracle::random_plane(40, 33, 2);
  CHECK(ssim(a, a) == 1.0);
  const double constant = ssim(ImagePlane(20, 20, 0.0), ImagePlane(20, 20, 1.0));
  CHECK(std::abs(constant - 9.999000099990002e-05) < 1e-15);
  CHECK(constant < 0.01);
  CHECK_THROWS(ssim(ImagePlane(10, 30), ImagePlane(10, 30)));
}

TEST_CASE("ssim matches the brute-force window computation") {
  const auto a = oracle::random_plane(37, 29, 3);
  auto b = oracle::random_plane(37, 29, 4);
  for (std::size_t i = 0; i < b.size(); ++i) b.pixels()[i] = 0.6 * a.pixels()[i] + 0.4 * b.pixels()[i];
  CHECK(std::abs(ssim(a, b) - oracle::ssim_bruteforce(a, b)) < 1e-9);
  CHECK(std::abs(ssim(a, b) - ssim(b, a)) < 1e-9);

  ImagePlane inv(37, 29);
  for (std::size_t i = 0; i < a.size(); ++i) inv.pixels()[i] = 1.0 - a.pixels()[i];
  CHECK(ssim(a, inv) < 0.0);
  CHECK(oracle::ssim_bruteforce(a, inv) < 0.0);
}

TEST_CASE("evaluate_pairs over directories") {
  const auto pred = oracle::fresh_dir("metrics_pred");
  const auto gt = oracle::fresh_dir("metrics_gt");
  for (int i = 0; i < 3; ++i) {
    const auto p = oracle::random_plane(24, 24, 10 + i);
    write_plane16(pred / ("img" + std::to_string(i) + ".png"), p);
    write_plane16(gt / ("img" + std::to_string(i) + ".png"), p);
  }
  write_plane16(pred / "extra.png", ImagePlane(24, 24, 0.5));
  const auto rep = evaluate_pairs(pred, gt);
  CHECK(rep.count() == 3);
  CHECK(rep.unmatched.size() == 1);
  CHECK(rep.mean_psnr_db == 100.0);
  CHECK(rep.mean_ssim == 1.0);
  CHECK(format_report(rep).find("extra.png") != std::string::npos);

  const auto single = evaluate_pairs(pred / "img0.png", gt / "img1.png");
  CHECK(single.count() == 1);
  CHECK(single.mean_psnr_db < 100.0);
}
