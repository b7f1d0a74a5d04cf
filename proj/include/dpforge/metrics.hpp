#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dpforge/image.hpp"

namespace dpforge {

inline constexpr double kPsnrCapDb = 100.0;

// 10 log10(peak^2 / mse), capped at 100 dB (identical inputs give the cap).
double psnr_from_mse(double mse, double peak = 1.0);
double mean_squared_error(const ImagePlane& a, const ImagePlane& b);
double psnr(const ImagePlane& a, const ImagePlane& b, double peak = 1.0);

// Mean SSIM over all valid 11x11 windows (Gaussian sigma 1.5, K1 = 0.01,
// K2 = 0.03, dynamic range 1). Throws std::invalid_argument below 11x11.
double ssim(const ImagePlane& a, const ImagePlane& b);

struct ImageMetrics {
  std::string name;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  std::vector<ImageMetrics> images;
  std::vector<std::string> unmatched;  // excluded from the means
  double mean_psnr_db = 0.0;
  double mean_ssim = 0.0;
  std::size_t count() const { return images.size(); }
};

// `pred` and `gt` are either two PNG files or two directories whose PNGs are
// matched by file name.
MetricReport evaluate_pairs(const std::filesystem::path& pred, const std::filesystem::path& gt);

// Compares two file keys (e.g. I_c vs B_c) of every record in a manifest.
MetricReport evaluate_manifest(const std::filesystem::path& manifest, const std::string& pred_key,
                               const std::string& gt_key);

// Human-readable table followed by one JSON object per line.
std::string format_report(const MetricReport& report);

}  // namespace dpforge
