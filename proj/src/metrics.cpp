#include "dpforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "dpforge/dataset.hpp"
#include "dpforge/errors.hpp"
#include "dpforge/png_io.hpp"

namespace fs = std::filesystem;

namespace dpforge {

double psnr_from_mse(double mse, double peak) {
  if (mse <= 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse));
}

double mean_squared_error(const ImagePlane& a, const ImagePlane& b) {
  require_same_geometry(a, b, "mse");
  auto pa = a.pixels();
  auto pb = b.pixels();
  double acc = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pa.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b, double peak) {
  return psnr_from_mse(mean_squared_error(a, b), peak);
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 1.0) * (0.01 * 1.0);
constexpr double kC2 = (0.03 * 1.0) * (0.03 * 1.0);

std::vector<double> gaussian_taps() {
  std::vector<double> g(kWindow);
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kWindow / 2;
    g[i] = std::exp(-x * x / (2 * kSigma * kSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable 'valid' Gaussian filtering of f(a, b) evaluated per pixel.
template <class F>
std::vector<double> filter_valid(const ImagePlane& a, const ImagePlane& b, F f) {
  static const std::vector<double> g = gaussian_taps();
  const int w = a.width();
  const int h = a.height();
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += g[k] * f(a.at(x + k, y), b.at(x + k, y));
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += g[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const ImagePlane& a, const ImagePlane& b) {
  require_same_geometry(a, b, "ssim");
  if (a.width() < kWindow || a.height() < kWindow) {
    throw std::invalid_argument("ssim needs images of at least 11x11 pixels");
  }
  const auto mu_a = filter_valid(a, b, [](double x, double) { return x; });
  const auto mu_b = filter_valid(a, b, [](double, double y) { return y; });
  const auto e_aa = filter_valid(a, b, [](double x, double) { return x * x; });
  const auto e_bb = filter_valid(a, b, [](double, double y) { return y * y; });
  const auto e_ab = filter_valid(a, b, [](double x, double y) { return x * y; });

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    const double num = (2.0 * (ma * mb) + kC1) * (2.0 * cov + kC2);
    const double den = (ma * ma + mb * mb + kC1) * (var_a + var_b + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

namespace {

ImageMetrics measure(const std::string& name, const fs::path& pred, const fs::path& gt) {
  const auto p = read_plane(pred);
  const auto g = read_plane(gt);
  return {name, psnr(p, g), ssim(p, g)};
}

void finish(MetricReport& report) {
  if (report.images.empty()) return;
  double ps = 0.0, ss = 0.0;
  for (const auto& m : report.images) {
    ps += m.psnr_db;
    ss += m.ssim;
  }
  report.mean_psnr_db = ps / report.images.size();
  report.mean_ssim = ss / report.images.size();
}

MetricReport evaluate_list(const std::vector<std::tuple<std::string, fs::path, fs::path>>& jobs,
                           std::vector<std::string> unmatched) {
  std::vector<std::optional<ImageMetrics>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& [name, p, g] = jobs[i];
    try {
      results[i] = measure(name, p, g);
    } catch (const std::exception& e) {
      errors[i] = name + ": " + e.what();
    }
  }
  MetricReport report;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (results[i]) {
      report.images.push_back(*results[i]);
    } else {
      unmatched.push_back(errors[i]);
    }
  }
  report.unmatched = std::move(unmatched);
  finish(report);
  return report;
}

std::map<std::string, fs::path> pngs_in(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") out[e.path().filename().string()] = e.path();
  }
  return out;
}

}  // namespace

MetricReport evaluate_pairs(const fs::path& pred, const fs::path& gt) {
  if (fs::is_regular_file(pred) && fs::is_regular_file(gt)) {
    return evaluate_list({{pred.filename().string(), pred, gt}}, {});
  }
  if (!fs::is_directory(pred) || !fs::is_directory(gt)) {
    throw ConfigError("--pred and --gt must both be files or both be directories");
  }
  const auto p = pngs_in(pred);
  const auto g = pngs_in(gt);
  std::vector<std::tuple<std::string, fs::path, fs::path>> jobs;
  std::vector<std::string> unmatched;
  for (const auto& [name, path] : p) {
    auto it = g.find(name);
    if (it == g.end()) {
      unmatched.push_back(name + ": no ground truth");
    } else {
      jobs.emplace_back(name, path, it->second);
    }
  }
  for (const auto& [name, path] : g) {
    if (!p.count(name)) unmatched.push_back(name + ": no prediction");
  }
  return evaluate_list(jobs, std::move(unmatched));
}

MetricReport evaluate_manifest(const fs::path& manifest, const std::string& pred_key,
                               const std::string& gt_key) {
  const auto root = manifest.parent_path();
  std::vector<std::tuple<std::string, fs::path, fs::path>> jobs;
  std::vector<std::string> unmatched;
  for (const auto& rec : read_manifest(manifest)) {
    auto p = rec.files.find(pred_key);
    auto g = rec.files.find(gt_key);
    if (p == rec.files.end() || g == rec.files.end()) {
      unmatched.push_back(rec.id + ": record lacks " + pred_key + " or " + gt_key);
      continue;
    }
    jobs.emplace_back(rec.id, root / p->second, root / g->second);
  }
  return evaluate_list(jobs, std::move(unmatched));
}

std::string format_report(const MetricReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %10s %8s\n", "image", "PSNR[dB]", "SSIM");
  out << line;
  for (const auto& m : report.images) {
    std::snprintf(line, sizeof line, "%-40s %10.4f %8.5f\n", m.name.c_str(), m.psnr_db, m.ssim);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-40s %10.4f %8.5f  (n=%zu, flagged=%zu)\n", "MEAN",
                report.mean_psnr_db, report.mean_ssim, report.count(), report.unmatched.size());
  out << line;
  for (const auto& u : report.unmatched) out << "flagged: " << u << '\n';
  for (const auto& m : report.images) {
    out << nlohmann::json{{"image", m.name}, {"psnr_db", m.psnr_db}, {"ssim", m.ssim}}.dump() << '\n';
  }
  out << nlohmann::json{{"mean_psnr_db", report.mean_psnr_db},
                        {"mean_ssim", report.mean_ssim},
                        {"count", report.count()},
                        {"flagged", report.unmatched}}
             .dump()
      << '\n';
  return out.str();
}

}  // namespace dpforge
