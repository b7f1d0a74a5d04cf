#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <vector>

namespace fs = std::filesystem;

namespace oracle {

dpforge::ImagePlane convolve_global(const dpforge::ImagePlane& img, const dpforge::PsfKernel& k) {
  dpforge::ImagePlane out(img.width(), img.height());
  const int h = k.half();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int dy = -h; dy <= h; ++dy) {
        for (int dx = -h; dx <= h; ++dx) {
          const int sx = std::clamp(x - dx, 0, img.width() - 1);
          const int sy = std::clamp(y - dy, 0, img.height() - 1);
          acc += k.at(dx, dy) * img.at(sx, sy);
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

double xcorr_lag(const dpforge::ImagePlane& left, const dpforge::ImagePlane& right, int x0, int y0,
                 int x1, int y1, int max_lag) {
  auto mean_of = [&](const dpforge::ImagePlane& p, int shift) {
    double s = 0.0;
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) s += p.at(std::clamp(x + shift, 0, p.width() - 1), y);
    return s / ((x1 - x0) * (y1 - y0));
  };
  const double ml = mean_of(left, 0);
  std::vector<double> score;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    const double mr = mean_of(right, lag);
    double s = 0.0;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        s += (left.at(x, y) - ml) * (right.at(std::clamp(x + lag, 0, right.width() - 1), y) - mr);
      }
    }
    score.push_back(s);
  }
  const auto best = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
  double refined = best;
  if (best > 0 && best + 1 < static_cast<int>(score.size())) {
    const double a = score[best - 1], b = score[best], c = score[best + 1];
    const double denom = a - 2 * b + c;
    if (denom != 0.0) refined += 0.5 * (a - c) / denom;
  }
  return refined - max_lag;
}

int support_radius_y(const dpforge::PsfKernel& k, double rel) {
  double peak = 0.0;
  for (double w : k.weights()) peak = std::max(peak, w);
  int radius = 0;
  for (int dy = -k.half(); dy <= k.half(); ++dy)
    for (int dx = -k.half(); dx <= k.half(); ++dx)
      if (k.at(dx, dy) >= rel * peak) radius = std::max(radius, std::abs(dy));
  return radius;
}

double ssim_bruteforce(const dpforge::ImagePlane& a, const dpforge::ImagePlane& b) {
  constexpr int n = 11;
  constexpr double sigma = 1.5;
  double win[n][n];
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      win[j][i] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * sigma * sigma));
      total += win[j][i];
    }
  for (auto& row : win)
    for (double& w : row) w /= total;

  const double c1 = 0.0001, c2 = 0.0009;
  double acc = 0.0;
  int windows = 0;
  for (int y = 0; y + n <= a.height(); ++y) {
    for (int x = 0; x + n <= a.width(); ++x) {
      double ma = 0, mb = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          ma += win[j][i] * a.at(x + i, y + j);
          mb += win[j][i] * b.at(x + i, y + j);
        }
      double va = 0, vb = 0, cov = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double da = a.at(x + i, y + j) - ma;
          const double db = b.at(x + i, y + j) - mb;
          va += win[j][i] * da * da;
          vb += win[j][i] * db * db;
          cov += win[j][i] * da * db;
        }
      acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  }
  return acc / windows;
}

namespace {

struct V3 {
  double x, y, z;
};
V3 add(V3 a, V3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
V3 scale(V3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
double dot(V3 a, V3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
V3 unit(V3 a) { return scale(a, 1.0 / std::sqrt(dot(a, a))); }

// Refraction by scaling the tangential component: |t_out| = eta |t_in|.
bool bend(V3 dir, V3 normal_along, double eta, V3& out) {
  const double along = dot(dir, normal_along);
  const V3 tangential = add(dir, scale(normal_along, -along));
  const V3 t_out = scale(tangential, eta);
  const double t2 = dot(t_out, t_out);
  if (t2 >= 1.0) return false;
  out = add(t_out, scale(normal_along, std::sqrt(1.0 - t2)));
  return true;
}

}  // namespace

double trace_gradient_pixel(int px, int py, int width, int height, const SphereDrop& drop,
                            double focal_px, double raindrop_depth_mm, double background_depth_mm,
                            double ior, int supersample) {
  const double cx0 = 0.5 * (width - 1), cy0 = 0.5 * (height - 1);
  const double glass = focal_px;
  const double far = focal_px * background_depth_mm / raindrop_depth_mm;
  const double a = drop.base_radius, hc = drop.apex_height;
  const double big_r = (a * a + hc * hc) / (2 * hc);
  const V3 center{drop.cx - cx0, drop.cy - cy0, glass + hc - big_r};
  auto background = [&](double v) { return std::clamp(v, 0.0, height - 1.0) / (height - 1.0); };

  double acc = 0.0;
  for (int sj = 0; sj < supersample; ++sj) {
    for (int si = 0; si < supersample; ++si) {
      const double x = px + (si + 0.5) / supersample - 0.5;
      const double y = py + (sj + 0.5) / supersample - 0.5;
      const V3 p0{x - cx0, y - cy0, glass};
      V3 d_water;
      bend(unit(p0), {0, 0, 1}, 1.0 / ior, d_water);
      // exit through the sphere: |p0 + t d - C| = R, larger root
      const V3 oc = add(p0, scale(center, -1));
      const double b = dot(oc, d_water);
      const double c = dot(oc, oc) - big_r * big_r;
      const double disc = b * b - c;
      if (disc < 0) {
        acc += background(py) * 0.7;
        continue;
      }
      const double t = -b + std::sqrt(disc);
      const V3 hit = add(p0, scale(d_water, t));
      const V3 n_out = unit(add(hit, scale(center, -1)));
      V3 d_air;
      if (!bend(d_water, n_out, ior, d_air) || d_air.z <= 0) {
        acc += background(py) * 0.7;
        continue;
      }
      const double s = (far - hit.z) / d_air.z;
      const double by = hit.y + s * d_air.y;
      acc += background(cy0 + focal_px * by / far);
    }
  }
  return acc / (supersample * supersample);
}

dpforge::ImagePlane random_plane(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  dpforge::ImagePlane p(width, height);
  for (double& v : p.pixels()) v = u(rng);
  return p;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dpforge_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string compare_trees(const fs::path& a, const fs::path& b) {
  auto list = [](const fs::path& root) {
    std::set<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
      if (e.is_regular_file()) files.insert(fs::relative(e.path(), root).string());
    return files;
  };
  const auto fa = list(a);
  const auto fb = list(b);
  if (fa != fb) return "file lists differ (" + std::to_string(fa.size()) + " vs " + std::to_string(fb.size()) + ")";
  for (const auto& rel : fa) {
    std::ifstream ia(a / rel, std::ios::binary), ib(b / rel, std::ios::binary);
    const std::string ca((std::istreambuf_iterator<char>(ia)), {});
    const std::string cb((std::istreambuf_iterator<char>(ib)), {});
    if (ca != cb) return rel + " differs";
  }
  return {};
}

}  // namespace oracle
