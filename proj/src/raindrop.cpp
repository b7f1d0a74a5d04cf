#include "dpforge/raindrop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dpforge/errors.hpp"

namespace dpforge {

namespace {

// Height of a sphere cap with base radius `base` and apex height `apex` at
// radial distance rho. Written to stay accurate when apex << base.
double sphere_cap_height(double base, double apex, double rho) {
  if (apex <= 0.0 || rho >= base) return 0.0;
  const double sphere_r = (base * base + apex * apex) / (2.0 * apex);
  const double rho2 = rho * rho;
  return std::max(0.0, apex - rho2 / (std::sqrt(sphere_r * sphere_r - rho2) + sphere_r));
}

struct Vec3 {
  double x, y, z;
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 normalized() const {
    const double n = std::sqrt(dot(*this));
    return {x / n, y / n, z / n};
  }
};

// Snell refraction of unit `incident` through a surface with unit `normal`
// facing the incoming ray; eta = n_from / n_to. False on total internal reflection.
bool refract(const Vec3& incident, const Vec3& normal, double eta, Vec3& out) {
  const double cos_i = -normal.dot(incident);
  const double k = 1.0 - eta * eta * (1.0 - cos_i * cos_i);
  if (k < 0.0) return false;
  out = (incident * eta + normal * (eta * cos_i - std::sqrt(k))).normalized();
  return true;
}

double sample_bilinear_clamped(const ImagePlane& img, double u, double v) {
  u = std::clamp(u, 0.0, static_cast<double>(img.width() - 1));
  v = std::clamp(v, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
  const double bottom = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

}  // namespace

bool RaindropShape::contains(double x, double y) const {
  const double dx = x - cx;
  const double dy = y - cy;
  const double c = std::cos(axis_angle_rad);
  const double s = std::sin(axis_angle_rad);
  const double a = (dx * c + dy * s) / (radius_px * eccentricity);
  const double b = (-dx * s + dy * c) / radius_px;
  if (a * a + b * b <= 1.0) return true;
  if (tail_length_px > 0.0) {
    const double span = radius_px + tail_length_px;
    const double t = -dy;
    if (t >= 0.0 && t <= span) {
      const double half_width = 0.5 * radius_px * (1.0 - t / span);
      return std::abs(dx) < half_width;
    }
  }
  return false;
}

double RaindropShape::height(double x, double y) const {
  const double dx = x - cx;
  const double dy = y - cy;
  const double c = std::cos(axis_angle_rad);
  const double s = std::sin(axis_angle_rad);
  const double a = (dx * c + dy * s) / (radius_px * eccentricity);
  const double b = (-dx * s + dy * c) / radius_px;
  const double apex = cap_height_ratio * radius_px;
  double h = sphere_cap_height(radius_px, apex, std::sqrt(a * a + b * b) * radius_px);
  if (tail_length_px > 0.0) {
    const double span = radius_px + tail_length_px;
    const double t = -dy;
    if (t >= 0.0 && t <= span) {
      const double half_width = 0.5 * radius_px * (1.0 - t / span);
      h = std::max(h, sphere_cap_height(half_width, cap_height_ratio * half_width, std::abs(dx)));
    }
  }
  return h;
}

RaindropShape::Bounds RaindropShape::bounds() const {
  const double reach = radius_px * eccentricity;
  const double up = std::max(reach, radius_px + tail_length_px);
  return {static_cast<int>(std::floor(cx - reach)), static_cast<int>(std::floor(cy - up)),
          static_cast<int>(std::ceil(cx + reach)), static_cast<int>(std::ceil(cy + reach))};
}

void LayoutParams::validate() const {
  if (!(mean_drop_count >= 0.0)) throw ConfigError("mean_drop_count must be >= 0");
  if (!(radius_min_px > 0.0 && radius_min_px <= radius_max_px)) {
    throw ConfigError("require 0 < radius_min_px <= radius_max_px");
  }
  if (!(coverage_target >= 0.0 && coverage_target <= 0.5)) {
    throw ConfigError("coverage_target must lie in [0, 0.5]");
  }
  if (!(tail_probability >= 0.0 && tail_probability <= 1.0)) {
    throw ConfigError("tail_probability must lie in [0, 1]");
  }
  if (!(tail_length_min >= 0.0 && tail_length_min <= tail_length_max)) {
    throw ConfigError("require 0 <= tail_length_min <= tail_length_max");
  }
  if (!(eccentricity_max >= 1.0)) throw ConfigError("eccentricity_max must be >= 1");
  if (!(cap_height_min > 0.0 && cap_height_min <= cap_height_max && cap_height_max <= 1.0)) {
    throw ConfigError("require 0 < cap_height_min <= cap_height_max <= 1");
  }
  if (!(depth_min_mm > 0.0 && depth_min_mm <= depth_max_mm &&
        depth_max_mm < background_depth_mm)) {
    throw ConfigError("require 0 < depth_min_mm <= depth_max_mm < background_depth_mm");
  }
  if (max_adjust_steps < 0) throw ConfigError("max_adjust_steps must be >= 0");
}

namespace {

// Per-pixel footprint counts so drops can be added and removed while tracking
// the binary coverage exactly.
class CoverageCounter {
 public:
  CoverageCounter(int width, int height)
      : width_(width), height_(height), counts_(static_cast<std::size_t>(width) * height, 0) {}

  void add(const RaindropShape& shape, int delta) {
    const auto b = shape.bounds();
    for (int y = std::max(b.y0, 0); y <= std::min(b.y1, height_ - 1); ++y) {
      for (int x = std::max(b.x0, 0); x <= std::min(b.x1, width_ - 1); ++x) {
        if (!shape.contains(x, y)) continue;
        auto& c = counts_[static_cast<std::size_t>(y) * width_ + x];
        if (delta > 0 && c++ == 0) ++covered_;
        if (delta < 0 && --c == 0) --covered_;
      }
    }
  }

  double fraction() const {
    return static_cast<double>(covered_) / static_cast<double>(counts_.size());
  }

 private:
  int width_;
  int height_;
  std::vector<std::uint32_t> counts_;
  std::size_t covered_ = 0;
};

RaindropShape draw_shape(const LayoutParams& p, int width, int height, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  RaindropShape s;
  s.cx = between(0.0, width);
  s.cy = between(0.0, height);
  s.radius_px = between(p.radius_min_px, p.radius_max_px);
  s.eccentricity = between(1.0, p.eccentricity_max);
  s.axis_angle_rad = between(0.0, std::numbers::pi);
  s.cap_height_ratio = between(p.cap_height_min, p.cap_height_max);
  const bool tailed = unit(rng) < p.tail_probability;
  const double tail_factor = between(p.tail_length_min, p.tail_length_max);
  s.tail_length_px = tailed ? tail_factor * s.radius_px : 0.0;
  return s;
}

}  // namespace

RaindropLayout sample_layout(const LayoutParams& params, int width, int height,
                             std::uint64_t seed) {
  params.validate();
  if (width < 1 || height < 1) throw ConfigError("layout image size must be >= 1");

  std::mt19937_64 rng(seed);
  RaindropLayout layout;
  layout.seed = seed;
  layout.geometry.background_depth_mm = params.background_depth_mm;
  layout.geometry.raindrop_depth_mm =
      std::uniform_real_distribution<double>(params.depth_min_mm, params.depth_max_mm)(rng);

  int count = 0;
  if (params.mean_drop_count > 0.0) {
    count = std::poisson_distribution<int>(params.mean_drop_count)(rng);
  }

  CoverageCounter coverage(width, height);
  for (int i = 0; i < count; ++i) {
    layout.shapes.push_back(draw_shape(params, width, height, rng));
    coverage.add(layout.shapes.back(), +1);
  }

  const double lo = 0.5 * params.coverage_target;
  const double hi = 1.5 * params.coverage_target;
  int steps = 0;
  while (true) {
    const double c = coverage.fraction();
    if (c > hi && !layout.shapes.empty()) {
      coverage.add(layout.shapes.back(), -1);
      layout.shapes.pop_back();
    } else if (c < lo) {
      layout.shapes.push_back(draw_shape(params, width, height, rng));
      coverage.add(layout.shapes.back(), +1);
    } else {
      break;
    }
    if (++steps > params.max_adjust_steps) {
      throw GenerationError("coverage target " + std::to_string(params.coverage_target) +
                            " not reached after " + std::to_string(params.max_adjust_steps) +
                            " adjustments (last coverage " + std::to_string(c) + ")");
    }
  }
  return layout;
}

RaindropMask rasterize_mask(const RaindropLayout& layout, int width, int height) {
  RaindropMask mask(width, height, MaskKind::binary);
  for (const auto& shape : layout.shapes) {
    const auto b = shape.bounds();
    for (int y = std::max(b.y0, 0); y <= std::min(b.y1, height - 1); ++y) {
      for (int x = std::max(b.x0, 0); x <= std::min(b.x1, width - 1); ++x) {
        if (shape.contains(x, y)) mask.set(x, y, 1.0);
      }
    }
  }
  return mask;
}

ImagePlane refract_compose(const ImagePlane& background, const RaindropLayout& layout,
                           const CameraConfig& cam, const RefractionOptions& options) {
  layout.geometry.validate();
  ImagePlane out = background;
  if (layout.shapes.empty()) return out;

  const int w = background.width();
  const int h = background.height();

  // Owner map: index of the drop with the tallest water column at each pixel.
  std::vector<int> owner(static_cast<std::size_t>(w) * h, -1);
  std::vector<double> owner_height(owner.size(), -1.0);
  for (std::size_t i = 0; i < layout.shapes.size(); ++i) {
    const auto& shape = layout.shapes[i];
    const auto b = shape.bounds();
    for (int y = std::max(b.y0, 0); y <= std::min(b.y1, h - 1); ++y) {
      for (int x = std::max(b.x0, 0); x <= std::min(b.x1, w - 1); ++x) {
        if (!shape.contains(x, y)) continue;
        const std::size_t k = static_cast<std::size_t>(y) * w + x;
        const double hh = shape.height(x, y);
        if (hh > owner_height[k]) {
          owner_height[k] = hh;
          owner[k] = static_cast<int>(i);
        }
      }
    }
  }

  // Lengths are in glass-plane pixel units: the camera sits at the origin, the
  // glass at z = f_px, and the background at z = f_px * d_scene / d.
  const double focal_px = cam.focal_length_px();
  const double glass_z = focal_px;
  const double background_z =
      focal_px * layout.geometry.background_depth_mm / layout.geometry.raindrop_depth_mm;
  const double cx0 = 0.5 * (w - 1);
  const double cy0 = 0.5 * (h - 1);
  const double ior = options.water_ior;

#pragma omp parallel for schedule(dynamic, 8)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t k = static_cast<std::size_t>(y) * w + x;
      if (owner[k] < 0) continue;
      const RaindropShape& shape = layout.shapes[static_cast<std::size_t>(owner[k])];

      const Vec3 entry{x - cx0, y - cy0, glass_z};
      const Vec3 view = entry.normalized();
      Vec3 inside{0.0, 0.0, 1.0};
      refract(view, {0.0, 0.0, -1.0}, 1.0 / ior, inside);

      // Bisection on s * dir.z - height(entry + s * dir) for the exit point.
      const double apex = std::max(owner_height[k], shape.cap_height_ratio * shape.radius_px);
      double lo = 0.0;
      double hi = (apex + 1e-9) / inside.z;
      for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = mid * inside.z - shape.height(x + mid * inside.x, y + mid * inside.y);
        (g < 0.0 ? lo : hi) = mid;
      }
      const double travel = hi;
      const double ex = x + travel * inside.x;
      const double ey = y + travel * inside.y;
      const Vec3 exit{entry.x + travel * inside.x, entry.y + travel * inside.y,
                      glass_z + travel * inside.z};

      constexpr double step = 1e-3;
      const double gx = (shape.height(ex + step, ey) - shape.height(ex - step, ey)) / (2 * step);
      const double gy = (shape.height(ex, ey + step) - shape.height(ex, ey - step)) / (2 * step);
      const Vec3 outward = Vec3{-gx, -gy, 1.0}.normalized();

      Vec3 leaving;
      if (!refract(inside, outward * -1.0, ior, leaving) || leaving.z <= 0.0) {
        out.at(x, y) = options.tir_darkening * background.at(x, y);
        continue;
      }
      const double t = (background_z - exit.z) / leaving.z;
      const double bx = exit.x + t * leaving.x;
      const double by = exit.y + t * leaving.y;
      const double u = cx0 + focal_px * bx / background_z;
      const double v = cy0 + focal_px * by / background_z;
      out.at(x, y) = std::clamp(sample_bilinear_clamped(background, u, v), 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace dpforge
