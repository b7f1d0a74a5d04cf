#pragma once

#include <cstdint>
#include <vector>

#include "dpforge/image.hpp"
#include "dpforge/optics.hpp"

namespace dpforge {

// One water drop sitting on the glass plane, in image pixel coordinates.
//
// The footprint is an ellipse of semi-axes (radius * eccentricity, radius) whose
// long axis points along axis_angle_rad. The water surface above it is a sphere
// cap of height cap_height_ratio * radius. A nonzero tail_length_px adds a
// tapering trail above the body (toward -y), as left behind by a sliding drop.
struct RaindropShape {
  double cx = 0.0;
  double cy = 0.0;
  double radius_px = 1.0;
  double eccentricity = 1.0;
  double axis_angle_rad = 0.0;
  double cap_height_ratio = 0.5;
  double tail_length_px = 0.0;

  bool contains(double x, double y) const;

  // Water thickness above the glass at (x, y), 0 outside the footprint.
  double height(double x, double y) const;

  struct Bounds {
    int x0, y0, x1, y1;  // inclusive
  };
  Bounds bounds() const;

  friend bool operator==(const RaindropShape&, const RaindropShape&) = default;
};

struct RaindropLayout {
  std::vector<RaindropShape> shapes;
  std::uint64_t seed = 0;
  SceneGeometry geometry;

  friend bool operator==(const RaindropLayout&, const RaindropLayout&) = default;
};

struct LayoutParams {
  double mean_drop_count = 40.0;  // Poisson mean for the initial draw
  double radius_min_px = 6.0;
  double radius_max_px = 40.0;
  double coverage_target = 0.10;  // accepted band is [0.5, 1.5] x target
  double tail_probability = 0.2;
  double tail_length_min = 1.0;  // in units of the drop radius
  double tail_length_max = 3.0;
  double eccentricity_max = 1.4;
  double cap_height_min = 0.2;
  double cap_height_max = 0.6;
  double depth_min_mm = 150.0;
  double depth_max_mm = 250.0;
  double background_depth_mm = 10000.0;
  int max_adjust_steps = 20000;

  void validate() const;
};

// Draws drop count, shapes and raindrop depth. Deterministic in (params, size, seed).
// Throws GenerationError when the coverage band cannot be reached.
RaindropLayout sample_layout(const LayoutParams& params, int width, int height,
                             std::uint64_t seed);

// Binary all-in-focus mask: 1 where a pixel center lies inside any footprint.
RaindropMask rasterize_mask(const RaindropLayout& layout, int width, int height);

struct RefractionOptions {
  double water_ior = 1.33;
  double tir_darkening = 0.7;
};

// All-in-focus raindrop image. Each covered pixel's pin-hole ray enters the
// water through the flat glass side, leaves through the curved surface and is
// propagated to the background plane, where the background is sampled
// bilinearly with border clamping. Pixels outside every footprint are copied.
ImagePlane refract_compose(const ImagePlane& background, const RaindropLayout& layout,
                           const CameraConfig& cam, const RefractionOptions& options = {});

}  // namespace dpforge
