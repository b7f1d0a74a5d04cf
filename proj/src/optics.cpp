#include "dpforge/optics.hpp"

#include <cmath>
#include <string>

#include "dpforge/errors.hpp"

namespace dpforge {

void CameraConfig::validate() const {
  if (!(focal_length_mm > 0.0)) throw GeometryError("focal length must be > 0");
  if (!(f_stop > 0.0)) throw GeometryError("f-stop must be > 0");
  if (!(pixel_pitch_um > 0.0)) throw GeometryError("pixel pitch must be > 0");
  if (!(focus_distance_mm > focal_length_mm)) {
    throw GeometryError("focus distance " + std::to_string(focus_distance_mm) +
                        " mm must exceed focal length " + std::to_string(focal_length_mm) + " mm");
  }
}

void SceneGeometry::validate() const {
  if (!(raindrop_depth_mm > 0.0)) throw GeometryError("raindrop depth must be > 0");
  if (!(raindrop_depth_mm <= background_depth_mm)) {
    throw GeometryError("raindrop depth must not exceed the background depth");
  }
}

ApertureGeometry aperture_and_sensor_distance(const CameraConfig& cam) {
  cam.validate();
  const double f = cam.focal_length_mm;
  const double s = cam.focus_distance_mm;
  return {f / cam.f_stop, f * s / (s - f)};
}

CocRadius coc_radius(const CameraConfig& cam, const SceneGeometry& geo) {
  if (!(geo.raindrop_depth_mm > 0.0)) throw GeometryError("raindrop depth must be > 0");
  const auto [q, s_prime] = aperture_and_sensor_distance(cam);
  const double s = cam.focus_distance_mm;
  const double d = geo.raindrop_depth_mm;
  const double r_mm = (q / 2.0) * (s_prime / s) * ((d - s) / d);
  return {r_mm, std::abs(r_mm) * 1000.0 / cam.pixel_pitch_um};
}

CocRadius background_focused_coc(CameraConfig cam, const SceneGeometry& geo) {
  cam.focus_distance_mm = geo.background_depth_mm;
  return coc_radius(cam, geo);
}

}  // namespace dpforge
