#pragma once

namespace dpforge {

// Thin-lens camera. Distances in millimeters, pitch in micrometers.
// Defaults approximate a smartphone main camera; they are not calibrated values.
struct CameraConfig {
  double focal_length_mm = 5.0;
  double f_stop = 2.0;
  double focus_distance_mm = 10000.0;
  double pixel_pitch_um = 1.4;

  void validate() const;

  // Focal length expressed in pixels, used by the pin-hole ray generator.
  double focal_length_px() const { return focal_length_mm * 1000.0 / pixel_pitch_um; }
};

struct SceneGeometry {
  double background_depth_mm = 10000.0;
  double raindrop_depth_mm = 200.0;

  // Requires 0 < raindrop_depth <= background_depth; equality is the in-focus case.
  void validate() const;

  friend bool operator==(const SceneGeometry&, const SceneGeometry&) = default;
};

struct ApertureGeometry {
  double aperture_mm;         // q = f / F
  double sensor_distance_mm;  // s' = f s / (s - f)
};

struct CocRadius {
  double mm;  // signed; negative when the raindrop is in front of the focus plane
  double px;  // magnitude in pixels

  // -1 for front focus, +1 for back focus, 0 when in focus.
  int orientation() const { return mm < 0.0 ? -1 : (mm > 0.0 ? 1 : 0); }
};

ApertureGeometry aperture_and_sensor_distance(const CameraConfig& cam);

// r = (q/2) (s'/s) ((d - s)/d), with s taken from cam.focus_distance_mm and d the
// raindrop depth. Callers modelling a background-focused camera set s = d_scene.
CocRadius coc_radius(const CameraConfig& cam, const SceneGeometry& geo);

// Convenience: the same with focus forced onto the background plane.
CocRadius background_focused_coc(CameraConfig cam, const SceneGeometry& geo);

}  // namespace dpforge
