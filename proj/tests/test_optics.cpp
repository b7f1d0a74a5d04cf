#include "doctest.h"

#include <cmath>

#include "dpforge/errors.hpp"
#include "dpforge/optics.hpp"

using namespace dpforge;

TEST_CASE("aperture and sensor distance") {
  CameraConfig cam;
  const auto g = aperture_and_sensor_distance(cam);
  CHECK(g.aperture_mm == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(std::abs(g.sensor_distance_mm - 5.00250125062531) < 1e-12);

  cam.f_stop = 1.0;
  CHECK(aperture_and_sensor_distance(cam).aperture_mm == 5.0);

  cam.focus_distance_mm = 1e12;
  CHECK(std::abs(aperture_and_sensor_distance(cam).sensor_distance_mm - 5.0) / 5.0 < 1e-6);
}

TEST_CASE("CoC radius reference values") {
  CameraConfig cam;
  auto c = coc_radius(cam, {10000.0, 200.0});
  CHECK(std::abs(c.mm - (-0.03064032016008)) < 1e-12);
  CHECK(std::abs(c.px - 21.8859429714857) < 1e-9);
  CHECK(c.orientation() == -1);

  c = coc_radius(cam, {10000.0, 250.0});
  CHECK(std::abs(c.mm - (-0.0243871935967984)) < 1e-12);
  CHECK(std::abs(c.px - 17.4194239977131) < 1e-9);
}

TEST_CASE("CoC vanishes in focus") {
  CameraConfig cam;
  cam.focus_distance_mm = 300.0;
  const auto c = coc_radius(cam, {10000.0, 300.0});
  CHECK(c.mm == 0.0);
  CHECK(c.px == 0.0);
  CHECK(c.orientation() == 0);
}

TEST_CASE("CoC magnitude decreases with depth in front of focus") {
  CameraConfig cam;
  double prev = INFINITY;
  for (double frac : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    const double d = frac * cam.focus_distance_mm;
    const double r = std::abs(coc_radius(cam, {20000.0, d}).mm);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("halving the f-number doubles the CoC") {
  CameraConfig cam;
  const double r1 = coc_radius(cam, {10000.0, 200.0}).mm;
  cam.f_stop = 1.0;
  const double r2 = coc_radius(cam, {10000.0, 200.0}).mm;
  CHECK(r2 == doctest::Approx(2.0 * r1).epsilon(1e-14));
}

TEST_CASE("background-focused CoC overrides the focus distance") {
  CameraConfig cam;
  cam.focus_distance_mm = 123.0;
  const auto c = background_focused_coc(cam, {10000.0, 200.0});
  CHECK(std::abs(c.mm - (-0.03064032016008)) < 1e-12);
  CHECK(background_focused_coc(cam, {10000.0, 10000.0}).px == 0.0);
}

TEST_CASE("invalid geometry") {
  CameraConfig cam;
  CHECK_THROWS_AS(coc_radius(cam, {10000.0, 0.0}), GeometryError);
  CHECK_THROWS_AS(coc_radius(cam, {10000.0, -5.0}), GeometryError);
  cam.f_stop = 0.0;
  CHECK_THROWS(coc_radius(cam, {10000.0, 200.0}));
}
