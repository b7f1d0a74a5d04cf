#include "dpforge/compositor.hpp"

#include <algorithm>
#include <future>
#include <string>

#include "dpforge/errors.hpp"

namespace dpforge {

ImagePlane extract_raindrops(const ImagePlane& aifr_image, const RaindropMask& aifr_mask) {
  if (aifr_mask.kind() != MaskKind::binary) {
    throw std::invalid_argument("extract_raindrops expects a binary mask");
  }
  return pixel_multiply(aifr_mask, aifr_image);
}

BlurredSide blur_side(const ImagePlane& raindrops, const RaindropMask& aifr_mask,
                      const PsfGrid& grid, const PatchwiseOptions& options) {
  require_same_geometry(raindrops, aifr_mask.plane(), "blur_side");
  return {patchwise_convolve(raindrops, grid, options),
          RaindropMask::soft_from(patchwise_convolve(aifr_mask.plane(), grid, options))};
}

ImagePlane alpha_blend(const RaindropMask& alpha, const ImagePlane& raindrops,
                       const ImagePlane& background) {
  require_same_geometry(alpha.plane(), raindrops, "alpha_blend");
  require_same_geometry(raindrops, background, "alpha_blend");
  ImagePlane out(background.width(), background.height());
  auto m = alpha.plane().pixels();
  auto r = raindrops.pixels();
  auto b = background.pixels();
  auto o = out.pixels();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = m[i] * r[i] + (1.0 - m[i]) * b[i];
  }
  out.clamp_unit();
  return out;
}

PsfGrid side_grid(const CocRadius& coc, Side side, const RenderSettings& settings) {
  const auto& tmpl = side == Side::left ? settings.left_template : settings.right_template;
  if (!tmpl) return synthesize_half_disk_grid(coc.px, side, coc.orientation(), settings.psf);

  if (coc.px < 0.5) return PsfGrid::uniform(tmpl->rows(), tmpl->cols(), PsfKernel::delta(side));
  if (coc.orientation() > 0) {
    throw ConfigError("calibrated PSF templates only describe front-focused raindrops");
  }
  if (tmpl->side() != side) {
    throw ConfigError(std::string("PSF template side is ") + to_string(tmpl->side()) +
                      ", expected " + to_string(side));
  }
  return rescale_grid(*tmpl, coc.px);
}

namespace {

template <class F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw GenerationError(std::string("stage '") + stage + "' failed: " + e.what());
  }
}

struct SideResult {
  ImagePlane rainy;
  RaindropMask alpha;
};

SideResult render_side(const ImagePlane& background, const RaindropLayout& layout,
                       const RaindropMask& aifr_mask, const CameraConfig& cam,
                       const CocRadius& coc, Side side, const RenderSettings& settings) {
  auto aifr = run_stage("raindrop generation", [&] {
    return refract_compose(background, layout, cam, settings.refraction);
  });
  auto raindrops = run_stage("raindrop extraction", [&] { return extract_raindrops(aifr, aifr_mask); });
  auto grid = run_stage("psf", [&] { return side_grid(coc, side, settings); });
  auto blurred = run_stage("raindrop blurring", [&] {
    return blur_side(raindrops, aifr_mask, grid, settings.convolution);
  });
  auto rainy = run_stage("alpha blending", [&] {
    return alpha_blend(blurred.alpha, blurred.raindrops, background);
  });
  return {std::move(rainy), std::move(blurred.alpha)};
}

}  // namespace

DpSample render_sample(const ImagePlane& background_left, const ImagePlane& background_right,
                       const RaindropLayout& layout, const CameraConfig& cam,
                       const RenderSettings& settings) {
  run_stage("input", [&] {
    require_same_geometry(background_left, background_right, "render_sample backgrounds");
    layout.geometry.validate();
  });
  const int w = background_left.width();
  const int h = background_left.height();

  CameraConfig focused = cam;
  focused.focus_distance_mm = layout.geometry.background_depth_mm;
  const CocRadius coc = run_stage("optics", [&] { return coc_radius(focused, layout.geometry); });
  auto aifr_mask = run_stage("mask", [&] { return rasterize_mask(layout, w, h); });

  auto right_future = std::async(std::launch::async, [&] {
    return render_side(background_right, layout, aifr_mask, focused, coc, Side::right, settings);
  });
  SideResult left = render_side(background_left, layout, aifr_mask, focused, coc, Side::left, settings);
  SideResult right = right_future.get();

  auto mask_left = RaindropMask::threshold(left.alpha.plane(), settings.mask_threshold);
  auto mask_right = RaindropMask::threshold(right.alpha.plane(), settings.mask_threshold);
  auto mask_combined = pixel_max(mask_left, mask_right);
  auto rainy_combined = average_pair(left.rainy, right.rainy);
  auto clean_combined = average_pair(background_left, background_right);

  return DpSample{std::move(left.rainy),
                  std::move(right.rainy),
                  std::move(rainy_combined),
                  background_left,
                  background_right,
                  std::move(clean_combined),
                  std::move(aifr_mask),
                  std::move(left.alpha),
                  std::move(right.alpha),
                  std::move(mask_left),
                  std::move(mask_right),
                  std::move(mask_combined),
                  layout.geometry,
                  layout.seed,
                  coc};
}

}  // namespace dpforge
