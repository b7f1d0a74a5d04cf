#pragma once

#include <cstdint>
#include <optional>

#include "dpforge/convolve.hpp"
#include "dpforge/image.hpp"
#include "dpforge/optics.hpp"
#include "dpforge/psf.hpp"
#include "dpforge/raindrop.hpp"

namespace dpforge {

// One rendered dual-pixel training sample.
struct DpSample {
  ImagePlane rainy_left, rainy_right, rainy_combined;
  ImagePlane clean_left, clean_right, clean_combined;
  RaindropMask mask_aifr;                   // binary, shared by both sides
  RaindropMask soft_mask_left, soft_mask_right;  // blurred alpha weights
  RaindropMask mask_left, mask_right, mask_combined;  // binary ground truth
  SceneGeometry geometry;
  std::uint64_t seed = 0;
  CocRadius coc{0.0, 0.0};
};

struct RenderSettings {
  HalfDiskOptions psf;
  // Externally calibrated front-focus kernels; synthesized half disks when empty.
  std::optional<PsfGrid> left_template;
  std::optional<PsfGrid> right_template;
  PatchwiseOptions convolution;
  RefractionOptions refraction;
  double mask_threshold = 0.05;
};

// R = M (x) I. The mask must be binary.
ImagePlane extract_raindrops(const ImagePlane& aifr_image, const RaindropMask& aifr_mask);

struct BlurredSide {
  ImagePlane raindrops;
  RaindropMask alpha;
};

BlurredSide blur_side(const ImagePlane& raindrops, const RaindropMask& aifr_mask,
                      const PsfGrid& grid, const PatchwiseOptions& options = {});

// I = M (x) R + (1 - M) (x) B, clamped to [0,1].
ImagePlane alpha_blend(const RaindropMask& alpha, const ImagePlane& raindrops,
                       const ImagePlane& background);

// Left or right grid for the CoC radius of the given geometry.
PsfGrid side_grid(const CocRadius& coc, Side side, const RenderSettings& settings);

// Full left/right/combined rendering for one layout. The camera is refocused
// onto the background plane. Stage failures surface as GenerationError.
DpSample render_sample(const ImagePlane& background_left, const ImagePlane& background_right,
                       const RaindropLayout& layout, const CameraConfig& cam,
                       const RenderSettings& settings = {});

}  // namespace dpforge
