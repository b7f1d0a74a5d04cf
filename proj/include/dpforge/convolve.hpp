#pragma once

#include "dpforge/image.hpp"
#include "dpforge/psf.hpp"

namespace dpforge {

enum class ConvolutionMethod { automatic, direct, fft };

struct PatchwiseOptions {
  // Margin each patch extends into its neighbours; overlaps are linearly feathered.
  int overlap_px = 16;
  ConvolutionMethod method = ConvolutionMethod::automatic;
  // Kernels at least this wide use the FFT path under ConvolutionMethod::automatic.
  int fft_min_kernel = 15;
  bool clamp_output = true;
};

// Spatially varying blur. The image is split into grid.rows() x grid.cols()
// patches; every patch, grown by overlap_px, is convolved with its own kernel
// using true neighbouring pixels (replicate padding only at the image border),
// then the patches are stitched with linear feathering across the overlaps.
// Throws ConfigError when a kernel is larger than a patch.
ImagePlane patchwise_convolve(const ImagePlane& img, const PsfGrid& grid,
                              const PatchwiseOptions& options = {});

}  // namespace dpforge
