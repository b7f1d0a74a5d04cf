#pragma once

#include <cstdint>
#include <filesystem>

#include "dpforge/image.hpp"

namespace dpforge {

// Procedural in-focus background texture (smooth gradients, soft blobs and
// fine stripes) for demos and tests when no captured backgrounds are at hand.
ImagePlane synthetic_background(int width, int height, std::uint64_t seed);

// Writes <prefix>NNN_left.png / _right.png pairs. The right half equals the
// left plus independent Gaussian noise of the given sigma.
void write_synthetic_backgrounds(const std::filesystem::path& dir, int count, int width, int height,
                                 std::uint64_t seed, double right_noise_sigma = 0.0);

}  // namespace dpforge
