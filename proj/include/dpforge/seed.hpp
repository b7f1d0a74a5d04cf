#pragma once

#include <cstdint>
#include <string_view>

namespace dpforge {

// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

// Stable 64-bit FNV-1a hash of an identifier.
std::uint64_t stable_hash(std::string_view text);

// Counter-based child seed for (master, background, variant). Each sample's seed
// depends only on its own coordinates, so adding backgrounds leaves others unchanged.
std::uint64_t derive_sample_seed(std::uint64_t master, std::string_view background_id,
                                 std::uint64_t variant);

}  // namespace dpforge
