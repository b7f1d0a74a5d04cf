#include "dpforge/seed.hpp"

namespace dpforge {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_sample_seed(std::uint64_t master, std::string_view background_id,
                                 std::uint64_t variant) {
  return mix64(mix64(mix64(master) ^ stable_hash(background_id)) + variant);
}

}  // namespace dpforge
