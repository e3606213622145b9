#include "delaylab/rng.hpp"

namespace delaylab {

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master_seed, Stream stream,
                             std::uint64_t run_index) noexcept {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  return mix64(h ^ mix64(run_index));
}

std::uint64_t child_seed(std::uint64_t parent_seed, std::uint64_t index) noexcept {
  return mix64(mix64(parent_seed) ^ mix64(index + 0x63686c64ULL));
}

}  // namespace delaylab
