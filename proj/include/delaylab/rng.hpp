#pragma once

#include <cstdint>
#include <random>

namespace delaylab {

using Rng = std::mt19937_64;

// Independent random streams of one episode. Changing the learner never
// perturbs the environment or delay draws.
enum class Stream : std::uint64_t {
  environment = 0x656e76,
  delay = 0x64656c,
  learner = 0x6c726e,
};

std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of `stream` for run `run_index` under `master_seed`.
std::uint64_t substream_seed(std::uint64_t master_seed, Stream stream,
                             std::uint64_t run_index) noexcept;

// Seed of the index-th child of a stream (BOLD instance j, ...).
std::uint64_t child_seed(std::uint64_t parent_seed, std::uint64_t index) noexcept;

}  // namespace delaylab
