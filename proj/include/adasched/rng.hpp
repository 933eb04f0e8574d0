#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace adasched {

using Rng = std::mt19937_64;

// Purpose tags for seed splitting. Every random stream in an experiment is
// derived from one root seed as derive_seed(root, purpose, index), where
// index is the chain number (or 0 for single streams).
enum class Stream : std::uint64_t {
  initial_noise = 1,
  sampler_noise = 2,
  ground_truth = 3,
  projections = 4,
};

std::uint64_t derive_seed(std::uint64_t root, Stream purpose, std::uint64_t index = 0);

std::vector<double> standard_normal(std::size_t n, Rng& rng);

}  // namespace adasched
