#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adasched/batch.hpp"
#include "adasched/mixture.hpp"

namespace adasched {

struct MomentsError {
  double mean_error = 0.0;  // L2 distance of means
  double cov_error = 0.0;   // Frobenius distance of covariances
};

/// Compares the empirical moments of `samples` with the closed-form moments
/// of `model`.
MomentsError moments_error(const Batch& samples, const MixtureModel& model);

/// Exact empirical W1 between equally sized, ascending samples.
double wasserstein_1d(std::span<const double> a_sorted, std::span<const double> b_sorted);

/// W1 after sorting copies of both samples.
double wasserstein_1d_unsorted(std::vector<double> a, std::vector<double> b);

/// Mean W1 over `directions` seeded random unit projections. Needs dim >= 2
/// and at least 8 directions.
double sliced_wasserstein(const Batch& a, const Batch& b, int directions, std::uint64_t rng_seed);

inline constexpr int kDefaultSliceDirections = 64;

/// W1 for one-dimensional batches, sliced W1 otherwise.
double distribution_distance(const Batch& a, const Batch& b, std::uint64_t rng_seed,
                             int directions = kDefaultSliceDirections);

}  // namespace adasched
