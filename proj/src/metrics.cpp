#include "adasched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "adasched/error.hpp"
#include "adasched/rng.hpp"

namespace adasched {

MomentsError moments_error(const Batch& samples, const MixtureModel& model) {
  if (samples.empty()) throw InvalidArgument("moments of an empty batch");
  if (samples.dim() != model.dim()) throw InvalidArgument("batch and mixture differ in dimension");
  const std::size_t d = samples.dim();
  const double n = static_cast<double>(samples.count());

  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < samples.count(); ++r) {
    auto row = samples.row(r);
    for (std::size_t i = 0; i < d; ++i) mean[i] += row[i];
  }
  for (double& m : mean) m /= n;

  std::vector<double> cov(d * d, 0.0);
  for (std::size_t r = 0; r < samples.count(); ++r) {
    auto row = samples.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) cov[i * d + j] += (row[i] - mean[i]) * (row[j] - mean[j]);
    }
  }
  for (double& c : cov) c /= n;

  const auto true_mean = model.mean();
  const auto true_cov = model.covariance();
  MomentsError err;
  for (std::size_t i = 0; i < d; ++i) err.mean_error += (mean[i] - true_mean[i]) * (mean[i] - true_mean[i]);
  for (std::size_t k = 0; k < d * d; ++k) err.cov_error += (cov[k] - true_cov[k]) * (cov[k] - true_cov[k]);
  err.mean_error = std::sqrt(err.mean_error);
  err.cov_error = std::sqrt(err.cov_error);
  return err;
}

double wasserstein_1d(std::span<const double> a_sorted, std::span<const double> b_sorted) {
  if (a_sorted.size() != b_sorted.size()) {
    throw InvalidArgument("W1 needs equal sample counts (" + std::to_string(a_sorted.size()) + " vs " +
                          std::to_string(b_sorted.size()) + ")");
  }
  if (a_sorted.empty()) throw InvalidArgument("W1 of empty samples");
  if (!std::is_sorted(a_sorted.begin(), a_sorted.end()) || !std::is_sorted(b_sorted.begin(), b_sorted.end())) {
    throw InvalidArgument("W1 inputs must be sorted ascending");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a_sorted.size(); ++i) total += std::abs(a_sorted[i] - b_sorted[i]);
  return total / static_cast<double>(a_sorted.size());
}

double wasserstein_1d_unsorted(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return wasserstein_1d(a, b);
}

double sliced_wasserstein(const Batch& a, const Batch& b, int directions, std::uint64_t rng_seed) {
  if (a.dim() != b.dim()) throw InvalidArgument("sliced W1 batches differ in dimension");
  if (a.dim() < 2) throw InvalidArgument("sliced W1 needs dimension >= 2");
  if (directions < 8) throw InvalidArgument("sliced W1 needs at least 8 directions");
  if (a.count() != b.count()) throw InvalidArgument("sliced W1 needs equal sample counts");

  Rng rng(rng_seed);
  const std::size_t d = a.dim();
  std::vector<double> pa(a.count());
  std::vector<double> pb(b.count());
  double total = 0.0;
  for (int k = 0; k < directions; ++k) {
    auto u = standard_normal(d, rng);
    double norm = 0.0;
    for (double v : u) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : u) v /= norm;

    for (std::size_t r = 0; r < a.count(); ++r) {
      auto ra = a.row(r);
      auto rb = b.row(r);
      double sa = 0.0;
      double sb = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        sa += ra[i] * u[i];
        sb += rb[i] * u[i];
      }
      pa[r] = sa;
      pb[r] = sb;
    }
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    total += wasserstein_1d(pa, pb);
  }
  return total / directions;
}

double distribution_distance(const Batch& a, const Batch& b, std::uint64_t rng_seed, int directions) {
  if (a.dim() == 1 && b.dim() == 1) return wasserstein_1d_unsorted(a.data(), b.data());
  return sliced_wasserstein(a, b, directions, rng_seed);
}

}  // namespace adasched
