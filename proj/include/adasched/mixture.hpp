#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adasched/batch.hpp"
#include "adasched/noise_schedule.hpp"

namespace adasched {

struct MixtureComponent {
  double weight = 1.0;
  std::vector<double> mean;
  double variance = 1.0;  // isotropic
};

/// Isotropic Gaussian mixture in R^d. Component indices double as condition
/// labels for guided sampling.
class MixtureModel {
 public:
  MixtureModel() = default;
  explicit MixtureModel(std::vector<MixtureComponent> components);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return components_.size(); }
  const std::vector<MixtureComponent>& components() const { return components_; }
  const MixtureComponent& component(std::size_t k) const;

  /// Single-component model for condition k (weight 1).
  MixtureModel restrict_to(std::size_t k) const;

  std::vector<double> mean() const;
  /// Row-major d x d covariance.
  std::vector<double> covariance() const;

  /// Log density at x, stabilized by log-sum-exp.
  double log_density(std::span<const double> x) const;
  /// Posterior component probabilities at x.
  std::vector<double> responsibilities(std::span<const double> x) const;
  /// Gradient of the log density at x.
  std::vector<double> score(std::span<const double> x) const;

 private:
  std::vector<double> component_log_terms(std::span<const double> x) const;

  std::size_t dim_ = 0;
  std::vector<MixtureComponent> components_;
};

/// Exact time-t marginal: means scaled by sqrt(ab), variances ab * v + 1 - ab.
MixtureModel diffused_params(const MixtureModel& model, double alpha_bar);
MixtureModel diffused_params(const MixtureModel& model, const NoiseSchedule& schedule, int t);

/// Score of the diffused mixture at timestep t.
std::vector<double> score(const MixtureModel& model, const NoiseSchedule& schedule, std::span<const double> x, int t);

/// eps = -sqrt(1 - ab_t) * score. With a condition, the score of that single
/// component's diffused density is used.
std::vector<double> epsilon_prediction(const MixtureModel& model, const NoiseSchedule& schedule,
                                       std::span<const double> x, int t,
                                       std::optional<std::size_t> condition = std::nullopt);

Batch sample_ground_truth(const MixtureModel& model, std::size_t count, std::uint64_t rng_seed);

std::vector<std::string> mixture_preset_names();
MixtureModel mixture_preset(std::string_view name);

MixtureModel mixture_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MixtureModel& model);

}  // namespace adasched
