#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "adasched/batch.hpp"
#include "adasched/importance.hpp"
#include "adasched/noise_schedule.hpp"
#include "adasched/postprocess.hpp"
#include "adasched/schedule_builder.hpp"

namespace adasched {

/// Noise prediction eps(x, t). Must be safe to call concurrently.
using EpsilonModel = std::function<std::vector<double>(std::span<const double> x, int t)>;

/// Pseudo-timestep of the clean data (alpha_bar = 1).
inline constexpr int kCleanStep = -1;

enum class SamplerVariant { plain, gamma, gamma_i };

std::string_view to_string(SamplerVariant variant);
SamplerVariant parse_sampler_variant(std::string_view name);

inline constexpr double kDefaultGamma = 0.2;

struct SamplerConfig {
  SamplerVariant variant = SamplerVariant::gamma_i;
  double gamma = kDefaultGamma;  // ignored by plain
  bool postprocess_enabled = false;
  PostprocessConfig postprocess;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct SampleTrajectory {
  // Every visited (timestep, state), including intermediate denoise targets.
  // The terminal estimate is recorded with timestep kCleanStep.
  std::vector<std::pair<int, std::vector<double>>> states;
  std::vector<double> final;
  int model_evaluations = 0;
};

// Invoked on each x0 estimate before it is re-projected.
using X0Transform = std::function<void(std::span<double>)>;

/// Deterministic step from t_from to t_to < t_from through the x0 estimate:
/// x0 = (x - sqrt(1 - ab_from) eps) / sqrt(ab_from),
/// x_to = sqrt(ab_to) x0 + sqrt(1 - ab_to) eps.
/// t_to == kCleanStep returns the x0 estimate; t_to == t_from returns x.
std::vector<double> denoise_step(const EpsilonModel& eps_model, const NoiseSchedule& schedule,
                                 std::span<const double> x, int t_from, int t_to, const X0Transform& on_x0 = {});

/// Forward kernel x_to = sqrt(ab_to / ab_from) x + sqrt(1 - ab_to / ab_from) noise
/// for t_to >= t_from. t_from may be kCleanStep.
std::vector<double> noisify(const NoiseSchedule& schedule, std::span<const double> x, int t_from, int t_to,
                            std::span<const double> noise);

/// Runs one chain along `timesteps`, starting from `initial` at timesteps[0].
///
/// plain denoises slot to slot. gamma denoises each transition to
/// round((1 - gamma) * t_next) and noisifies back to t_next. gamma_i does the
/// same on equidistant slots but uses round(I(t_next) * t_next) on
/// importance slots, reading I from `curve`. The last leg always ends at the
/// clean estimate without re-noising. Noise comes from Rng(config.rng_seed).
SampleTrajectory run_sampler(const SamplerConfig& config, const NoiseSchedule& schedule,
                             const TimestepSchedule& timesteps, const EpsilonModel& eps_model,
                             std::span<const double> initial, const ImportanceCurve* curve = nullptr);

/// Runs every row of `initial` as an independent chain; chain i draws its
/// noise from derive_seed(config.rng_seed, sampler_noise, i). Returns the
/// terminal estimates in row order. Results do not depend on `threads`.
Batch sample_batch(const SamplerConfig& config, const NoiseSchedule& schedule, const TimestepSchedule& timesteps,
                   const EpsilonModel& eps_model, const Batch& initial, const ImportanceCurve* curve = nullptr,
                   unsigned threads = 0);

}  // namespace adasched
