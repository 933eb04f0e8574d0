#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adasched/batch.hpp"
#include "adasched/guidance.hpp"
#include "adasched/importance.hpp"
#include "adasched/mixture.hpp"
#include "adasched/noise_schedule.hpp"
#include "adasched/postprocess.hpp"
#include "adasched/sampler.hpp"
#include "adasched/schedule_builder.hpp"

namespace adasched {

enum class TimestepStrategy { equidistant, importance, adaptive };

std::string_view to_string(TimestepStrategy strategy);
TimestepStrategy parse_timestep_strategy(std::string_view name);

inline constexpr double kDefaultTheta = 0.7;
inline constexpr int kDefaultInferenceSteps = 8;

/// Fully resolved experiment description. Serializes to a flat JSON object
/// whose keys are the snake_case forms of the CLI flags.
struct ExperimentConfig {
  ScheduleKind schedule_kind = ScheduleKind::linear;
  int num_train_steps = kDefaultTrainSteps;
  double beta_start = kDefaultBetaStart;
  double beta_end = kDefaultBetaEnd;
  double epsilon = kDefaultImportanceEpsilon;

  TimestepStrategy timesteps = TimestepStrategy::adaptive;
  int steps = kDefaultInferenceSteps;
  double theta = kDefaultTheta;

  SamplerVariant variant = SamplerVariant::gamma_i;
  double gamma = kDefaultGamma;

  GuidanceConfig guidance;
  std::size_t condition = 0;
  std::optional<std::size_t> negative_condition;

  PostprocessConfig postprocess;

  // Preset name or path to a JSON mixture file; ignored when inline_mixture
  // is set.
  std::string mixture = "bimodal-1d";
  std::optional<MixtureModel> inline_mixture;

  std::size_t batch = 10000;
  std::uint64_t seed = 0;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// Sets one field from its textual form. Keys accept dashes or underscores
/// ("clip-method" == "clip_method"). Throws InvalidArgument.
void set_field(ExperimentConfig& config, std::string_view key, std::string_view value);

MixtureModel resolve_mixture(const ExperimentConfig& config);
NoiseSchedule resolve_schedule(const ExperimentConfig& config);
TimestepSchedule resolve_timesteps(const ExperimentConfig& config, const NoiseSchedule& schedule,
                                   const ImportanceCurve& curve);

/// Epsilon model for the configured guidance: unconditional mixture for
/// none, otherwise a guided combination of the condition component with
/// the unconditional mixture (interpolate) or with the negative component
/// (negative_prompt, falling back to the unconditional mixture).
EpsilonModel make_epsilon_model(const MixtureModel& model, const NoiseSchedule& schedule,
                                const ExperimentConfig& config);

/// Distribution the samples are scored against: the full mixture without
/// guidance, the condition component with it.
MixtureModel reference_distribution(const MixtureModel& model, const ExperimentConfig& config);

struct RunReport {
  nlohmann::json config_echo;
  double mean_error = 0.0;
  double cov_error = 0.0;
  double wasserstein1 = 0.0;
  double saturation_fraction = 0.0;
  int step_count = 0;  // model evaluations per chain
  double wall_time = 0.0;  // seconds
  TimestepSchedule timesteps;
  std::vector<double> sample_mean;
  std::optional<CompoundingDiagnostic> compounding;
};

nlohmann::json to_json(const RunReport& report, bool include_wall_time = true);

struct ExperimentResult {
  RunReport report;
  Batch samples;
  Batch reference;
};

/// Samples `config.batch` chains, scores them against ground truth.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// Per-timestep curve: t, alpha_bar, snr, importance.
std::string importance_csv(const ExperimentConfig& config);

/// Slot table of the equidistant, importance and adaptive schedules.
std::string timestep_table_csv(const ExperimentConfig& config);

/// Trajectories of the first `chains` chains: chain, visit, t, x0..x{d-1}.
std::string trajectories_csv(const ExperimentConfig& config, std::size_t chains);

/// One metrics row per config. Configs must share mixture and seed.
std::string compare_csv(const std::vector<ExperimentConfig>& configs, unsigned threads = 0);

/// Copies of `base` with `key` set to each comma-separated value.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base, std::string_view key,
                                           std::string_view values);

std::string format_double(double v);

}  // namespace adasched
