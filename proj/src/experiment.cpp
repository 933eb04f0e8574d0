#include "adasched/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adasched/error.hpp"
#include "adasched/metrics.hpp"
#include "adasched/rng.hpp"

namespace adasched {

using nlohmann::json;

std::string_view to_string(TimestepStrategy strategy) {
  switch (strategy) {
    case TimestepStrategy::equidistant:
      return "equidistant";
    case TimestepStrategy::importance:
      return "importance";
    case TimestepStrategy::adaptive:
      return "adaptive";
  }
  return "unknown";
}

TimestepStrategy parse_timestep_strategy(std::string_view name) {
  if (name == "equidistant") return TimestepStrategy::equidistant;
  if (name == "importance") return TimestepStrategy::importance;
  if (name == "adaptive") return TimestepStrategy::adaptive;
  throw InvalidArgument("unknown timestep strategy '" + std::string(name) + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InvalidArgument("cannot format number");
  return std::string(buf, end);
}

namespace {

std::string normalize_key(std::string_view key) {
  std::string out(key);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw InvalidArgument("invalid number '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view text) {
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidArgument("invalid integer '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

bool is_null_text(std::string_view text) { return text.empty() || text == "null" || text == "none"; }

}  // namespace

void ExperimentConfig::validate() const {
  if (num_train_steps < 3) throw InvalidArgument("num_train_steps must be >= 3");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (steps < 2 || steps > num_train_steps) throw InvalidArgument("steps must lie in [2, num_train_steps]");
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0, 1)");
  if (batch == 0) throw InvalidArgument("batch must be >= 1");
  guidance.validate();
  postprocess.validate();
}

void set_field(ExperimentConfig& c, std::string_view raw_key, std::string_view value) {
  const std::string key = normalize_key(raw_key);
  if (key == "schedule_kind") {
    c.schedule_kind = parse_schedule_kind(value);
  } else if (key == "num_train_steps") {
    c.num_train_steps = parse_integer<int>(key, value);
  } else if (key == "beta_start") {
    c.beta_start = parse_double(key, value);
  } else if (key == "beta_end") {
    c.beta_end = parse_double(key, value);
  } else if (key == "epsilon") {
    c.epsilon = parse_double(key, value);
  } else if (key == "timesteps") {
    c.timesteps = parse_timestep_strategy(value);
  } else if (key == "steps") {
    c.steps = parse_integer<int>(key, value);
  } else if (key == "theta") {
    c.theta = parse_double(key, value);
  } else if (key == "variant") {
    c.variant = parse_sampler_variant(value);
  } else if (key == "gamma") {
    c.gamma = parse_double(key, value);
  } else if (key == "cfg_mode") {
    c.guidance.mode = parse_guidance_mode(value);
  } else if (key == "cfg_scale") {
    c.guidance.omega = parse_double(key, value);
  } else if (key == "distill_omega") {
    if (is_null_text(value)) {
      c.guidance.distill_omega.reset();
    } else {
      c.guidance.distill_omega = parse_double(key, value);
    }
  } else if (key == "condition") {
    c.condition = parse_integer<std::size_t>(key, value);
  } else if (key == "negative_condition") {
    if (is_null_text(value)) {
      c.negative_condition.reset();
    } else {
      c.negative_condition = parse_integer<std::size_t>(key, value);
    }
  } else if (key == "clip_method") {
    c.postprocess.method = parse_clip_method(value);
  } else if (key == "clip_alpha") {
    c.postprocess.alpha = parse_double(key, value);
  } else if (key == "clip_beta") {
    c.postprocess.beta = parse_double(key, value);
  } else if (key == "quantile_q") {
    c.postprocess.quantile_q = parse_double(key, value);
  } else if (key == "quantile_ceiling") {
    c.postprocess.quantile_ceiling = parse_double(key, value);
  } else if (key == "clip_timing") {
    c.postprocess.timing = parse_clip_timing(value);
  } else if (key == "channels") {
    c.postprocess.channels = parse_integer<std::size_t>(key, value);
  } else if (key == "mixture") {
    c.mixture = std::string(value);
    c.inline_mixture.reset();
  } else if (key == "batch") {
    c.batch = parse_integer<std::size_t>(key, value);
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, value);
  } else {
    throw InvalidArgument("unknown configuration key '" + std::string(raw_key) + "'");
  }
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("experiment config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (normalize_key(key) == "mixture" && value.is_object()) {
      c.inline_mixture = mixture_from_json(value);
      continue;
    }
    if (value.is_string()) {
      set_field(c, key, value.get<std::string>());
    } else if (value.is_null()) {
      set_field(c, key, "null");
    } else if (value.is_number() || value.is_boolean()) {
      set_field(c, key, value.dump());
    } else {
      throw InvalidArgument("unsupported value for configuration key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schedule_kind"] = std::string(to_string(c.schedule_kind));
  j["num_train_steps"] = c.num_train_steps;
  j["beta_start"] = c.beta_start;
  j["beta_end"] = c.beta_end;
  j["epsilon"] = c.epsilon;
  j["timesteps"] = std::string(to_string(c.timesteps));
  j["steps"] = c.steps;
  j["theta"] = c.theta;
  j["variant"] = std::string(to_string(c.variant));
  j["gamma"] = c.gamma;
  j["cfg_mode"] = std::string(to_string(c.guidance.mode));
  j["cfg_scale"] = c.guidance.omega;
  j["distill_omega"] = c.guidance.distill_omega ? json(*c.guidance.distill_omega) : json(nullptr);
  j["condition"] = c.condition;
  j["negative_condition"] = c.negative_condition ? json(*c.negative_condition) : json(nullptr);
  j["clip_method"] = std::string(to_string(c.postprocess.method));
  j["clip_alpha"] = c.postprocess.alpha;
  j["clip_beta"] = c.postprocess.beta;
  j["quantile_q"] = c.postprocess.quantile_q;
  j["quantile_ceiling"] = c.postprocess.quantile_ceiling;
  j["clip_timing"] = std::string(to_string(c.postprocess.timing));
  j["channels"] = c.postprocess.channels;
  j["mixture"] = c.inline_mixture ? to_json(*c.inline_mixture) : json(c.mixture);
  j["batch"] = c.batch;
  j["seed"] = c.seed;
  return j;
}

MixtureModel resolve_mixture(const ExperimentConfig& config) {
  if (config.inline_mixture) return *config.inline_mixture;
  const auto presets = mixture_preset_names();
  if (std::find(presets.begin(), presets.end(), config.mixture) != presets.end()) {
    return mixture_preset(config.mixture);
  }
  std::ifstream in(config.mixture);
  if (!in) {
    throw InvalidArgument("mixture '" + config.mixture + "' is neither a preset nor a readable file");
  }
  try {
    return mixture_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse mixture file '" + config.mixture + "': " + e.what());
  }
}

NoiseSchedule resolve_schedule(const ExperimentConfig& config) {
  return build_schedule(config.schedule_kind, config.num_train_steps, config.beta_start, config.beta_end);
}

TimestepSchedule resolve_timesteps(const ExperimentConfig& config, const NoiseSchedule& schedule,
                                   const ImportanceCurve& curve) {
  switch (config.timesteps) {
    case TimestepStrategy::equidistant:
      return equidistant_schedule(schedule, config.steps);
    case TimestepStrategy::importance:
      return importance_schedule(curve, config.steps);
    case TimestepStrategy::adaptive:
      return adaptive_schedule(schedule, curve, config.steps, config.theta);
  }
  throw InvalidArgument("unknown timestep strategy");
}

EpsilonModel make_epsilon_model(const MixtureModel& model, const NoiseSchedule& schedule,
                                const ExperimentConfig& config) {
  const GuidanceConfig g = config.guidance;
  if (g.mode == GuidanceMode::none) {
    return [model, schedule](std::span<const double> x, int t) { return epsilon_prediction(model, schedule, x, t); };
  }
  const std::size_t cond = config.condition;
  model.component(cond);  // validates the label
  if (g.mode == GuidanceMode::interpolate) {
    return [model, schedule, cond, omega = g.omega](std::span<const double> x, int t) {
      auto ec = epsilon_prediction(model, schedule, x, t, cond);
      auto eu = epsilon_prediction(model, schedule, x, t);
      return guide_interpolate(ec, eu, omega);
    };
  }
  const std::optional<std::size_t> neg = config.negative_condition;
  if (neg) model.component(*neg);
  return [model, schedule, cond, neg, omega = g.omega](std::span<const double> x, int t) {
    auto ec = epsilon_prediction(model, schedule, x, t, cond);
    auto en = epsilon_prediction(model, schedule, x, t, neg);
    return guide_negative(ec, en, omega);
  };
}

MixtureModel reference_distribution(const MixtureModel& model, const ExperimentConfig& config) {
  if (config.guidance.mode == GuidanceMode::none) return model;
  return model.restrict_to(config.condition);
}

json to_json(const RunReport& r, bool include_wall_time) {
  json j;
  j["config"] = r.config_echo;
  j["metrics"] = {{"mean_error", r.mean_error},
                  {"cov_error", r.cov_error},
                  {"wasserstein1", r.wasserstein1},
                  {"saturation_fraction", r.saturation_fraction}};
  j["step_count"] = r.step_count;
  json steps = json::array();
  for (std::size_t i = 0; i < r.timesteps.steps.size(); ++i) {
    steps.push_back({{"timestep", r.timesteps.steps[i]},
                     {"provenance", std::string(to_string(r.timesteps.provenance[i]))}});
  }
  j["timesteps"] = steps;
  j["sample_mean"] = r.sample_mean;
  if (r.compounding) {
    j["compounding"] = {{"scale", r.compounding->scale},
                        {"mixing", r.compounding->mixing ? json(*r.compounding->mixing) : json(nullptr)}};
  }
  if (include_wall_time) j["wall_time"] = r.wall_time;
  return j;
}

namespace {

Batch initial_noise(std::size_t count, std::size_t dim, std::uint64_t root) {
  Batch out(count, dim);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(root, Stream::initial_noise, i));
    auto z = standard_normal(dim, rng);
    std::copy(z.begin(), z.end(), out.row(i).begin());
  }
  return out;
}

SamplerConfig sampler_config(const ExperimentConfig& config) {
  SamplerConfig s;
  s.variant = config.variant;
  s.gamma = config.gamma;
  s.postprocess = config.postprocess;
  s.postprocess_enabled = config.postprocess.method != ClipMethod::none;
  s.rng_seed = config.seed;
  return s;
}

struct Setup {
  MixtureModel model;
  NoiseSchedule schedule;
  ImportanceCurve curve;
  TimestepSchedule timesteps;
};

Setup prepare(const ExperimentConfig& config) {
  config.validate();
  auto model = resolve_mixture(config);
  if (model.dim() % config.postprocess.channels != 0) {
    throw InvalidArgument("mixture dimension " + std::to_string(model.dim()) + " is not divisible by " +
                          std::to_string(config.postprocess.channels) + " channels");
  }
  auto schedule = resolve_schedule(config);
  auto curve = compute_importance(schedule, config.epsilon);
  auto timesteps = resolve_timesteps(config, schedule, curve);
  return {std::move(model), std::move(schedule), std::move(curve), std::move(timesteps)};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
  const auto started = std::chrono::steady_clock::now();
  const Setup setup = prepare(config);
  const auto eps_model = make_epsilon_model(setup.model, setup.schedule, config);
  const auto sampler = sampler_config(config);

  const Batch initial = initial_noise(config.batch, setup.model.dim(), config.seed);
  ExperimentResult result;
  result.samples = sample_batch(sampler, setup.schedule, setup.timesteps, eps_model, initial, &setup.curve, threads);

  const MixtureModel reference = reference_distribution(setup.model, config);
  result.reference = sample_ground_truth(reference, config.batch, derive_seed(config.seed, Stream::ground_truth));

  RunReport& report = result.report;
  report.config_echo = to_json(config);
  const auto moments = moments_error(result.samples, reference);
  report.mean_error = moments.mean_error;
  report.cov_error = moments.cov_error;
  report.wasserstein1 =
      distribution_distance(result.samples, result.reference, derive_seed(config.seed, Stream::projections));
  report.saturation_fraction = saturation_fraction(result.samples.data());
  report.step_count = setup.timesteps.size();
  report.timesteps = setup.timesteps;
  report.sample_mean.assign(setup.model.dim(), 0.0);
  for (std::size_t r = 0; r < result.samples.count(); ++r) {
    auto row = result.samples.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) report.sample_mean[i] += row[i];
  }
  for (double& m : report.sample_mean) m /= static_cast<double>(result.samples.count());
  if (config.guidance.distill_omega) {
    report.compounding = compounding_scale(config.guidance.omega, *config.guidance.distill_omega);
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::string importance_csv(const ExperimentConfig& config) {
  config.validate();
  const auto schedule = resolve_schedule(config);
  const auto curve = compute_importance(schedule, config.epsilon);
  std::ostringstream out;
  out << "t,alpha_bar,snr,importance\n";
  for (int t = 0; t < schedule.num_steps(); ++t) {
    out << t << ',' << format_double(schedule.alpha_bar(t)) << ',' << format_double(snr(schedule, t)) << ','
        << format_double(curve.at(t)) << '\n';
  }
  return out.str();
}

std::string timestep_table_csv(const ExperimentConfig& config) {
  config.validate();
  const auto schedule = resolve_schedule(config);
  const auto curve = compute_importance(schedule, config.epsilon);
  const auto te = equidistant_schedule(schedule, config.steps);
  const auto ti = importance_schedule(curve, config.steps);
  const auto tas = adaptive_schedule(schedule, curve, config.steps, config.theta);
  std::ostringstream out;
  out << "slot,equidistant,importance,adaptive,adaptive_importance,adaptive_provenance\n";
  for (int i = 0; i < config.steps; ++i) {
    out << i << ',' << te.steps[i] << ',' << ti.steps[i] << ',' << tas.steps[i] << ','
        << format_double(curve.at(tas.steps[i])) << ',' << to_string(tas.provenance[i]) << '\n';
  }
  return out.str();
}

std::string trajectories_csv(const ExperimentConfig& config, std::size_t chains) {
  const Setup setup = prepare(config);
  const auto eps_model = make_epsilon_model(setup.model, setup.schedule, config);
  const auto sampler = sampler_config(config);
  chains = std::min(chains, config.batch);
  const Batch initial = initial_noise(chains, setup.model.dim(), config.seed);

  std::ostringstream out;
  out << "chain,visit,t";
  for (std::size_t i = 0; i < setup.model.dim(); ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t c = 0; c < chains; ++c) {
    SamplerConfig chain = sampler;
    chain.rng_seed = derive_seed(config.seed, Stream::sampler_noise, c);
    const auto traj = run_sampler(chain, setup.schedule, setup.timesteps, eps_model, initial.row(c), &setup.curve);
    for (std::size_t v = 0; v < traj.states.size(); ++v) {
      out << c << ',' << v << ',' << traj.states[v].first;
      for (double x : traj.states[v].second) out << ',' << format_double(x);
      out << '\n';
    }
  }
  return out.str();
}

std::string compare_csv(const std::vector<ExperimentConfig>& configs, unsigned threads) {
  if (configs.size() < 2) throw InvalidArgument("compare needs at least 2 configurations");
  const json mixture0 = to_json(configs.front())["mixture"];
  for (const auto& c : configs) {
    if (to_json(c)["mixture"] != mixture0) throw InvalidArgument("compared configurations use different mixtures");
    if (c.seed != configs.front().seed) throw InvalidArgument("compared configurations use different seeds");
  }
  std::ostringstream out;
  out << "row,timesteps,variant,steps,theta,gamma,cfg_mode,cfg_scale,clip_method,"
         "mean_error,cov_error,wasserstein1,saturation_fraction,step_count\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    const auto r = run_experiment(c, threads).report;
    out << i << ',' << to_string(c.timesteps) << ',' << to_string(c.variant) << ',' << c.steps << ','
        << format_double(c.theta) << ',' << format_double(c.gamma) << ',' << to_string(c.guidance.mode) << ','
        << format_double(c.guidance.omega) << ',' << to_string(c.postprocess.method) << ','
        << format_double(r.mean_error) << ',' << format_double(r.cov_error) << ',' << format_double(r.wasserstein1)
        << ',' << format_double(r.saturation_fraction) << ',' << r.step_count << '\n';
  }
  return out.str();
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base, std::string_view key,
                                           std::string_view values) {
  std::vector<ExperimentConfig> out;
  std::size_t start = 0;
  while (start <= values.size()) {
    std::size_t comma = values.find(',', start);
    if (comma == std::string_view::npos) comma = values.size();
    auto item = values.substr(start, comma - start);
    if (item.empty()) throw InvalidArgument("empty value in sweep over '" + std::string(key) + "'");
    ExperimentConfig c = base;
    set_field(c, key, item);
    c.validate();
    out.push_back(std::move(c));
    start = comma + 1;
  }
  return out;
}

}  // namespace adasched
