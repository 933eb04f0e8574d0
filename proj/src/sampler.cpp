#include "adasched/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "adasched/error.hpp"
#include "adasched/rng.hpp"

namespace adasched {

std::string_view to_string(SamplerVariant variant) {
  switch (variant) {
    case SamplerVariant::plain:
      return "plain";
    case SamplerVariant::gamma:
      return "gamma";
    case SamplerVariant::gamma_i:
      return "gamma_i";
  }
  return "unknown";
}

SamplerVariant parse_sampler_variant(std::string_view name) {
  if (name == "plain") return SamplerVariant::plain;
  if (name == "gamma") return SamplerVariant::gamma;
  if (name == "gamma_i" || name == "gamma-i") return SamplerVariant::gamma_i;
  throw InvalidArgument("unknown sampler variant '" + std::string(name) + "'");
}

void SamplerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0, 1)");
  if (postprocess_enabled) postprocess.validate();
}

namespace {

double alpha_bar_or_clean(const NoiseSchedule& schedule, int t) {
  return t == kCleanStep ? 1.0 : schedule.alpha_bar(t);
}

void require_finite(std::span<const double> v, const char* what, int t) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError(std::string("non-finite ") + what + " at timestep " + std::to_string(t));
  }
}

int round_target(double scale, int t_next) {
  return std::max(0, static_cast<int>(std::lround(scale * static_cast<double>(t_next))));
}

}  // namespace

std::vector<double> denoise_step(const EpsilonModel& eps_model, const NoiseSchedule& schedule,
                                 std::span<const double> x, int t_from, int t_to, const X0Transform& on_x0) {
  if (t_to == t_from) return {x.begin(), x.end()};
  if (t_from == kCleanStep || (t_to != kCleanStep && t_to > t_from)) {
    throw InvalidArgument("denoise_step needs t_to < t_from (got " + std::to_string(t_from) + " -> " +
                          std::to_string(t_to) + ")");
  }
  const double ab_from = schedule.alpha_bar(t_from);
  const double ab_to = alpha_bar_or_clean(schedule, t_to);

  const auto eps = eps_model(x, t_from);
  if (eps.size() != x.size()) throw InvalidArgument("epsilon model returned wrong dimension");
  require_finite(eps, "epsilon prediction", t_from);

  const double sigma_from = std::sqrt(1.0 - ab_from);
  const double signal_from = std::sqrt(ab_from);
  std::vector<double> x0(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x0[i] = (x[i] - sigma_from * eps[i]) / signal_from;
  if (on_x0) on_x0(x0);
  require_finite(x0, "x0 estimate", t_from);
  if (t_to == kCleanStep) return x0;

  const double signal_to = std::sqrt(ab_to);
  const double sigma_to = std::sqrt(1.0 - ab_to);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = signal_to * x0[i] + sigma_to * eps[i];
  return out;
}

std::vector<double> noisify(const NoiseSchedule& schedule, std::span<const double> x, int t_from, int t_to,
                            std::span<const double> noise) {
  if (x.size() != noise.size()) throw InvalidArgument("state and noise differ in dimension");
  if (t_to == t_from) return {x.begin(), x.end()};
  if (t_to == kCleanStep || (t_from != kCleanStep && t_to < t_from)) {
    throw InvalidArgument("noisify needs t_to > t_from (got " + std::to_string(t_from) + " -> " +
                          std::to_string(t_to) + ")");
  }
  const double ratio = schedule.alpha_bar(t_to) / alpha_bar_or_clean(schedule, t_from);
  const double keep = std::sqrt(ratio);
  const double add = std::sqrt(1.0 - ratio);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = keep * x[i] + add * noise[i];
  return out;
}

SampleTrajectory run_sampler(const SamplerConfig& config, const NoiseSchedule& schedule,
                             const TimestepSchedule& timesteps, const EpsilonModel& eps_model,
                             std::span<const double> initial, const ImportanceCurve* curve) {
  config.validate();
  if (timesteps.steps.empty()) throw InvalidArgument("empty timestep schedule");
  if (timesteps.provenance.size() != timesteps.steps.size()) {
    throw InvalidArgument("timestep schedule has mismatched provenance");
  }
  for (std::size_t i = 0; i < timesteps.steps.size(); ++i) {
    int t = timesteps.steps[i];
    if (t < 0 || t >= schedule.num_steps()) throw IndexError("timestep " + std::to_string(t) + " outside schedule");
    if (i > 0 && t >= timesteps.steps[i - 1]) throw InvalidArgument("timesteps must be strictly decreasing");
  }
  if (config.variant == SamplerVariant::gamma_i) {
    if (curve == nullptr) throw InvalidArgument("gamma_i sampler needs an importance curve");
    if (!curve->matches(schedule)) throw InvalidArgument("importance curve does not belong to this schedule");
  }
  require_finite(initial, "initial state", timesteps.steps.front());

  X0Transform on_x0;
  X0Transform on_final;
  if (config.postprocess_enabled && config.postprocess.method != ClipMethod::none) {
    const PostprocessConfig pp = config.postprocess;
    on_final = [pp](std::span<double> x0) { apply_postprocess(pp, x0); };
    if (pp.timing == ClipTiming::every_step) on_x0 = on_final;
  }

  Rng rng(config.rng_seed);
  SampleTrajectory traj;
  std::vector<double> x(initial.begin(), initial.end());
  traj.states.emplace_back(timesteps.steps.front(), x);

  const auto& steps = timesteps.steps;
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    const int t_cur = steps[i];
    const int t_next = steps[i + 1];

    int target = t_next;
    if (config.variant == SamplerVariant::gamma ||
        (config.variant == SamplerVariant::gamma_i && timesteps.provenance[i + 1] == Provenance::equidistant)) {
      target = round_target(1.0 - config.gamma, t_next);
    } else if (config.variant == SamplerVariant::gamma_i) {
      target = round_target(curve->at(t_next), t_next);
    }

    x = denoise_step(eps_model, schedule, x, t_cur, target, on_x0);
    ++traj.model_evaluations;
    traj.states.emplace_back(target, x);
    if (target != t_next) {
      const auto noise = standard_normal(x.size(), rng);
      x = noisify(schedule, x, target, t_next, noise);
      traj.states.emplace_back(t_next, x);
    }
  }

  x = denoise_step(eps_model, schedule, x, steps.back(), kCleanStep, on_x0);
  ++traj.model_evaluations;
  if (on_final && !on_x0) on_final(x);
  traj.states.emplace_back(kCleanStep, x);
  traj.final = std::move(x);
  return traj;
}

Batch sample_batch(const SamplerConfig& config, const NoiseSchedule& schedule, const TimestepSchedule& timesteps,
                   const EpsilonModel& eps_model, const Batch& initial, const ImportanceCurve* curve,
                   unsigned threads) {
  Batch out(initial.count(), initial.dim());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, initial.count())));

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end; ++i) {
        SamplerConfig chain = config;
        chain.rng_seed = derive_seed(config.rng_seed, Stream::sampler_noise, i);
        auto traj = run_sampler(chain, schedule, timesteps, eps_model, initial.row(i), curve);
        std::copy(traj.final.begin(), traj.final.end(), out.row(i).begin());
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (threads <= 1) {
    work(0, initial.count());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (initial.count() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      std::size_t begin = w * chunk;
      std::size_t end = std::min(initial.count(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace adasched
