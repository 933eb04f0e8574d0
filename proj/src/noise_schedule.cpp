#include "adasched/noise_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "adasched/error.hpp"

namespace adasched {

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::linear:
      return "linear";
    case ScheduleKind::scaled_linear:
      return "scaled_linear";
    case ScheduleKind::cosine:
      return "cosine";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "linear") return ScheduleKind::linear;
  if (name == "scaled_linear" || name == "scaled-linear") return ScheduleKind::scaled_linear;
  if (name == "cosine") return ScheduleKind::cosine;
  throw InvalidArgument("unknown schedule kind '" + std::string(name) + "'");
}

namespace {

std::uint64_t fnv1a(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::vector<double> cosine_betas(int num_steps) {
  constexpr double offset = 0.008;
  constexpr double max_beta = 0.999;
  auto profile = [&](double u) {
    double c = std::cos((u + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
    return c * c;
  };
  std::vector<double> betas(num_steps);
  for (int i = 0; i < num_steps; ++i) {
    double u0 = static_cast<double>(i) / num_steps;
    double u1 = static_cast<double>(i + 1) / num_steps;
    betas[i] = std::min(1.0 - profile(u1) / profile(u0), max_beta);
  }
  return betas;
}

}  // namespace

NoiseSchedule::NoiseSchedule(std::vector<double> betas, ScheduleKind kind) : kind_(kind), betas_(std::move(betas)) {
  if (betas_.size() < 2) throw InvalidArgument("schedule needs at least 2 timesteps");
  alphas_.resize(betas_.size());
  alpha_bars_.resize(betas_.size());
  double product = 1.0;
  for (std::size_t t = 0; t < betas_.size(); ++t) {
    double beta = betas_[t];
    if (!(beta > 0.0 && beta < 1.0)) {
      throw InvalidArgument("beta at t=" + std::to_string(t) + " outside (0, 1)");
    }
    alphas_[t] = 1.0 - beta;
    product *= alphas_[t];
    alpha_bars_[t] = product;
  }
  if (!(alpha_bars_.back() > 0.0)) throw InvalidArgument("alpha_bar underflows to zero");
  for (std::size_t t = 1; t < alpha_bars_.size(); ++t) {
    if (!(alpha_bars_[t] < alpha_bars_[t - 1])) {
      throw InvalidArgument("alpha_bar not strictly decreasing at t=" + std::to_string(t));
    }
  }
  fingerprint_ = fnv1a(betas_) ^ static_cast<std::uint64_t>(kind_);
}

NoiseSchedule NoiseSchedule::build(ScheduleKind kind, int num_steps, double beta_start, double beta_end) {
  if (num_steps < 2) throw InvalidArgument("num_steps must be >= 2");
  if (kind == ScheduleKind::cosine) return NoiseSchedule(cosine_betas(num_steps), kind);

  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw InvalidArgument("betas must satisfy 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> betas(num_steps);
  const double denom = static_cast<double>(num_steps - 1);
  if (kind == ScheduleKind::linear) {
    for (int i = 0; i < num_steps; ++i) betas[i] = beta_start + (beta_end - beta_start) * (i / denom);
  } else {
    const double lo = std::sqrt(beta_start);
    const double hi = std::sqrt(beta_end);
    for (int i = 0; i < num_steps; ++i) {
      double r = lo + (hi - lo) * (i / denom);
      betas[i] = r * r;
    }
  }
  return NoiseSchedule(std::move(betas), kind);
}

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas, ScheduleKind kind) {
  return NoiseSchedule(std::move(betas), kind);
}

NoiseSchedule NoiseSchedule::from_alpha_bars(std::span<const double> alpha_bars) {
  std::vector<double> betas(alpha_bars.size());
  double prev = 1.0;
  for (std::size_t t = 0; t < alpha_bars.size(); ++t) {
    betas[t] = 1.0 - alpha_bars[t] / prev;
    prev = alpha_bars[t];
  }
  return NoiseSchedule(std::move(betas), ScheduleKind::linear);
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t < 0 || t >= num_steps()) {
    throw IndexError("timestep " + std::to_string(t) + " outside [0, " + std::to_string(num_steps() - 1) + "]");
  }
  return alpha_bars_[static_cast<std::size_t>(t)];
}

NoiseSchedule build_schedule(ScheduleKind kind, int num_steps, double beta_start, double beta_end) {
  return NoiseSchedule::build(kind, num_steps, beta_start, beta_end);
}

double snr(const NoiseSchedule& schedule, int t) {
  double ab = schedule.alpha_bar(t);
  return ab / (1.0 - ab);
}

std::vector<double> forward_diffuse(const NoiseSchedule& schedule, std::span<const double> x0, int t,
                                    std::span<const double> noise) {
  if (x0.size() != noise.size()) throw InvalidArgument("x0 and noise differ in dimension");
  const double ab = schedule.alpha_bar(t);
  const double signal = std::sqrt(ab);
  const double sigma = std::sqrt(1.0 - ab);
  std::vector<double> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) out[i] = signal * x0[i] + sigma * noise[i];
  return out;
}

}  // namespace adasched
