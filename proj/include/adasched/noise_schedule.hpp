#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adasched {

enum class ScheduleKind { linear, scaled_linear, cosine };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Discrete variance-preserving forward schedule over timesteps 0..T-1.
///
/// alpha_bars[t] is the cumulative product of alphas[0..t], so alpha_bars[0]
/// equals alphas[0] and the sequence is strictly decreasing inside (0, 1).
/// Immutable once built.
class NoiseSchedule {
 public:
  /// Builds a schedule of `num_steps` betas.
  ///
  /// linear spaces beta uniformly in [beta_start, beta_end]; scaled_linear
  /// spaces sqrt(beta) uniformly and squares; cosine ignores the beta range
  /// and follows the squared-cosine alpha-bar profile with betas capped at
  /// 0.999.
  static NoiseSchedule build(ScheduleKind kind, int num_steps, double beta_start, double beta_end);

  /// Schedule from explicit betas, each in (0, 1).
  static NoiseSchedule from_betas(std::vector<double> betas, ScheduleKind kind = ScheduleKind::linear);

  /// Schedule whose cumulative products follow the given strictly decreasing
  /// alpha-bar sequence in (0, 1).
  static NoiseSchedule from_alpha_bars(std::span<const double> alpha_bars);

  int num_steps() const { return static_cast<int>(betas_.size()); }
  ScheduleKind kind() const { return kind_; }

  std::span<const double> betas() const { return betas_; }
  std::span<const double> alphas() const { return alphas_; }
  std::span<const double> alpha_bars() const { return alpha_bars_; }

  // Range-checked; throws IndexError.
  double alpha_bar(int t) const;

  // Content hash of the betas. Importance curves record it so that a curve
  // can be matched to the schedule it was computed from.
  std::uint64_t fingerprint() const { return fingerprint_; }

  bool operator==(const NoiseSchedule& other) const = default;

 private:
  NoiseSchedule(std::vector<double> betas, ScheduleKind kind);

  ScheduleKind kind_ = ScheduleKind::linear;
  std::vector<double> betas_;
  std::vector<double> alphas_;
  std::vector<double> alpha_bars_;
  std::uint64_t fingerprint_ = 0;
};

inline constexpr int kDefaultTrainSteps = 1000;
inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;

NoiseSchedule build_schedule(ScheduleKind kind, int num_steps, double beta_start, double beta_end);

/// Signal-to-noise ratio alpha_bar / (1 - alpha_bar) at timestep t.
double snr(const NoiseSchedule& schedule, int t);

/// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * noise.
std::vector<double> forward_diffuse(const NoiseSchedule& schedule, std::span<const double> x0, int t,
                                    std::span<const double> noise);

}  // namespace adasched
