#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace adasched {

enum class GuidanceMode { none, interpolate, negative_prompt };

std::string_view to_string(GuidanceMode mode);
GuidanceMode parse_guidance_mode(std::string_view name);

inline constexpr double kDefaultGuidanceScale = 7.5;

struct GuidanceConfig {
  GuidanceMode mode = GuidanceMode::none;
  double omega = kDefaultGuidanceScale;  // ignored when mode is none
  std::optional<double> distill_omega;

  void validate() const;
};

/// (1 + omega) * eps_cond - omega * eps_uncond. omega = 0 is pure
/// conditional sampling.
std::vector<double> guide_interpolate(std::span<const double> eps_cond, std::span<const double> eps_uncond,
                                      double omega);

/// eps_neg + omega * (eps_cond - eps_neg). Equals guide_interpolate with
/// omega - 1 when eps_neg is the unconditional estimate.
std::vector<double> guide_negative(std::span<const double> eps_cond, std::span<const double> eps_neg, double omega);

// Effective amplification when guidance with scale omega is applied on top of
// a model distilled with guidance scale distill_omega.
struct CompoundingDiagnostic {
  double scale = 0.0;            // omega * distill_omega
  std::optional<double> mixing;  // (omega - 1) / (omega * distill_omega); empty when scale == 0
};

CompoundingDiagnostic compounding_scale(double omega, double distill_omega);

}  // namespace adasched
