#include "adasched/guidance.hpp"

#include <cmath>
#include <string>

#include "adasched/error.hpp"

namespace adasched {

std::string_view to_string(GuidanceMode mode) {
  switch (mode) {
    case GuidanceMode::none:
      return "none";
    case GuidanceMode::interpolate:
      return "interpolate";
    case GuidanceMode::negative_prompt:
      return "negative_prompt";
  }
  return "unknown";
}

GuidanceMode parse_guidance_mode(std::string_view name) {
  if (name == "none") return GuidanceMode::none;
  if (name == "interpolate") return GuidanceMode::interpolate;
  if (name == "negative_prompt" || name == "negative-prompt" || name == "negative") {
    return GuidanceMode::negative_prompt;
  }
  throw InvalidArgument("unknown guidance mode '" + std::string(name) + "'");
}

void GuidanceConfig::validate() const {
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw InvalidArgument("guidance scale must be finite and >= 0");
  if (distill_omega && !(*distill_omega >= 0.0)) throw InvalidArgument("distill omega must be >= 0");
}

namespace {

void check_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("guidance inputs differ in dimension (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
}

}  // namespace

std::vector<double> guide_interpolate(std::span<const double> eps_cond, std::span<const double> eps_uncond,
                                      double omega) {
  check_same_size(eps_cond, eps_uncond);
  std::vector<double> out(eps_cond.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 + omega) * eps_cond[i] - omega * eps_uncond[i];
  return out;
}

std::vector<double> guide_negative(std::span<const double> eps_cond, std::span<const double> eps_neg, double omega) {
  check_same_size(eps_cond, eps_neg);
  std::vector<double> out(eps_cond.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = eps_neg[i] + omega * (eps_cond[i] - eps_neg[i]);
  return out;
}

CompoundingDiagnostic compounding_scale(double omega, double distill_omega) {
  if (!(omega >= 0.0) || !(distill_omega >= 0.0)) throw InvalidArgument("guidance scales must be >= 0");
  CompoundingDiagnostic d;
  d.scale = omega * distill_omega;
  if (d.scale != 0.0) d.mixing = (omega - 1.0) / d.scale;
  return d;
}

}  // namespace adasched
