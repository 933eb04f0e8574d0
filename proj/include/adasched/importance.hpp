#pragma once

#include <cstdint>
#include <vector>

#include "adasched/noise_schedule.hpp"

namespace adasched {

inline constexpr double kDefaultImportanceEpsilon = 1e-8;

/// Per-timestep importance: the inverse magnitude of the discrete gradient of
/// ln(SNR_t + epsilon), normalized so that the largest value is exactly 1.
/// Values are high where the log-SNR changes slowly.
struct ImportanceCurve {
  std::vector<double> values;
  double epsilon = kDefaultImportanceEpsilon;
  std::uint64_t source_schedule_id = 0;
  int argmax = 0;  // first index attaining 1.0

  int size() const { return static_cast<int>(values.size()); }
  double at(int t) const;
  bool matches(const NoiseSchedule& schedule) const {
    return source_schedule_id == schedule.fingerprint() && size() == schedule.num_steps();
  }
};

// The gradient is a central difference of the log-SNR sequence at interior
// points and a one-sided difference at both ends. A zero gradient contributes
// an inverse of 1/epsilon. Requires num_steps >= 3.
ImportanceCurve compute_importance(const NoiseSchedule& schedule, double epsilon = kDefaultImportanceEpsilon);

double importance_at(const ImportanceCurve& curve, int t);

}  // namespace adasched
