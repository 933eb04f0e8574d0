#pragma once

#include <string_view>
#include <vector>

#include "adasched/importance.hpp"
#include "adasched/noise_schedule.hpp"

namespace adasched {

// Which candidate set supplied a slot of a timestep schedule.
enum class Provenance { equidistant, importance };

std::string_view to_string(Provenance p);

/// Target timesteps in sampling order (strictly decreasing, high noise first).
struct TimestepSchedule {
  std::vector<int> steps;
  std::vector<Provenance> provenance;
  double theta = 1.0;

  int size() const { return static_cast<int>(steps.size()); }
  bool all_equidistant() const;

  bool operator==(const TimestepSchedule&) const = default;
};

/// n timesteps rounded from uniform positions over [0, T-1], starting at T-1.
TimestepSchedule equidistant_schedule(const NoiseSchedule& schedule, int n);

/// Argmax of the importance curve inside each of n contiguous equal-width
/// intervals of [0, T-1] (lowest index on ties), sorted decreasing.
TimestepSchedule importance_schedule(const ImportanceCurve& curve, int n);

/// Slot-wise merge of the two sets: slot i takes the importance candidate
/// when its own importance exceeds theta and the equidistant candidate
/// otherwise. Slot i pairs the i-th entries of both sets in sampling order.
/// Collisions are resolved by decrementing the later (smaller) timestep.
TimestepSchedule adaptive_schedule(const NoiseSchedule& schedule, const ImportanceCurve& curve, int n,
                                   double theta);

}  // namespace adasched
