#include "adasched/schedule_builder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adasched/error.hpp"

namespace adasched {

std::string_view to_string(Provenance p) {
  return p == Provenance::equidistant ? "equidistant" : "importance";
}

bool TimestepSchedule::all_equidistant() const {
  return std::all_of(provenance.begin(), provenance.end(),
                     [](Provenance p) { return p == Provenance::equidistant; });
}

namespace {

void check_count(int n, int num_train_steps) {
  if (n < 2 || n > num_train_steps) {
    throw InvalidArgument("step count " + std::to_string(n) + " outside [2, " + std::to_string(num_train_steps) +
                          "]");
  }
}

std::vector<int> equidistant_steps(int num_train_steps, int n) {
  std::vector<int> steps(n);
  const double last = static_cast<double>(num_train_steps - 1);
  for (int i = 0; i < n; ++i) {
    double pos = last * static_cast<double>(n - 1 - i) / static_cast<double>(n - 1);
    steps[i] = static_cast<int>(std::lround(pos));
  }
  return steps;
}

// Interval k (ascending in t) covers [k*T/n, (k+1)*T/n).
std::vector<int> interval_argmax(const ImportanceCurve& curve, int n) {
  const long total = curve.size();
  std::vector<int> picks(n);
  for (int k = 0; k < n; ++k) {
    int lo = static_cast<int>(k * total / n);
    int hi = static_cast<int>((k + 1) * total / n);
    int best = lo;
    for (int t = lo + 1; t < hi; ++t) {
      if (curve.values[t] > curve.values[best]) best = t;
    }
    picks[k] = best;
  }
  std::sort(picks.begin(), picks.end(), std::greater<>());
  return picks;
}

void make_strictly_decreasing(std::vector<int>& steps) {
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i] >= steps[i - 1]) steps[i] = steps[i - 1] - 1;
  }
  // Only reachable when decrements run past zero near the end of the list.
  if (!steps.empty() && steps.back() < 0) {
    steps.back() = 0;
    for (std::size_t i = steps.size() - 1; i-- > 0;) {
      if (steps[i] <= steps[i + 1]) steps[i] = steps[i + 1] + 1;
    }
  }
}

}  // namespace

TimestepSchedule equidistant_schedule(const NoiseSchedule& schedule, int n) {
  check_count(n, schedule.num_steps());
  TimestepSchedule out;
  out.steps = equidistant_steps(schedule.num_steps(), n);
  out.provenance.assign(n, Provenance::equidistant);
  out.theta = 1.0;
  return out;
}

TimestepSchedule importance_schedule(const ImportanceCurve& curve, int n) {
  check_count(n, curve.size());
  TimestepSchedule out;
  out.steps = interval_argmax(curve, n);
  out.provenance.assign(n, Provenance::importance);
  out.theta = 0.0;
  return out;
}

TimestepSchedule adaptive_schedule(const NoiseSchedule& schedule, const ImportanceCurve& curve, int n,
                                   double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in [0, 1]");
  if (!curve.matches(schedule)) throw InvalidArgument("importance curve was not computed from this schedule");
  check_count(n, schedule.num_steps());

  const auto uniform = equidistant_steps(schedule.num_steps(), n);
  const auto important = interval_argmax(curve, n);

  TimestepSchedule out;
  out.theta = theta;
  out.steps.resize(n);
  out.provenance.resize(n);
  for (int i = 0; i < n; ++i) {
    if (curve.values[important[i]] > theta) {
      out.steps[i] = important[i];
      out.provenance[i] = Provenance::importance;
    } else {
      out.steps[i] = uniform[i];
      out.provenance[i] = Provenance::equidistant;
    }
  }
  make_strictly_decreasing(out.steps);
  return out;
}

}  // namespace adasched
