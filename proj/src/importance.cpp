#include "adasched/importance.hpp"

#include <cmath>
#include <string>

#include "adasched/error.hpp"

namespace adasched {

double ImportanceCurve::at(int t) const {
  if (t < 0 || t >= size()) {
    throw IndexError("importance index " + std::to_string(t) + " outside [0, " + std::to_string(size() - 1) + "]");
  }
  return values[static_cast<std::size_t>(t)];
}

ImportanceCurve compute_importance(const NoiseSchedule& schedule, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("importance epsilon must be positive");
  const int n = schedule.num_steps();
  if (n < 3) throw InvalidArgument("importance needs at least 3 timesteps");

  const auto alpha_bars = schedule.alpha_bars();
  std::vector<double> log_snr(n);
  for (int t = 0; t < n; ++t) {
    double ab = alpha_bars[t];
    log_snr[t] = std::log(ab / (1.0 - ab) + epsilon);
  }

  std::vector<double> inverse(n);
  for (int t = 0; t < n; ++t) {
    double grad;
    if (t == 0) {
      grad = log_snr[1] - log_snr[0];
    } else if (t == n - 1) {
      grad = log_snr[n - 1] - log_snr[n - 2];
    } else {
      grad = (log_snr[t + 1] - log_snr[t - 1]) / 2.0;
    }
    inverse[t] = grad == 0.0 ? 1.0 / epsilon : 1.0 / std::abs(grad);
  }

  int argmax = 0;
  for (int t = 1; t < n; ++t) {
    if (inverse[t] > inverse[argmax]) argmax = t;
  }
  const double peak = inverse[argmax];

  ImportanceCurve curve;
  curve.values.resize(n);
  for (int t = 0; t < n; ++t) curve.values[t] = inverse[t] / peak;
  curve.epsilon = epsilon;
  curve.source_schedule_id = schedule.fingerprint();
  curve.argmax = argmax;
  return curve;
}

double importance_at(const ImportanceCurve& curve, int t) { return curve.at(t); }

}  // namespace adasched
