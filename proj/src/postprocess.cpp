#include "adasched/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adasched/error.hpp"

namespace adasched {

ChannelTensor::ChannelTensor(std::vector<double> data, std::size_t channels)
    : data_(std::move(data)), channels_(channels) {
  if (channels_ == 0) throw InvalidArgument("channel count must be >= 1");
  if (data_.size() % channels_ != 0) {
    throw InvalidArgument("tensor length " + std::to_string(data_.size()) + " is not divisible by " +
                          std::to_string(channels_) + " channels");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw NumericalError("non-finite entry in channel tensor");
  }
}

std::span<double> ChannelTensor::channel(std::size_t c) {
  const std::size_t n = elements_per_channel();
  return {data_.data() + c * n, n};
}

std::span<const double> ChannelTensor::channel(std::size_t c) const {
  const std::size_t n = elements_per_channel();
  return {data_.data() + c * n, n};
}

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

ChannelTensor color_balance(const ChannelTensor& x, double alpha, double beta) {
  if (x.empty()) throw InvalidArgument("color balance of an empty tensor");
  ChannelTensor out = x;
  for (std::size_t c = 0; c < out.channels(); ++c) {
    auto ch = out.channel(c);
    const double shift = alpha * mean_of(ch);
    for (double& v : ch) v -= shift;
  }
  const double shift = beta * mean_of(out.data());
  for (double& v : out.data()) v -= shift;
  return out;
}

ChannelTensor smooth_clip(const ChannelTensor& x) {
  ChannelTensor out = x;
  for (double& v : out.data()) v = std::tanh(v);
  return out;
}

ChannelTensor exposure_correct(const ChannelTensor& x, double alpha, double beta) {
  return smooth_clip(color_balance(x, alpha, beta));
}

ChannelTensor exposure_correct_clip_first(const ChannelTensor& x, double alpha, double beta) {
  return color_balance(smooth_clip(x), alpha, beta);
}

double linear_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ChannelTensor quantile_clip(const ChannelTensor& x, double q, double ceiling) {
  if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in (0, 1]");
  if (!(ceiling >= 1.0)) throw InvalidArgument("quantile ceiling must be >= 1");
  if (x.empty()) return x;
  std::vector<double> magnitudes(x.size());
  std::transform(x.data().begin(), x.data().end(), magnitudes.begin(), [](double v) { return std::abs(v); });
  const double s = std::clamp(linear_quantile(std::move(magnitudes), q), 1.0, ceiling);
  ChannelTensor out = x;
  for (double& v : out.data()) v = std::clamp(v, -s, s) / s;
  return out;
}

double saturation_fraction(std::span<const double> values, double level) {
  if (values.empty()) return 0.0;
  const auto hits = std::count_if(values.begin(), values.end(), [level](double v) { return std::abs(v) > level; });
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

std::string_view to_string(ClipMethod method) {
  switch (method) {
    case ClipMethod::none:
      return "none";
    case ClipMethod::tanh_balance:
      return "tanh-balance";
    case ClipMethod::tanh_only:
      return "tanh-only";
    case ClipMethod::quantile:
      return "quantile";
    case ClipMethod::tanh_balance_clip_first:
      return "tanh-balance-clip-first";
  }
  return "unknown";
}

ClipMethod parse_clip_method(std::string_view name) {
  if (name == "none") return ClipMethod::none;
  if (name == "tanh-balance") return ClipMethod::tanh_balance;
  if (name == "tanh-only") return ClipMethod::tanh_only;
  if (name == "quantile") return ClipMethod::quantile;
  if (name == "tanh-balance-clip-first") return ClipMethod::tanh_balance_clip_first;
  throw InvalidArgument("unknown clip method '" + std::string(name) + "'");
}

std::string_view to_string(ClipTiming timing) {
  return timing == ClipTiming::every_step ? "every-step" : "final-only";
}

ClipTiming parse_clip_timing(std::string_view name) {
  if (name == "every-step") return ClipTiming::every_step;
  if (name == "final-only") return ClipTiming::final_only;
  throw InvalidArgument("unknown clip timing '" + std::string(name) + "'");
}

void PostprocessConfig::validate() const {
  if (channels == 0) throw InvalidArgument("channel count must be >= 1");
  if (!(quantile_q > 0.0 && quantile_q <= 1.0)) throw InvalidArgument("quantile level must lie in (0, 1]");
  if (!(quantile_ceiling >= 1.0)) throw InvalidArgument("quantile ceiling must be >= 1");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw InvalidArgument("balance coefficients must be finite");
}

void apply_postprocess(const PostprocessConfig& config, std::span<double> x0) {
  if (config.method == ClipMethod::none) return;
  ChannelTensor tensor({x0.begin(), x0.end()}, config.channels);
  ChannelTensor result;
  switch (config.method) {
    case ClipMethod::tanh_balance:
      result = exposure_correct(tensor, config.alpha, config.beta);
      break;
    case ClipMethod::tanh_only:
      result = smooth_clip(tensor);
      break;
    case ClipMethod::quantile:
      result = quantile_clip(tensor, config.quantile_q, config.quantile_ceiling);
      break;
    case ClipMethod::tanh_balance_clip_first:
      result = exposure_correct_clip_first(tensor, config.alpha, config.beta);
      break;
    case ClipMethod::none:
      return;
  }
  std::copy(result.data().begin(), result.data().end(), x0.begin());
}

}  // namespace adasched
