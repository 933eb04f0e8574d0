#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace adasched {

/// Values laid out as (channels, elements_per_channel), channel-major.
class ChannelTensor {
 public:
  ChannelTensor() = default;
  ChannelTensor(std::vector<double> data, std::size_t channels);

  std::size_t channels() const { return channels_; }
  std::size_t elements_per_channel() const { return channels_ == 0 ? 0 : data_.size() / channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> channel(std::size_t c);
  std::span<const double> channel(std::size_t c) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::vector<double> data_;
  std::size_t channels_ = 1;
};

inline constexpr double kDefaultBalanceAlpha = 0.5;
inline constexpr double kDefaultBalanceBeta = 0.5;
inline constexpr double kDefaultQuantile = 0.995;
inline constexpr double kDefaultQuantileCeiling = 1.0;
inline constexpr double kSaturationLevel = 0.99;

// Subtracts alpha * mean(channel) from every channel, then beta * mean of the
// channel-balanced tensor from every entry.
ChannelTensor color_balance(const ChannelTensor& x, double alpha, double beta);

// Element-wise tanh.
ChannelTensor smooth_clip(const ChannelTensor& x);

// color_balance followed by smooth_clip.
ChannelTensor exposure_correct(const ChannelTensor& x, double alpha, double beta);

// smooth_clip followed by color_balance. Kept for the order ablation only;
// the output is not guaranteed to stay inside (-1, 1).
ChannelTensor exposure_correct_clip_first(const ChannelTensor& x, double alpha, double beta);

// Dynamic thresholding baseline: s = clamp(quantile_q(|x|), 1, ceiling),
// output clip(x, -s, s) / s.
ChannelTensor quantile_clip(const ChannelTensor& x, double q, double ceiling);

/// Empirical quantile with linear interpolation between order statistics.
double linear_quantile(std::vector<double> values, double q);

double saturation_fraction(std::span<const double> values, double level = kSaturationLevel);

enum class ClipMethod { none, tanh_balance, tanh_only, quantile, tanh_balance_clip_first };

std::string_view to_string(ClipMethod method);
ClipMethod parse_clip_method(std::string_view name);

enum class ClipTiming { every_step, final_only };

std::string_view to_string(ClipTiming timing);
ClipTiming parse_clip_timing(std::string_view name);

struct PostprocessConfig {
  ClipMethod method = ClipMethod::none;
  double alpha = kDefaultBalanceAlpha;
  double beta = kDefaultBalanceBeta;
  double quantile_q = kDefaultQuantile;
  double quantile_ceiling = kDefaultQuantileCeiling;
  std::size_t channels = 1;
  ClipTiming timing = ClipTiming::every_step;

  void validate() const;
};

/// Applies the configured method to one x0 estimate in place.
void apply_postprocess(const PostprocessConfig& config, std::span<double> x0);

}  // namespace adasched
