#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "adasched/error.hpp"
#include "adasched/noise_schedule.hpp"

using namespace adasched;

namespace {

// Straight-line product of (1 - beta_t), independent of NoiseSchedule.
std::vector<double> reference_alpha_bars(int T, double b0, double b1) {
  std::vector<double> out;
  double prod = 1.0;
  for (int i = 0; i < T; ++i) {
    double beta = b0 + (b1 - b0) * static_cast<double>(i) / (T - 1);
    prod *= 1.0 - beta;
    out.push_back(prod);
  }
  return out;
}

NoiseSchedule ddpm() { return build_schedule(ScheduleKind::linear, 1000, 1e-4, 0.02); }

}  // namespace

TEST(NoiseSchedule, DefaultLinearFinalAlphaBar) {
  // 40-digit reference: tests/oracle/reference_values.py
  const auto s = ddpm();
  EXPECT_NEAR(s.alpha_bar(999), 4.0358297653756833e-5, 4.0358297653756833e-5 * 1e-9);
  const auto ref = reference_alpha_bars(1000, 1e-4, 0.02);
  for (int t = 0; t < 1000; t += 37) EXPECT_NEAR(s.alpha_bar(t), ref[t], 1e-14) << "t=" << t;
}

TEST(NoiseSchedule, TwoStepProduct) {
  const auto s = build_schedule(ScheduleKind::linear, 2, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(s.alpha_bars()[0], 0.5);
  EXPECT_DOUBLE_EQ(s.alpha_bars()[1], 0.25);
}

TEST(NoiseSchedule, FirstAlphaBarIsFirstAlpha) {
  const auto s = ddpm();
  EXPECT_EQ(s.alpha_bar(0), s.alphas()[0]);
  EXPECT_DOUBLE_EQ(s.alpha_bar(0), 0.9999);
}

TEST(NoiseSchedule, InvariantsHoldForEveryKind) {
  for (auto kind : {ScheduleKind::linear, ScheduleKind::scaled_linear, ScheduleKind::cosine}) {
    for (int T : {2, 3, 50, 1000}) {
      const auto s = build_schedule(kind, T, 1e-4, 0.02);
      ASSERT_EQ(s.num_steps(), T);
      for (int t = 0; t < T; ++t) {
        EXPECT_EQ(s.alphas()[t], 1.0 - s.betas()[t]);
        EXPECT_GT(s.alpha_bar(t), 0.0);
        EXPECT_LT(s.alpha_bar(t), 1.0);
        if (t > 0) {
          EXPECT_LT(s.alpha_bar(t), s.alpha_bar(t - 1));
          EXPECT_LT(snr(s, t), snr(s, t - 1));
        }
      }
    }
  }
}

TEST(NoiseSchedule, ScaledLinearSquaresSqrtSpacing) {
  const auto s = build_schedule(ScheduleKind::scaled_linear, 5, 0.01, 0.09);
  EXPECT_DOUBLE_EQ(s.betas()[0], 0.01);
  EXPECT_DOUBLE_EQ(s.betas()[2], 0.04);
  EXPECT_NEAR(s.betas()[4], 0.09, 1e-16);
}

TEST(NoiseSchedule, CosineBetasAreCapped) {
  const auto s = build_schedule(ScheduleKind::cosine, 1000, 1e-4, 0.02);
  for (double b : s.betas()) EXPECT_LE(b, 0.999);
  EXPECT_DOUBLE_EQ(s.betas().back(), 0.999);
}

TEST(NoiseSchedule, RejectsInvalidParameters) {
  EXPECT_THROW(build_schedule(ScheduleKind::linear, 1, 1e-4, 0.02), InvalidArgument);
  EXPECT_THROW(build_schedule(ScheduleKind::linear, 10, 0.0, 0.02), InvalidArgument);
  EXPECT_THROW(build_schedule(ScheduleKind::linear, 10, 0.03, 0.02), InvalidArgument);
  EXPECT_THROW(build_schedule(ScheduleKind::linear, 10, 1e-4, 1.0), InvalidArgument);
  EXPECT_THROW(NoiseSchedule::from_betas({0.1, 1.5}), InvalidArgument);
  EXPECT_THROW(parse_schedule_kind("sigmoid"), InvalidArgument);
}

TEST(NoiseSchedule, Deterministic) {
  EXPECT_EQ(ddpm(), ddpm());
  EXPECT_EQ(ddpm().fingerprint(), ddpm().fingerprint());
  EXPECT_NE(ddpm().fingerprint(), build_schedule(ScheduleKind::linear, 1000, 1e-4, 0.021).fingerprint());
}

TEST(Snr, SimpleRatios) {
  const std::vector<double> ab = {0.8, 0.5};
  const auto s = NoiseSchedule::from_alpha_bars(ab);
  EXPECT_NEAR(snr(s, 0), 4.0, 1e-14);
  EXPECT_NEAR(snr(s, 1), 1.0, 1e-14);
}

TEST(Snr, DefaultScheduleMatchesReference) {
  EXPECT_NEAR(snr(ddpm(), 500), 0.084359549410326418, 0.084359549410326418 * 1e-9);
}

TEST(Snr, OutOfRange) {
  EXPECT_THROW(snr(ddpm(), 1000), IndexError);
  EXPECT_THROW(snr(ddpm(), -1), IndexError);
}

TEST(ForwardDiffuse, ZeroNoiseScalesSignal) {
  const auto s = ddpm();
  const std::vector<double> x0 = {1.0, -2.0, 0.5};
  const std::vector<double> zero(3, 0.0);
  const auto xt = forward_diffuse(s, x0, 400, zero);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(xt[i], std::sqrt(s.alpha_bar(400)) * x0[i]);
}

TEST(ForwardDiffuse, FullNoiseLimitReturnsNoise) {
  const std::vector<double> ab = {0.5, 1e-14};
  const auto s = NoiseSchedule::from_alpha_bars(ab);
  const std::vector<double> x0 = {3.0};
  const std::vector<double> noise = {-0.7};
  EXPECT_NEAR(forward_diffuse(s, x0, 1, noise)[0], -0.7, 1e-6);
}

TEST(ForwardDiffuse, DimensionMismatch) {
  const std::vector<double> x0 = {1.0, 2.0};
  const std::vector<double> noise = {1.0};
  EXPECT_THROW(forward_diffuse(ddpm(), x0, 0, noise), InvalidArgument);
}

TEST(ForwardDiffuse, MarginalMomentsMonteCarlo) {
  const auto s = ddpm();
  const int t = 600;
  const int draws = 100000;
  const std::vector<double> x0 = {0.8};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const std::vector<double> z = {normal(rng)};
    const double v = forward_diffuse(s, x0, t, z)[0];
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / draws;
  const double var = sumsq / draws - mean * mean;
  const double target_var = 1.0 - s.alpha_bar(t);
  const double mean_se = std::sqrt(target_var / draws);
  const double var_se = target_var * std::sqrt(2.0 / (draws - 1));
  EXPECT_NEAR(mean, std::sqrt(s.alpha_bar(t)) * x0[0], 3 * mean_se);
  EXPECT_NEAR(var, target_var, 3 * var_se);
}
