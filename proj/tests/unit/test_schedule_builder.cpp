#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "adasched/error.hpp"
#include "adasched/importance.hpp"
#include "adasched/noise_schedule.hpp"
#include "adasched/schedule_builder.hpp"

using namespace adasched;

namespace {

NoiseSchedule ddpm() { return build_schedule(ScheduleKind::linear, 1000, 1e-4, 0.02); }

void expect_strictly_decreasing(const TimestepSchedule& s, int T) {
  ASSERT_FALSE(s.steps.empty());
  EXPECT_EQ(s.steps.size(), s.provenance.size());
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    EXPECT_GE(s.steps[i], 0);
    EXPECT_LT(s.steps[i], T);
    if (i > 0) EXPECT_LT(s.steps[i], s.steps[i - 1]);
  }
}

}  // namespace

TEST(Equidistant, SmallExamples) {
  const auto s10 = build_schedule(ScheduleKind::linear, 10, 1e-4, 0.02);
  EXPECT_EQ(equidistant_schedule(s10, 2).steps, (std::vector<int>{9, 0}));
  EXPECT_EQ(equidistant_schedule(s10, 4).steps, (std::vector<int>{9, 6, 3, 0}));
  EXPECT_EQ(equidistant_schedule(s10, 10).steps, (std::vector<int>{9, 8, 7, 6, 5, 4, 3, 2, 1, 0}));
}

TEST(Equidistant, DefaultEightSteps) {
  const auto s = equidistant_schedule(ddpm(), 8);
  EXPECT_EQ(s.steps, (std::vector<int>{999, 856, 714, 571, 428, 285, 143, 0}));
  EXPECT_TRUE(s.all_equidistant());
}

TEST(ImportanceSchedule, DefaultEightSteps) {
  const auto curve = compute_importance(ddpm());
  const auto s = importance_schedule(curve, 8);
  EXPECT_EQ(s.steps, (std::vector<int>{875, 750, 625, 500, 375, 349, 249, 124}));
  for (auto p : s.provenance) EXPECT_EQ(p, Provenance::importance);
}

TEST(AdaptiveSchedule, DefaultEightSteps) {
  const auto s = ddpm();
  const auto curve = compute_importance(s);
  const auto as = adaptive_schedule(s, curve, 8, 0.7);
  EXPECT_EQ(as.steps, (std::vector<int>{999, 856, 625, 500, 375, 349, 249, 0}));
  using P = Provenance;
  EXPECT_EQ(as.provenance, (std::vector<P>{P::equidistant, P::equidistant, P::importance, P::importance,
                                           P::importance, P::importance, P::importance, P::equidistant}));
  EXPECT_DOUBLE_EQ(as.theta, 0.7);
}

TEST(AdaptiveSchedule, ThetaOneIsEquidistant) {
  const auto s = ddpm();
  const auto curve = compute_importance(s);
  for (int n = 2; n <= 16; ++n) {
    const auto as = adaptive_schedule(s, curve, n, 1.0);
    const auto eq = equidistant_schedule(s, n);
    EXPECT_EQ(as.steps, eq.steps) << "n=" << n;
    EXPECT_EQ(as.provenance, eq.provenance) << "n=" << n;
  }
}

TEST(AdaptiveSchedule, ThetaZeroTakesEveryPositiveImportanceCandidate) {
  const auto s = ddpm();
  const auto curve = compute_importance(s);
  const auto as = adaptive_schedule(s, curve, 8, 0.0);
  EXPECT_EQ(as.steps, importance_schedule(curve, 8).steps);
}

TEST(AdaptiveSchedule, ImportanceSlotsGrowAsThetaFalls) {
  const auto s = ddpm();
  const auto curve = compute_importance(s);
  int previous = -1;
  for (double theta : {1.0, 0.9, 0.8, 0.7, 0.5, 0.3, 0.1, 0.0}) {
    const auto as = adaptive_schedule(s, curve, 8, theta);
    int count = 0;
    for (auto p : as.provenance) count += p == Provenance::importance;
    EXPECT_GE(count, previous);
    previous = count;
  }
}

TEST(AdaptiveSchedule, RandomCurvesYieldValidSchedules) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> steps(20, 400);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = steps(rng);
    const auto s = build_schedule(ScheduleKind::linear, T, 1e-4, 0.02);
    auto curve = compute_importance(s);
    for (auto& v : curve.values) v = u(rng);
    const int n = std::uniform_int_distribution<int>(2, std::min(T, 32))(rng);
    const auto as = adaptive_schedule(s, curve, n, u(rng));
    ASSERT_EQ(as.size(), n);
    expect_strictly_decreasing(as, T);
  }
}

TEST(AdaptiveSchedule, RejectsInvalidArguments) {
  const auto s = ddpm();
  const auto curve = compute_importance(s);
  EXPECT_THROW(adaptive_schedule(s, curve, 8, 1.5), InvalidArgument);
  EXPECT_THROW(adaptive_schedule(s, curve, 8, -0.1), InvalidArgument);
  EXPECT_THROW(adaptive_schedule(s, curve, 1, 0.7), InvalidArgument);
  EXPECT_THROW(adaptive_schedule(s, curve, 1001, 0.7), InvalidArgument);
  const auto other = build_schedule(ScheduleKind::cosine, 1000, 1e-4, 0.02);
  EXPECT_THROW(adaptive_schedule(other, curve, 8, 0.7), InvalidArgument);
  EXPECT_THROW(equidistant_schedule(s, 1), InvalidArgument);
}
