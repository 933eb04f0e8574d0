#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "adasched/error.hpp"
#include "adasched/mixture.hpp"
#include "adasched/noise_schedule.hpp"

using namespace adasched;

namespace {

NoiseSchedule ddpm() { return build_schedule(ScheduleKind::linear, 1000, 1e-4, 0.02); }

MixtureModel random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kdist(1, 4);
  std::uniform_int_distribution<int> ddist(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = kdist(rng);
  const int d = ddist(rng);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& v : w) total += (v = 0.2 + u(rng));
  std::vector<MixtureComponent> comps;
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    MixtureComponent c;
    c.weight = i + 1 == k ? 1.0 - acc : w[i] / total;
    acc += c.weight;
    for (int j = 0; j < d; ++j) c.mean.push_back(2.0 * u(rng) - 1.0);
    c.variance = 0.01 + 0.3 * u(rng);
    comps.push_back(c);
  }
  return MixtureModel(comps);
}

}  // namespace

TEST(Mixture, ValidatesComponents) {
  EXPECT_THROW(MixtureModel(std::vector<MixtureComponent>{}), InvalidArgument);
  EXPECT_THROW(MixtureModel({{0.5, {0.0}, 1.0}}), InvalidArgument);
  EXPECT_THROW(MixtureModel({{1.0, {0.0}, 0.0}}), InvalidArgument);
  EXPECT_THROW(MixtureModel({{0.5, {0.0}, 1.0}, {0.5, {0.0, 1.0}, 1.0}}), InvalidArgument);
  EXPECT_NO_THROW(MixtureModel({{0.5, {0.0}, 1.0}, {0.5, {1.0}, 1.0}}));
}

TEST(Mixture, MomentsOfBimodal) {
  const auto m = mixture_preset("bimodal-1d");
  EXPECT_NEAR(m.mean()[0], 0.0, 1e-15);
  EXPECT_NEAR(m.covariance()[0], 0.04 + 0.36, 1e-15);
}

TEST(Mixture, DiffusedParams) {
  const auto m = mixture_preset("bimodal-1d");
  const auto d = diffused_params(m, 0.25);
  EXPECT_DOUBLE_EQ(d.component(0).mean[0], -0.3);
  EXPECT_DOUBLE_EQ(d.component(1).variance, 0.25 * 0.04 + 0.75);
  EXPECT_EQ(diffused_params(m, 1.0).component(1).mean[0], 0.6);
  EXPECT_THROW(diffused_params(m, 0.0), InvalidArgument);
  EXPECT_THROW(diffused_params(m, 1.5), InvalidArgument);
}

TEST(Mixture, SingleGaussianScoreAndEpsilon) {
  const MixtureModel m({{1.0, {0.3, -0.2}, 0.5}});
  const std::vector<double> x = {1.0, 1.0};
  const auto s = m.score(x);
  EXPECT_NEAR(s[0], -(1.0 - 0.3) / 0.5, 1e-14);
  EXPECT_NEAR(s[1], -(1.0 + 0.2) / 0.5, 1e-14);

  const auto sch = ddpm();
  const int t = 300;
  const double ab = sch.alpha_bar(t);
  const double var = ab * 0.5 + 1.0 - ab;
  const auto eps = epsilon_prediction(m, sch, x, t);
  EXPECT_NEAR(eps[0], std::sqrt(1.0 - ab) * (1.0 - std::sqrt(ab) * 0.3) / var, 1e-13);
}

TEST(Mixture, ScoreMatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_int_distribution<int> tdist(0, 999);
  const auto sch = ddpm();
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto model = random_model(rng);
    const int t = tdist(rng);
    const auto diffused = diffused_params(model, sch, t);
    std::vector<double> x(model.dim());
    for (auto& v : x) v = u(rng);
    const auto analytic = score(model, sch, x, t);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
      auto xp = x;
      auto xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (diffused.log_density(xp) - diffused.log_density(xm)) / (2.0 * h);
      const double rel = std::abs(fd - analytic[j]) / std::max(1.0, std::abs(analytic[j]));
      worst = std::max(worst, rel);
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Mixture, ScoreIsResponsibilityWeightedAverage) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = random_model(rng);
    std::vector<double> x(model.dim());
    for (auto& v : x) v = u(rng);
    const auto r = model.responsibilities(x);
    const auto s = model.score(x);
    double rsum = 0.0;
    for (double v : r) rsum += v;
    EXPECT_NEAR(rsum, 1.0, 1e-12);
    for (std::size_t j = 0; j < x.size(); ++j) {
      double expected = 0.0;
      for (std::size_t k = 0; k < model.size(); ++k) {
        const auto& c = model.component(k);
        expected += r[k] * (c.mean[j] - x[j]) / c.variance;
      }
      EXPECT_NEAR(s[j], expected, 1e-10);
    }
  }
}

TEST(Mixture, StableFarFromEveryMode) {
  const auto m = mixture_preset("grid-2d");
  const std::vector<double> x = {40.0, -35.0};
  const auto s = m.score(x);
  for (double v : s) EXPECT_TRUE(std::isfinite(v));
  EXPECT_TRUE(std::isfinite(m.log_density(x)));
  const std::vector<double> bad = {std::nan(""), 0.0};
  EXPECT_THROW(m.score(bad), NumericalError);
}

TEST(Mixture, ConditionRestrictsToComponent) {
  const auto m = mixture_preset("bimodal-1d");
  const auto sch = ddpm();
  const std::vector<double> x = {0.2};
  const auto cond = epsilon_prediction(m, sch, x, 100, 1);
  const auto direct = epsilon_prediction(m.restrict_to(1), sch, x, 100);
  EXPECT_EQ(cond, direct);
  EXPECT_THROW(epsilon_prediction(m, sch, x, 100, 5), IndexError);
}

TEST(Mixture, ConditionalDifferenceVanishesAtConditionedMode) {
  // Near the positive mode the full mixture is dominated by that component,
  // so conditioning on it changes nothing. Between the modes the
  // responsibilities swing, and the difference changes fastest there.
  const auto m = mixture_preset("bimodal-1d");
  const auto sch = ddpm();
  const int t = 50;
  const double mode = std::sqrt(sch.alpha_bar(t)) * 0.6;
  auto diff = [&](double x) {
    const std::vector<double> v = {x};
    return epsilon_prediction(m, sch, v, t, 1)[0] - epsilon_prediction(m, sch, v, t)[0];
  };
  EXPECT_LT(std::abs(diff(mode)), 1e-3);
  double steepest_at = 0.0;
  double steepest = 0.0;
  for (double x = -1.0; x <= 1.0; x += 0.01) {
    const double slope = std::abs(diff(x + 0.005) - diff(x - 0.005));
    if (slope > steepest) {
      steepest = slope;
      steepest_at = x;
    }
  }
  EXPECT_GT(steepest_at, -mode);
  EXPECT_LT(steepest_at, mode);
}

TEST(Mixture, GroundTruthSampling) {
  const auto m = mixture_preset("skewed-2d");
  const auto a = sample_ground_truth(m, 20000, 4);
  const auto b = sample_ground_truth(m, 20000, 4);
  EXPECT_EQ(a.data(), b.data());
  const auto mean = m.mean();
  for (std::size_t j = 0; j < 2; ++j) {
    const auto col = a.column(j);
    double s = 0.0;
    for (double v : col) s += v;
    const double se = std::sqrt(m.covariance()[j * 3] / 20000.0);
    EXPECT_NEAR(s / 20000.0, mean[j], 4 * se);
  }
}

TEST(Mixture, PresetsAndJson) {
  for (const auto& name : mixture_preset_names()) {
    const auto m = mixture_preset(name);
    const auto back = mixture_from_json(to_json(m));
    ASSERT_EQ(back.size(), m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      EXPECT_EQ(back.component(k).mean, m.component(k).mean);
      EXPECT_EQ(back.component(k).weight, m.component(k).weight);
      EXPECT_EQ(back.component(k).variance, m.component(k).variance);
    }
  }
  EXPECT_EQ(mixture_preset("separated-rgb").dim(), 12u);
  EXPECT_THROW(mixture_preset("nope"), InvalidArgument);
  const auto bare = mixture_from_json(nlohmann::json::parse(R"([{"weight":1,"mean":[0.5],"variance":0.1}])"));
  EXPECT_EQ(bare.dim(), 1u);
}
