#include "adasched/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "adasched/error.hpp"
#include "adasched/rng.hpp"

namespace adasched {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericalError("non-finite input to mixture oracle");
  }
}

}  // namespace

MixtureModel::MixtureModel(std::vector<MixtureComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("mixture needs at least one component");
  dim_ = components_.front().mean.size();
  if (dim_ == 0) throw InvalidArgument("mixture dimension must be >= 1");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean.size() != dim_) throw InvalidArgument("mixture components differ in dimension");
    if (!(c.weight >= 0.0 && c.weight <= 1.0)) throw InvalidArgument("component weight outside [0, 1]");
    if (!(c.variance > 0.0) || !std::isfinite(c.variance)) throw InvalidArgument("component variance must be > 0");
    for (double m : c.mean) {
      if (!std::isfinite(m)) throw InvalidArgument("component mean must be finite");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("component weights must sum to 1");
}

const MixtureComponent& MixtureModel::component(std::size_t k) const {
  if (k >= components_.size()) {
    throw IndexError("unknown condition label " + std::to_string(k) + " (mixture has " +
                     std::to_string(components_.size()) + " components)");
  }
  return components_[k];
}

MixtureModel MixtureModel::restrict_to(std::size_t k) const {
  MixtureComponent c = component(k);
  c.weight = 1.0;
  return MixtureModel({std::move(c)});
}

std::vector<double> MixtureModel::mean() const {
  std::vector<double> m(dim_, 0.0);
  for (const auto& c : components_) {
    for (std::size_t i = 0; i < dim_; ++i) m[i] += c.weight * c.mean[i];
  }
  return m;
}

std::vector<double> MixtureModel::covariance() const {
  const auto mu = mean();
  std::vector<double> cov(dim_ * dim_, 0.0);
  for (const auto& c : components_) {
    for (std::size_t i = 0; i < dim_; ++i) {
      cov[i * dim_ + i] += c.weight * c.variance;
      for (std::size_t j = 0; j < dim_; ++j) cov[i * dim_ + j] += c.weight * c.mean[i] * c.mean[j];
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) cov[i * dim_ + j] -= mu[i] * mu[j];
  }
  return cov;
}

// log(w_k) + log N(x; m_k, v_k I) for every component.
std::vector<double> MixtureModel::component_log_terms(std::span<const double> x) const {
  if (x.size() != dim_) throw InvalidArgument("point dimension does not match mixture");
  check_finite(x);
  const double d = static_cast<double>(dim_);
  std::vector<double> terms(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    if (c.weight == 0.0) {
      terms[k] = kNegInf;
      continue;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      double diff = x[i] - c.mean[i];
      sq += diff * diff;
    }
    terms[k] = std::log(c.weight) - 0.5 * d * std::log(2.0 * std::numbers::pi * c.variance) - 0.5 * sq / c.variance;
  }
  return terms;
}

double MixtureModel::log_density(std::span<const double> x) const {
  const auto terms = component_log_terms(x);
  const double peak = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return peak + std::log(sum);
}

std::vector<double> MixtureModel::responsibilities(std::span<const double> x) const {
  auto terms = component_log_terms(x);
  const double peak = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double& t : terms) {
    t = std::exp(t - peak);
    sum += t;
  }
  for (double& t : terms) t /= sum;
  return terms;
}

std::vector<double> MixtureModel::score(std::span<const double> x) const {
  const auto resp = responsibilities(x);
  std::vector<double> out(dim_, 0.0);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    if (resp[k] == 0.0) continue;
    const auto& c = components_[k];
    for (std::size_t i = 0; i < dim_; ++i) out[i] += resp[k] * (c.mean[i] - x[i]) / c.variance;
  }
  return out;
}

MixtureModel diffused_params(const MixtureModel& model, double alpha_bar) {
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) throw InvalidArgument("alpha_bar must lie in (0, 1]");
  const double signal = std::sqrt(alpha_bar);
  std::vector<MixtureComponent> out = model.components();
  for (auto& c : out) {
    for (double& m : c.mean) m *= signal;
    c.variance = alpha_bar * c.variance + (1.0 - alpha_bar);
  }
  return MixtureModel(std::move(out));
}

MixtureModel diffused_params(const MixtureModel& model, const NoiseSchedule& schedule, int t) {
  return diffused_params(model, schedule.alpha_bar(t));
}

std::vector<double> score(const MixtureModel& model, const NoiseSchedule& schedule, std::span<const double> x, int t) {
  return diffused_params(model, schedule, t).score(x);
}

std::vector<double> epsilon_prediction(const MixtureModel& model, const NoiseSchedule& schedule,
                                       std::span<const double> x, int t, std::optional<std::size_t> condition) {
  const double ab = schedule.alpha_bar(t);
  const MixtureModel source = condition ? model.restrict_to(*condition) : model;
  auto s = diffused_params(source, ab).score(x);
  const double sigma = std::sqrt(1.0 - ab);
  for (double& v : s) v *= -sigma;
  return s;
}

Batch sample_ground_truth(const MixtureModel& model, std::size_t count, std::uint64_t rng_seed) {
  if (count == 0) throw InvalidArgument("sample count must be >= 1");
  Rng rng(rng_seed);
  std::vector<double> weights;
  for (const auto& c : model.components()) weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);

  Batch out(count, model.dim());
  for (std::size_t n = 0; n < count; ++n) {
    const auto& c = model.components()[pick(rng)];
    const double sd = std::sqrt(c.variance);
    auto row = out.row(n);
    for (std::size_t i = 0; i < model.dim(); ++i) row[i] = c.mean[i] + sd * normal(rng);
  }
  return out;
}

std::vector<std::string> mixture_preset_names() { return {"bimodal-1d", "grid-2d", "skewed-2d", "separated-rgb"}; }

MixtureModel mixture_preset(std::string_view name) {
  if (name == "bimodal-1d") {
    return MixtureModel({{0.5, {-0.6}, 0.04}, {0.5, {0.6}, 0.04}});
  }
  if (name == "grid-2d") {
    std::vector<MixtureComponent> comps;
    for (double a : {-0.6, 0.0, 0.6}) {
      for (double b : {-0.6, 0.0, 0.6}) comps.push_back({1.0 / 9.0, {a, b}, 0.01});
    }
    // 9 * (1/9) is not exactly 1 in binary.
    comps.back().weight = 1.0 - 8.0 / 9.0;
    return MixtureModel(std::move(comps));
  }
  if (name == "skewed-2d") {
    return MixtureModel({{0.7, {0.5, -0.3}, 0.02}, {0.2, {-0.4, 0.5}, 0.05}, {0.1, {-0.5, -0.6}, 0.01}});
  }
  if (name == "separated-rgb") {
    // Three channels of four elements each; the two components are far apart
    // relative to their spread.
    std::vector<double> bright(12, 0.5);
    std::vector<double> dark(12, -0.5);
    return MixtureModel({{0.5, bright, 0.01}, {0.5, dark, 0.01}});
  }
  throw InvalidArgument("unknown mixture preset '" + std::string(name) + "'");
}

MixtureModel mixture_from_json(const nlohmann::json& j) {
  const auto& list = j.contains("components") ? j.at("components") : j;
  if (!list.is_array()) throw InvalidArgument("mixture must be a list of components");
  std::vector<MixtureComponent> comps;
  try {
    for (const auto& c : list) {
      MixtureComponent mc;
      mc.weight = c.at("weight").get<double>();
      mc.mean = c.at("mean").get<std::vector<double>>();
      mc.variance = c.at("variance").get<double>();
      comps.push_back(std::move(mc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed mixture: ") + e.what());
  }
  return MixtureModel(std::move(comps));
}

nlohmann::json to_json(const MixtureModel& model) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : model.components()) {
    list.push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
  }
  return {{"components", list}};
}

}  // namespace adasched
