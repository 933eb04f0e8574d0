#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "adasched/adasched.hpp"

namespace py = pybind11;
using namespace adasched;

namespace {

Batch to_batch(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw InvalidArgument("expected a 2-D array of shape (count, dim)");
  Batch b(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), b.data().begin());
  return b;
}

py::array_t<double> to_array(const Batch& b) {
  py::array_t<double> out({b.count(), b.dim()});
  std::copy(b.data().begin(), b.data().end(), out.mutable_data());
  return out;
}

std::vector<std::string> provenance_names(const TimestepSchedule& s) {
  std::vector<std::string> out;
  for (auto p : s.provenance) out.emplace_back(to_string(p));
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  return config_from_json(nlohmann::json::parse(text.empty() ? "{}" : text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive timestep scheduling and few-step sampling on analytic Gaussian mixtures";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<NoiseSchedule>(m, "NoiseSchedule")
      .def_property_readonly("num_steps", &NoiseSchedule::num_steps)
      .def_property_readonly("kind", [](const NoiseSchedule& s) { return std::string(to_string(s.kind())); })
      .def_property_readonly("betas", [](const NoiseSchedule& s) { return std::vector<double>(s.betas().begin(), s.betas().end()); })
      .def_property_readonly("alpha_bars", [](const NoiseSchedule& s) {
        return std::vector<double>(s.alpha_bars().begin(), s.alpha_bars().end());
      })
      .def("alpha_bar", &NoiseSchedule::alpha_bar, py::arg("t"))
      .def_property_readonly("fingerprint", &NoiseSchedule::fingerprint);

  m.def(
      "build_schedule",
      [](const std::string& kind, int num_steps, double beta_start, double beta_end) {
        return build_schedule(parse_schedule_kind(kind), num_steps, beta_start, beta_end);
      },
      py::arg("kind") = "linear", py::arg("num_steps") = kDefaultTrainSteps,
      py::arg("beta_start") = kDefaultBetaStart, py::arg("beta_end") = kDefaultBetaEnd);
  m.def("snr", &snr, py::arg("schedule"), py::arg("t"));

  py::class_<ImportanceCurve>(m, "ImportanceCurve")
      .def_readonly("values", &ImportanceCurve::values)
      .def_readonly("epsilon", &ImportanceCurve::epsilon)
      .def_readonly("argmax", &ImportanceCurve::argmax)
      .def("at", &ImportanceCurve::at, py::arg("t"))
      .def("__len__", &ImportanceCurve::size);
  m.def("compute_importance", &compute_importance, py::arg("schedule"),
        py::arg("epsilon") = kDefaultImportanceEpsilon);

  py::class_<TimestepSchedule>(m, "TimestepSchedule")
      .def_readonly("steps", &TimestepSchedule::steps)
      .def_property_readonly("provenance", &provenance_names)
      .def_readonly("theta", &TimestepSchedule::theta)
      .def("__len__", &TimestepSchedule::size)
      .def("__eq__", [](const TimestepSchedule& a, const TimestepSchedule& b) { return a == b; });
  m.def("equidistant_schedule", &equidistant_schedule, py::arg("schedule"), py::arg("n"));
  m.def("importance_schedule", &importance_schedule, py::arg("curve"), py::arg("n"));
  m.def("adaptive_schedule", &adaptive_schedule, py::arg("schedule"), py::arg("curve"), py::arg("n"),
        py::arg("theta") = 0.7);

  m.def(
      "guide_interpolate",
      [](const std::vector<double>& c, const std::vector<double>& u, double omega) { return guide_interpolate(c, u, omega); },
      py::arg("eps_cond"), py::arg("eps_uncond"), py::arg("omega"));
  m.def(
      "guide_negative",
      [](const std::vector<double>& c, const std::vector<double>& n, double omega) { return guide_negative(c, n, omega); },
      py::arg("eps_cond"), py::arg("eps_neg"), py::arg("omega"));
  m.def(
      "compounding_scale",
      [](double omega, double distill_omega) {
        const auto d = compounding_scale(omega, distill_omega);
        return py::make_tuple(d.scale, d.mixing ? py::cast(*d.mixing) : py::none());
      },
      py::arg("omega"), py::arg("distill_omega"));

  py::class_<MixtureModel>(m, "MixtureModel")
      .def_property_readonly("dim", &MixtureModel::dim)
      .def("__len__", &MixtureModel::size)
      .def("mean", &MixtureModel::mean)
      .def("covariance", &MixtureModel::covariance)
      .def("log_density", [](const MixtureModel& mm, const std::vector<double>& x) { return mm.log_density(x); })
      .def("score", [](const MixtureModel& mm, const std::vector<double>& x) { return mm.score(x); })
      .def("to_json", [](const MixtureModel& mm) { return to_json(mm).dump(); });
  m.def("mixture_preset", [](const std::string& name) { return mixture_preset(name); }, py::arg("name"));
  m.def("mixture_preset_names", &mixture_preset_names);
  m.def(
      "mixture_from_json", [](const std::string& text) { return mixture_from_json(nlohmann::json::parse(text)); },
      py::arg("text"));
  m.def(
      "epsilon_prediction",
      [](const MixtureModel& mm, const NoiseSchedule& s, const std::vector<double>& x, int t,
         std::optional<std::size_t> condition) { return epsilon_prediction(mm, s, x, t, condition); },
      py::arg("model"), py::arg("schedule"), py::arg("x"), py::arg("t"), py::arg("condition") = py::none());
  m.def(
      "sample_ground_truth",
      [](const MixtureModel& mm, std::size_t count, std::uint64_t seed) { return to_array(sample_ground_truth(mm, count, seed)); },
      py::arg("model"), py::arg("count"), py::arg("seed") = 0);

  m.def(
      "color_balance",
      [](const std::vector<double>& x, std::size_t channels, double alpha, double beta) {
        return color_balance(ChannelTensor(x, channels), alpha, beta).data();
      },
      py::arg("x"), py::arg("channels") = 1, py::arg("alpha") = kDefaultBalanceAlpha,
      py::arg("beta") = kDefaultBalanceBeta);
  m.def(
      "exposure_correct",
      [](const std::vector<double>& x, std::size_t channels, double alpha, double beta) {
        return exposure_correct(ChannelTensor(x, channels), alpha, beta).data();
      },
      py::arg("x"), py::arg("channels") = 1, py::arg("alpha") = kDefaultBalanceAlpha,
      py::arg("beta") = kDefaultBalanceBeta);
  m.def(
      "quantile_clip",
      [](const std::vector<double>& x, std::size_t channels, double q, double ceiling) {
        return quantile_clip(ChannelTensor(x, channels), q, ceiling).data();
      },
      py::arg("x"), py::arg("channels") = 1, py::arg("q") = kDefaultQuantile,
      py::arg("ceiling") = kDefaultQuantileCeiling);
  m.def(
      "saturation_fraction", [](const std::vector<double>& x, double level) { return saturation_fraction(x, level); },
      py::arg("x"), py::arg("level") = kSaturationLevel);

  m.def(
      "wasserstein_1d", [](std::vector<double> a, std::vector<double> b) { return wasserstein_1d_unsorted(a, b); },
      py::arg("a"), py::arg("b"));
  m.def(
      "sliced_wasserstein",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b, int directions,
         std::uint64_t seed) { return sliced_wasserstein(to_batch(a), to_batch(b), directions, seed); },
      py::arg("a"), py::arg("b"), py::arg("directions") = kDefaultSliceDirections, py::arg("seed") = 0);

  m.def(
      "normalize_config", [](const std::string& text) { return to_json(parse_config(text)).dump(); },
      py::arg("config_json"));
  m.def(
      "run_experiment",
      [](const std::string& text, unsigned threads, bool include_wall_time) {
        const auto config = parse_config(text);
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(config, threads);
        }
        return py::make_tuple(to_json(result.report, include_wall_time).dump(), to_array(result.samples));
      },
      py::arg("config_json"), py::arg("threads") = 0, py::arg("include_wall_time") = true);
  m.def(
      "importance_csv", [](const std::string& text) { return importance_csv(parse_config(text)); },
      py::arg("config_json"));
  m.def(
      "timestep_table_csv", [](const std::string& text) { return timestep_table_csv(parse_config(text)); },
      py::arg("config_json"));
}
