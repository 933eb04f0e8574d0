// adasched: timestep schedules, few-step sampling and exposure experiments on
// an analytic Gaussian-mixture diffusion model.
//
//   adasched schedule [flags] [--out DIR]
//   adasched sample   [flags] [--out report.json] [--trajectories traj.csv]
//   adasched compare  [flags] (--config a.json --config b.json | --sweep key=v1,v2,...) [--out matrix.csv]
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adasched/adasched.hpp"

namespace {

using adasched::ExperimentConfig;

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

// Flag name -> config key. Every flag maps onto set_field.
const std::vector<std::pair<std::string, std::string>> kConfigFlags = {
    {"--schedule-kind", "schedule_kind"},
    {"--num-train-steps", "num_train_steps"},
    {"--beta-start", "beta_start"},
    {"--beta-end", "beta_end"},
    {"--epsilon", "epsilon"},
    {"--timesteps", "timesteps"},
    {"--steps,--n", "steps"},
    {"--theta", "theta"},
    {"--variant", "variant"},
    {"--gamma", "gamma"},
    {"--cfg-mode", "cfg_mode"},
    {"--cfg-scale", "cfg_scale"},
    {"--distill-omega", "distill_omega"},
    {"--condition", "condition"},
    {"--negative-condition", "negative_condition"},
    {"--clip-method", "clip_method"},
    {"--clip-alpha", "clip_alpha"},
    {"--clip-beta", "clip_beta"},
    {"--quantile-q", "quantile_q"},
    {"--quantile-ceiling", "quantile_ceiling"},
    {"--clip-timing", "clip_timing"},
    {"--channels", "channels"},
    {"--mixture", "mixture"},
    {"--batch", "batch"},
    {"--seed", "seed"},
};

struct CommonOptions {
  std::map<std::string, std::string> overrides;
  std::vector<std::string> config_files;
  std::string out;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  for (const auto& [flag, key] : kConfigFlags) {
    cmd->add_option_function<std::string>(
        flag, [&opts, key = key](const std::string& v) { opts.overrides[key] = v; }, "sets " + key);
  }
  cmd->add_option("--config", opts.config_files, "JSON experiment config (flags override its values)");
  cmd->add_option("--out", opts.out, "output path");
  cmd->add_option("--threads", opts.threads, "worker threads for batch sampling (0 = all cores)");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw adasched::InvalidArgument("cannot open config file '" + path + "'");
  try {
    return adasched::config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw adasched::InvalidArgument("cannot parse config file '" + path + "': " + e.what());
  }
}

ExperimentConfig with_overrides(ExperimentConfig config, const CommonOptions& opts) {
  for (const auto& [key, value] : opts.overrides) adasched::set_field(config, key, value);
  config.validate();
  return config;
}

ExperimentConfig single_config(const CommonOptions& opts) {
  if (opts.config_files.size() > 1) throw adasched::InvalidArgument("this command takes at most one --config");
  ExperimentConfig base = opts.config_files.empty() ? ExperimentConfig{} : load_config(opts.config_files.front());
  return with_overrides(std::move(base), opts);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw adasched::InvalidArgument("cannot write '" + path + "'");
  out << text;
  if (!out) throw adasched::InvalidArgument("failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive timestep scheduling and few-step sampling on analytic Gaussian mixtures"};
  app.require_subcommand(1);

  CommonOptions schedule_opts;
  auto* schedule_cmd = app.add_subcommand("schedule", "importance curve and T_E / T_I / T_as timestep table");
  add_common(schedule_cmd, schedule_opts);

  CommonOptions sample_opts;
  std::string trajectories_path;
  std::size_t trajectory_chains = 16;
  bool omit_wall_time = false;
  auto* sample_cmd = app.add_subcommand("sample", "run batch sampling and emit a JSON report");
  add_common(sample_cmd, sample_opts);
  sample_cmd->add_option("--trajectories", trajectories_path, "CSV of per-chain trajectories");
  sample_cmd->add_option("--trajectory-chains", trajectory_chains, "chains written to --trajectories");
  sample_cmd->add_flag("--omit-wall-time", omit_wall_time, "leave wall_time out of the report");

  CommonOptions compare_opts;
  std::string sweep;
  auto* compare_cmd = app.add_subcommand("compare", "metrics matrix over several configurations");
  add_common(compare_cmd, compare_opts);
  compare_cmd->add_option("--sweep", sweep, "key=v1,v2,... applied to the base configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*schedule_cmd) {
      const auto config = single_config(schedule_opts);
      const auto curve = adasched::importance_csv(config);
      const auto table = adasched::timestep_table_csv(config);
      if (schedule_opts.out.empty()) {
        std::cout << curve << '\n' << table;
      } else {
        std::filesystem::create_directories(schedule_opts.out);
        const std::filesystem::path dir(schedule_opts.out);
        write_text((dir / "importance.csv").string(), curve);
        write_text((dir / "timesteps.csv").string(), table);
      }
    } else if (*sample_cmd) {
      const auto config = single_config(sample_opts);
      const auto result = adasched::run_experiment(config, sample_opts.threads);
      write_text(sample_opts.out, adasched::to_json(result.report, !omit_wall_time).dump(2) + "\n");
      if (!trajectories_path.empty()) {
        write_text(trajectories_path, adasched::trajectories_csv(config, trajectory_chains));
      }
    } else if (*compare_cmd) {
      std::vector<ExperimentConfig> configs;
      if (!sweep.empty()) {
        const auto eq = sweep.find('=');
        if (eq == std::string::npos) throw adasched::InvalidArgument("--sweep expects key=v1,v2,...");
        const auto base = single_config(compare_opts);
        configs = adasched::expand_sweep(base, sweep.substr(0, eq), sweep.substr(eq + 1));
      } else {
        for (const auto& path : compare_opts.config_files) {
          configs.push_back(with_overrides(load_config(path), compare_opts));
        }
      }
      write_text(compare_opts.out, adasched::compare_csv(configs, compare_opts.threads));
    }
  } catch (const adasched::NumericalError& e) {
    std::cerr << "adasched: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "adasched: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
