#include <fstream>
#include <iostream>
#include <mutex>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "refplan/refplan.hpp"

namespace {

using nlohmann::json;
using namespace refplan;

std::vector<std::string> as_string_list(const json& v) {
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

std::vector<double> as_double_list(const json& v) {
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

// Config file carries the same keys as the CLI flags; explicit flags win.
void load_config_file(const std::string& path, std::vector<std::string>& envs,
                      std::vector<std::string>& solvers, std::vector<std::string>& heuristics,
                      std::vector<double>& epsilons, int& episodes, double& plan_time_ms,
                      long& plan_sims, std::uint64_t& seed, std::string& scenario_path,
                      std::string& out_dir, bool& render, json& params) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(f);
  if (j.contains("env")) envs = as_string_list(j["env"]);
  if (j.contains("solver")) solvers = as_string_list(j["solver"]);
  if (j.contains("heuristic")) heuristics = as_string_list(j["heuristic"]);
  if (j.contains("epsilon")) epsilons = as_double_list(j["epsilon"]);
  if (j.contains("episodes")) episodes = j["episodes"].get<int>();
  if (j.contains("plan_time_ms")) plan_time_ms = j["plan_time_ms"].get<double>();
  if (j.contains("plan_sims")) plan_sims = j["plan_sims"].get<long>();
  if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  if (j.contains("scenario")) scenario_path = j["scenario"].get<std::string>();
  if (j.contains("out")) out_dir = j["out"].get<std::string>();
  if (j.contains("render")) render = j["render"].get<bool>();
  if (j.contains("params")) params = j["params"];
}

int run_command(const std::vector<std::string>& env_names,
                const std::vector<std::string>& solver_names,
                const std::vector<std::string>& heuristic_names,
                const std::vector<double>& epsilons, int episodes, double plan_time_ms,
                long plan_sims, std::uint64_t seed, const std::string& scenario_path,
                const std::string& out_dir, bool render, bool quiet, const json& params) {
  bench::BenchConfig cfg;
  for (const auto& name : env_names) cfg.envs.push_back(envs::parse_env_id(name));
  for (const auto& name : solver_names) cfg.solvers.push_back(bench::parse_solver_kind(name));
  cfg.heuristics.clear();
  for (const auto& name : heuristic_names)
    cfg.heuristics.push_back(subgoals::parse_heuristic(name));
  cfg.epsilons = epsilons;
  cfg.episodes = episodes;
  cfg.master_seed = seed;
  if (plan_sims > 0) cfg.plan_sims = plan_sims;
  else if (plan_time_ms > 0) cfg.plan_time_ms = plan_time_ms;
  if (!scenario_path.empty()) cfg.scenario = envs::load_scenario(scenario_path);
  cfg.out_dir = out_dir;
  cfg.render = render;
  cfg.overrides = params;

  // Validate every cell's configuration before running anything.
  for (const auto& cell : bench::expand_cells(cfg)) bench::cell_solver_config(cfg, cell);

  std::mutex io_mu;
  auto progress = [&](const bench::BenchCell& cell, const bench::EpisodeRecord& rec) {
    if (quiet) return;
    std::lock_guard<std::mutex> lock(io_mu);
    std::cerr << envs::env_name(cell.env) << "/" << bench::solver_kind_name(cell.solver) << "/"
              << subgoals::heuristic_name(cell.heuristic) << " eps=" << cell.epsilon
              << " seed=" << rec.seed << " success=" << rec.success
              << " reward=" << rec.total_reward << " steps=" << rec.steps
              << " wall_ms=" << static_cast<long>(rec.wall_ms) << "\n";
  };

  const auto result = bench::run_benchmark(cfg, progress);
  bench::write_artifacts(cfg, result);
  std::cout << bench::summary_json(result).dump(2) << "\n";
  std::cerr << "artifacts written to " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reference-policy guided online POMDP planning benchmarks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run benchmark episodes and write artifacts");
  std::vector<std::string> env_names;
  std::vector<std::string> solver_names;
  std::vector<std::string> heuristic_names;
  std::vector<double> epsilons;
  std::string config_path;
  std::string scenario_path;
  std::string out_dir = "bench_out";
  int episodes = 30;
  double plan_time_ms = 0.0;
  long plan_sims = 0;
  std::uint64_t seed = 1;
  bool render = false;
  bool quiet = false;

  run->add_option("--config", config_path, "JSON config file with the same keys as the flags");
  run->add_option("--env", env_names, "environment: lightdark|maze2d|random3d|dronetag");
  run->add_option("--solver", solver_names, "solver: nop|ref-basic|pomcp|r-pomcp|b-vamp");
  run->add_option("--heuristic", heuristic_names, "subgoal heuristic: uniform|distance|entropy");
  run->add_option("--epsilon", epsilons, "epsilon-greedy subgoal exploration rate");
  run->add_option("--episodes", episodes, "episodes per cell");
  run->add_option("--plan-time-ms", plan_time_ms, "wall-clock planning budget per cycle");
  run->add_option("--plan-sims", plan_sims, "simulation-count planning budget per cycle");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--scenario", scenario_path, "scenario JSON file overriding the default map");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--render", render, "write one trajectory SVG per episode");
  run->add_flag("--quiet", quiet, "suppress per-episode progress lines");

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> cfg_envs, cfg_solvers, cfg_heuristics;
    std::vector<double> cfg_epsilons;
    json params = json::object();
    if (!config_path.empty()) {
      load_config_file(config_path, cfg_envs, cfg_solvers, cfg_heuristics, cfg_epsilons, episodes,
                       plan_time_ms, plan_sims, seed, scenario_path, out_dir, render, params);
    }
    if (!env_names.empty()) cfg_envs = env_names;
    if (!solver_names.empty()) cfg_solvers = solver_names;
    if (!heuristic_names.empty()) cfg_heuristics = heuristic_names;
    if (!epsilons.empty()) cfg_epsilons = epsilons;
    if (cfg_envs.empty()) throw std::invalid_argument("no --env given");
    if (cfg_solvers.empty()) throw std::invalid_argument("no --solver given");
    if (cfg_heuristics.empty()) cfg_heuristics = {"uniform"};
    if (cfg_epsilons.empty()) cfg_epsilons = {0.0};
    return run_command(cfg_envs, cfg_solvers, cfg_heuristics, cfg_epsilons, episodes, plan_time_ms,
                       plan_sims, seed, scenario_path, out_dir, render, quiet, params);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
