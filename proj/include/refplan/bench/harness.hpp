#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "refplan/bench/episode.hpp"
#include "refplan/bench/svg.hpp"

namespace refplan::bench {

struct BenchCell {
  envs::EnvId env;
  SolverKind solver;
  subgoals::HeuristicMode heuristic = subgoals::HeuristicMode::uniform;
  double epsilon = 0.0;
};

struct BenchConfig {
  std::vector<envs::EnvId> envs;
  std::vector<SolverKind> solvers;
  std::vector<subgoals::HeuristicMode> heuristics = {subgoals::HeuristicMode::uniform};
  std::vector<double> epsilons = {0.0};
  int episodes = 30;
  std::uint64_t master_seed = 1;
  std::optional<double> plan_time_ms;  // overrides the env preset budget
  std::optional<long> plan_sims;       // simulation-count budget (deterministic)
  std::optional<envs::Scenario> scenario;
  nlohmann::json overrides;  // solver parameter overrides from --config
  bool render = false;
  std::string out_dir = "bench_out";
};

struct BenchResult {
  std::vector<BenchCell> cells;
  std::vector<std::vector<EpisodeRecord>> records;  // [cell][episode]
  double total_wall_ms = 0.0;
};

namespace detail {

inline bool solver_uses_subgoal_heuristic(SolverKind kind) {
  return kind == SolverKind::nop || kind == SolverKind::rpomcp;
}

inline void apply_overrides(SolverConfig& cfg, const nlohmann::json& overrides) {
  if (!overrides.is_object()) return;
  for (const auto& [key, value] : overrides.items()) {
    if (key == "gamma") cfg.params.gamma = value.get<double>();
    else if (key == "eta") cfg.params.eta = value.get<double>();
    else if (key == "max_depth") cfg.params.max_depth = value.get<int>();
    else if (key == "particle_count") cfg.params.particle_count = value.get<int>();
    else if (key == "obs_resolution") cfg.params.obs_resolution = value.get<double>();
    else if (key == "max_macro_len") cfg.params.max_macro_len = value.get<int>();
    else if (key == "sbmp_retry_cap") cfg.params.sbmp_retry_cap = value.get<int>();
    else if (key == "sample_root_action") cfg.params.sample_root_action = value.get<bool>();
    else if (key == "replan_every_step") cfg.params.replan_every_step = value.get<bool>();
    else if (key == "reuse_subtree") cfg.params.reuse_subtree = value.get<bool>();
    else if (key == "ucb_c") cfg.ucb_c = value.get<double>();
    else if (key == "rollout_depth") cfg.rollout_depth = value.get<int>();
    else if (key == "menu_size") cfg.menu_size = value.get<int>();
    else throw std::invalid_argument("unknown config override: " + key);
  }
}

inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline int worker_count() {
  if (const char* env = std::getenv("BENCH_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace detail

inline SolverConfig cell_solver_config(const BenchConfig& cfg, const BenchCell& cell) {
  SolverConfig sc;
  sc.kind = cell.solver;
  sc.heuristic = cell.heuristic;
  sc.epsilon = cell.epsilon;
  sc.params = envs::solver_defaults(cell.env);
  if (cfg.plan_sims) {
    sc.budget = Budget::sims(*cfg.plan_sims);
  } else if (cfg.plan_time_ms) {
    sc.budget = Budget::wall(*cfg.plan_time_ms);
  } else {
    sc.budget = Budget::wall(static_cast<double>(sc.params.planning_budget_ms));
  }
  detail::apply_overrides(sc, cfg.overrides);
  sc.params.validate();
  return sc;
}

// Expands the env/solver/heuristic/epsilon cross product. Subgoal heuristics
// and epsilon only apply to solvers that sample subgoals; other solvers get a
// single cell each.
inline std::vector<BenchCell> expand_cells(const BenchConfig& cfg) {
  std::vector<BenchCell> cells;
  for (const auto env : cfg.envs) {
    for (const auto solver : cfg.solvers) {
      if (detail::solver_uses_subgoal_heuristic(solver)) {
        for (const auto h : cfg.heuristics)
          for (const double eps : cfg.epsilons) cells.push_back({env, solver, h, eps});
      } else {
        cells.push_back({env, solver, subgoals::HeuristicMode::uniform, 0.0});
      }
    }
  }
  return cells;
}

// Runs every episode of every cell. Episode seeds depend only on the master
// seed and the cell/episode indices, and all artifacts are written from the
// collected results in index order, so the output is identical no matter how
// many workers run; the worker pool honors BENCH_WORKERS.
inline BenchResult run_benchmark(const BenchConfig& cfg,
                                 const std::function<void(const BenchCell&, const EpisodeRecord&)>&
                                     progress = nullptr) {
  BenchResult result;
  result.cells = expand_cells(cfg);
  result.records.assign(result.cells.size(), {});
  for (auto& r : result.records) r.resize(static_cast<std::size_t>(cfg.episodes));

  struct Job {
    std::size_t cell;
    int episode;
  };
  std::vector<Job> jobs;
  jobs.reserve(result.cells.size() * static_cast<std::size_t>(cfg.episodes));
  for (std::size_t c = 0; c < result.cells.size(); ++c)
    for (int e = 0; e < cfg.episodes; ++e) jobs.push_back({c, e});

  const auto t0 = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mu;

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size() || failed.load()) return;
      const Job job = jobs[i];
      const BenchCell& cell = result.cells[job.cell];
      try {
        const SolverConfig sc = cell_solver_config(cfg, cell);
        const std::uint64_t seed =
            derive_seed(cfg.master_seed, static_cast<std::uint64_t>(job.cell),
                        static_cast<std::uint64_t>(job.episode));
        EpisodeRecord rec = run_episode(cell.env, cfg.scenario, sc, envs::episode_limits(cell.env),
                                        seed, cfg.render);
        if (progress) progress(cell, rec);
        result.records[job.cell][static_cast<std::size_t>(job.episode)] = std::move(rec);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mu);
        failure = e.what();
        failed.store(true);
        return;
      }
    }
  };

  const int workers = std::min<int>(detail::worker_count(), static_cast<int>(jobs.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("benchmark episode failed: " + failure);
  result.total_wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

inline std::string trace_name(const EpisodeRecord& rec) {
  return "traj_" + std::to_string(rec.seed) + ".svg";
}

// episodes.csv: one row per episode, deterministic columns only (wall times
// go to timings.json), in cell-then-episode order.
inline void write_episode_csv(const BenchResult& result, std::ostream& out) {
  out << "env,solver,heuristic,epsilon,seed,success,total_reward,primitive_steps,"
         "planning_cycles,sbmp_failure_rate,starved,trace\n";
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& cell = result.cells[c];
    for (const auto& rec : result.records[c]) {
      out << envs::env_name(cell.env) << ',' << solver_kind_name(cell.solver) << ','
          << subgoals::heuristic_name(cell.heuristic) << ',' << detail::fmt_short(cell.epsilon)
          << ',' << rec.seed << ',' << (rec.success ? 1 : 0) << ','
          << detail::fmt_full(rec.total_reward) << ',' << rec.steps << ',' << rec.cycles << ','
          << detail::fmt_full(rec.sampler_failure_rate()) << ',' << rec.starved << ','
          << (rec.trajectory.empty() ? std::string() : trace_name(rec)) << '\n';
    }
  }
}

struct CellSummary {
  double success_rate = 0.0;
  double mean_reward = 0.0;
  double stderr_reward = 0.0;
  double mean_steps = 0.0;
  double mean_cycles = 0.0;
  double mean_sampler_failure_rate = 0.0;
  int starved_cycles = 0;
  int episodes = 0;
};

inline CellSummary summarize_cell(const std::vector<EpisodeRecord>& records) {
  CellSummary s;
  s.episodes = static_cast<int>(records.size());
  if (records.empty()) return s;
  const double n = static_cast<double>(records.size());
  double sum = 0.0;
  for (const auto& r : records) {
    s.success_rate += r.success ? 1.0 : 0.0;
    sum += r.total_reward;
    s.mean_steps += r.steps;
    s.mean_cycles += r.cycles;
    s.mean_sampler_failure_rate += r.sampler_failure_rate();
    s.starved_cycles += r.starved;
  }
  s.success_rate /= n;
  s.mean_reward = sum / n;
  s.mean_steps /= n;
  s.mean_cycles /= n;
  s.mean_sampler_failure_rate /= n;
  if (records.size() > 1) {
    double ss = 0.0;
    for (const auto& r : records) {
      const double d = r.total_reward - s.mean_reward;
      ss += d * d;
    }
    s.stderr_reward = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

inline nlohmann::ordered_json summary_json(const BenchResult& result) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& cell = result.cells[c];
    const CellSummary s = summarize_cell(result.records[c]);
    nlohmann::ordered_json j;
    j["env"] = envs::env_name(cell.env);
    j["solver"] = solver_kind_name(cell.solver);
    j["heuristic"] = subgoals::heuristic_name(cell.heuristic);
    j["epsilon"] = cell.epsilon;
    j["episodes"] = s.episodes;
    j["success_rate"] = s.success_rate;
    j["mean_reward"] = s.mean_reward;
    j["stderr_reward"] = s.stderr_reward;
    j["mean_steps"] = s.mean_steps;
    j["mean_cycles"] = s.mean_cycles;
    j["mean_sampler_failure_rate"] = s.mean_sampler_failure_rate;
    j["starved_cycles"] = s.starved_cycles;
    cells.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["cells"] = std::move(cells);
  return root;
}

inline nlohmann::ordered_json timings_json(const BenchResult& result) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& cell = result.cells[c];
    double total = 0.0;
    for (const auto& r : result.records[c]) total += r.wall_ms;
    nlohmann::ordered_json j;
    j["env"] = envs::env_name(cell.env);
    j["solver"] = solver_kind_name(cell.solver);
    j["heuristic"] = subgoals::heuristic_name(cell.heuristic);
    j["epsilon"] = cell.epsilon;
    j["total_episode_ms"] = total;
    j["mean_episode_ms"] =
        result.records[c].empty() ? 0.0 : total / static_cast<double>(result.records[c].size());
    cells.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["cells"] = std::move(cells);
  root["total_wall_ms"] = result.total_wall_ms;
  return root;
}

// Writes episodes.csv, summary.json, timings.json and (with rendering on)
// one trajectory SVG per episode into the output directory.
inline void write_artifacts(const BenchConfig& cfg, const BenchResult& result) {
  std::filesystem::create_directories(cfg.out_dir);
  {
    std::ofstream csv(cfg.out_dir + "/episodes.csv");
    if (!csv) throw std::runtime_error("cannot write episodes.csv");
    write_episode_csv(result, csv);
  }
  {
    std::ofstream f(cfg.out_dir + "/summary.json");
    f << summary_json(result).dump(2) << '\n';
  }
  {
    std::ofstream f(cfg.out_dir + "/timings.json");
    f << timings_json(result).dump(2) << '\n';
  }
  if (cfg.render) {
    for (const auto& records : result.records) {
      for (const auto& rec : records) {
        if (rec.trajectory.empty() || !rec.scenario_used) continue;
        write_trajectory_svg(*rec.scenario_used, rec.trajectory, cfg.out_dir + "/" + trace_name(rec));
      }
    }
  }
}

}  // namespace refplan::bench
