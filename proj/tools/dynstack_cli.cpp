// Copyright 2026 The dynstack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dynstack/dynstack.hpp"

namespace fs = std::filesystem;
using namespace dynstack;

namespace {

// Exit codes: 0 ok, 2 parse, 3 validation, 4 non-convergence, 5 no-equilibrium.
enum ExitCode {
  kOk = 0,
  kParseError = 2,
  kValidationError = 3,
  kNonConvergence = 4,
  kNoEquilibrium = 5,
};

struct RunConfig {
  std::string spec_path;
  int grid = 100;
  int leader_res = 100;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool pessimistic = false;
  bool swap_payoffs = false;
  int threads = 1;
  int horizon_override = 0;  // 0 = use the spec's horizon
  long episodes = 1;
  int max_sweeps = 200;
};

std::string default_out_dir() {
  if (const char* env = std::getenv("DYNSTACK_OUT_DIR")) return env;
  return ".";
}

fs::path out_file(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

StageParams stage_params(const RunConfig& cfg) {
  StageParams p;
  p.leader_resolution = cfg.leader_res;
  p.tie = cfg.pessimistic ? TieBreak::pessimistic : TieBreak::favor_leader;
  return p;
}

GameSpec load_or_die(const RunConfig& cfg) {
  GameSpec spec = load_spec(cfg.spec_path);
  if (cfg.swap_payoffs) std::swap(spec.r_l, spec.r_f);
  if (cfg.horizon_override > 0) spec.horizon = cfg.horizon_override;
  return spec;
}

std::string fmt(double v) { return detail::fmt_double(v); }

int cmd_validate(const RunConfig& cfg) {
  GameSpec spec = load_spec(cfg.spec_path);
  const ValidationReport report = validate_spec(spec);
  if (!report.ok()) {
    std::cerr << report.to_string();
    return kValidationError;
  }
  std::cout << "ok: " << cfg.spec_path << " ("
            << spec.nxl() << " leader states, " << spec.nxf()
            << " follower states, " << spec.nal() << "x" << spec.naf()
            << " actions, horizon "
            << (spec.infinite() ? std::string("infinite")
                                : std::to_string(spec.horizon))
            << ")\n";
  return kOk;
}

int cmd_solve_finite(const RunConfig& cfg) {
  GameSpec spec = load_or_die(cfg);
  if (spec.infinite()) {
    std::cerr << "solve-finite: spec has infinite horizon (use --horizon to truncate)\n";
    return kValidationError;
  }
  const BeliefGrid grid = build_grid(spec, cfg.grid);
  const BackwardResult res =
      backward_recursion(spec, grid, stage_params(cfg), 0.05, cfg.threads);
  save_tables(out_file(cfg, "tables.txt").string(), spec, grid, res.policy,
              res.v_l, res.v_f);
  std::ofstream sum(out_file(cfg, "solve_summary.txt"));
  sum << "horizon " << spec.horizon << "\n";
  sum << "grid " << cfg.grid << "\n";
  sum << "cells " << grid.pair_count() << "\n";
  sum << "failed_cells " << res.failures.size() << "\n";
  for (const auto& fline : res.failures) sum << "failure " << fline << "\n";
  std::cout << "wrote " << out_file(cfg, "tables.txt").string() << "\n";
  return res.failures.empty() ? kOk : kNoEquilibrium;
}

int cmd_solve_infinite(const RunConfig& cfg) {
  GameSpec spec = load_or_die(cfg);
  const BeliefGrid grid = build_grid(spec, cfg.grid);
  const IHSolution sol =
      solve_ih(spec, grid, stage_params(cfg), cfg.tol, cfg.max_sweeps, cfg.threads);
  save_tables(out_file(cfg, "tables.txt").string(), spec, grid, sol.policy,
              sol.v_l, sol.v_f);
  const ConvergenceReport rep = convergence_report(sol, spec.delta);
  std::ofstream sum(out_file(cfg, "convergence.txt"));
  sum << "converged " << sol.converged << "\n";
  sum << "sweeps " << sol.iterations << "\n";
  sum << "fitted_ratio " << fmt(rep.fitted_ratio) << "\n";
  sum << "contraction_ok " << rep.contraction_ok << "\n";
  sum << "failed_cells " << sol.failures.size() << "\n";
  for (std::size_t i = 0; i < sol.residual_history.size(); ++i)
    sum << "residual " << i + 1 << " " << fmt(sol.residual_history[i]) << "\n";
  std::cout << "wrote " << out_file(cfg, "tables.txt").string() << "\n";
  if (!sol.failures.empty()) return kNoEquilibrium;
  return sol.converged ? kOk : kNonConvergence;
}

void write_trace(const EpisodeTrace& trace, const fs::path& path) {
  std::ofstream f(path);
  f << "# t x_l x_f a_l a_f r_l r_f mu_l... mu_f...\n";
  for (const auto& s : trace.steps) {
    f << s.t << ' ' << s.x_l << ' ' << s.x_f << ' ' << s.a_l << ' ' << s.a_f
      << ' ' << fmt(s.r_l) << ' ' << fmt(s.r_f);
    for (double v : s.mu.pi_l.p) f << ' ' << fmt(v);
    for (double v : s.mu.pi_f.p) f << ' ' << fmt(v);
    f << "\n";
  }
  f << "discounted_l " << fmt(trace.discounted_l) << "\n";
  f << "discounted_f " << fmt(trace.discounted_f) << "\n";
}

int cmd_simulate(const RunConfig& cfg) {
  GameSpec spec = load_or_die(cfg);
  const BeliefGrid grid = build_grid(spec, cfg.grid);
  PolicyTable policy;
  int horizon;
  bool stationary;
  BackwardResult fin;
  IHSolution inf;
  if (spec.infinite()) {
    inf = solve_ih(spec, grid, stage_params(cfg), cfg.tol, cfg.max_sweeps,
                   cfg.threads);
    if (!inf.converged) return kNonConvergence;
    policy = inf.policy;
    horizon = cfg.horizon_override > 0 ? cfg.horizon_override : 50;
    stationary = true;
  } else {
    fin = backward_recursion(spec, grid, stage_params(cfg), 0.05, cfg.threads);
    if (!fin.failures.empty()) return kNoEquilibrium;
    policy = fin.policy;
    horizon = spec.horizon;
    stationary = false;
  }
  const StrategyEvaluator ev =
      construct_strategy(spec, grid, policy, horizon, stationary);
  for (long e = 0; e < cfg.episodes; ++e) {
    const EpisodeTrace tr = simulate_episode(ev, spec, cfg.seed + (std::uint64_t)e);
    write_trace(tr, out_file(cfg, "trace_" + std::to_string(e) + ".txt"));
  }
  std::cout << "wrote " << cfg.episodes << " trace file(s) to " << cfg.out_dir
            << "\n";
  return kOk;
}

int cmd_oracle_check(const RunConfig& cfg) {
  GameSpec spec = load_or_die(cfg);
  const BeliefGrid grid = build_grid(spec, cfg.grid);
  std::ofstream rep(out_file(cfg, "oracle_report.txt"));
  double max_diff = 0.0;
  bool all_agree = true;
  const TieBreak tie =
      cfg.pessimistic ? TieBreak::pessimistic : TieBreak::favor_leader;
  for (int c = 0; c < grid.pair_count(); ++c) {
    const BeliefPair pair = grid.pair_at(c);
    const CrossCheckReport cc = cross_check(pair, spec, cfg.leader_res, tie);
    max_diff = std::max(max_diff, cc.leader_value_diff);
    all_agree = all_agree && cc.follower_agree;
    rep << "pair " << c << " diff " << fmt(cc.leader_value_diff) << " agree "
        << cc.follower_agree << "\n";
  }
  rep << "max_diff " << fmt(max_diff) << "\n";
  rep << "all_agree " << all_agree << "\n";
  std::cout << "max leader value discrepancy: " << fmt(max_diff) << "\n";
  std::cout << "follower responses agree: " << (all_agree ? "yes" : "no") << "\n";
  return kOk;
}

int cmd_example_security(const RunConfig& cfg) {
  const GameSpec spec = example_security_game(cfg.swap_payoffs);
  const BeliefGrid grid = build_grid(spec, cfg.grid);
  const IHSolution sol = solve_ih(spec, grid, stage_params(cfg), cfg.tol,
                                  cfg.max_sweeps, cfg.threads);
  if (!sol.converged) {
    std::ofstream fail(out_file(cfg, "security_failure.txt"));
    fail << "non-convergence after " << sol.iterations << " sweeps; residual "
         << fmt(sol.residual_history.back()) << "\n";
    return kNonConvergence;
  }

  std::ofstream csv(out_file(cfg, "security_curves.csv"));
  csv << "pi_f_high,p_l,p_f_low,p_f_high,V_f_low,V_f_high,V_l\n";
  int pure_points = 0, discontinuities = 0;
  double prev_pl = -1.0;
  const int nf = grid.follower.size();
  // Lattice points are lexicographic in (pi_f_low, pi_f_high); walk them in
  // ascending pi_f_high for a plot-ready file.
  for (int j = nf - 1; j >= 0; --j) {
    const int c = grid.pair_index(0, j);
    const Belief pif = grid.follower.belief_at(j);
    const PrescriptionPair& g = sol.policy.at(1, c).gamma;
    const double p_l = g.gamma_l.at(0, 1);
    const double p_f0 = g.gamma_f.at(0, 1);
    const double p_f1 = g.gamma_f.at(1, 1);
    csv << fmt(pif[1]) << ',' << fmt(p_l) << ',' << fmt(p_f0) << ',' << fmt(p_f1)
        << ',' << fmt(sol.v_f.at(1, c, 0)) << ',' << fmt(sol.v_f.at(1, c, 1))
        << ',' << fmt(sol.v_l.at(1, c, 0)) << "\n";
    auto pure01 = [](double p) {
      return std::fabs(p) <= 1e-6 || std::fabs(p - 1.0) <= 1e-6;
    };
    if (pure01(p_l) && pure01(p_f0) && pure01(p_f1)) ++pure_points;
    if (prev_pl >= 0.0 && std::fabs(p_l - prev_pl) > 0.5) ++discontinuities;
    prev_pl = p_l;
  }

  const ConvergenceReport rep = convergence_report(sol, spec.delta);
  std::ofstream sum(out_file(cfg, "security_summary.txt"));
  sum << "grid_points " << nf << "\n";
  sum << "pure_points " << pure_points << "\n";
  sum << "pure_fraction " << fmt((double)pure_points / nf) << "\n";
  sum << "p_l_discontinuities " << discontinuities << "\n";
  sum << "V_l_at_pi1 " << fmt(sol.v_l.at(1, grid.pair_index(0, 0), 0)) << "\n";
  sum << "V_l_at_pi0 " << fmt(sol.v_l.at(1, grid.pair_index(0, nf - 1), 0)) << "\n";
  sum << "sweeps " << sol.iterations << "\n";
  sum << "fitted_ratio " << fmt(rep.fitted_ratio) << "\n";
  std::cout << "wrote " << out_file(cfg, "security_curves.csv").string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov perfect Stackelberg equilibrium solver for two-player "
               "dynamic stochastic games with private Markovian types"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.out_dir = default_out_dir();

  auto add_common = [&](CLI::App* sub, bool needs_spec) {
    if (needs_spec)
      sub->add_option("--spec", cfg.spec_path, "game spec file")->required();
    sub->add_option("--grid", cfg.grid, "belief grid resolution G");
    sub->add_option("--leader-res", cfg.leader_res, "leader lattice resolution M");
    sub->add_option("--tol", cfg.tol, "convergence tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--threads", cfg.threads, "worker thread cap");
    sub->add_flag("--pessimistic", cfg.pessimistic,
                  "break follower ties against the leader");
    sub->add_flag("--swap-payoffs", cfg.swap_payoffs,
                  "swap the leader/follower payoff convention");
  };

  auto* validate = app.add_subcommand("validate", "validate a game spec");
  add_common(validate, true);
  auto* solve_f = app.add_subcommand("solve-finite", "finite-horizon solve");
  add_common(solve_f, true);
  solve_f->add_option("--horizon", cfg.horizon_override,
                      "override/truncate the horizon");
  auto* solve_i = app.add_subcommand("solve-infinite", "infinite-horizon solve");
  add_common(solve_i, true);
  solve_i->add_option("--max-sweeps", cfg.max_sweeps, "sweep cap");
  auto* simulate = app.add_subcommand("simulate", "solve and simulate episodes");
  add_common(simulate, true);
  simulate->add_option("--episodes", cfg.episodes, "number of episodes");
  simulate->add_option("--horizon", cfg.horizon_override,
                       "episode length (required for infinite-horizon specs)");
  auto* example = app.add_subcommand("example-security",
                                     "reproduce the bundled security example");
  add_common(example, false);
  example->add_option("--max-sweeps", cfg.max_sweeps, "sweep cap");
  auto* oracle = app.add_subcommand("oracle-check",
                                    "certify the stage solver against the "
                                    "brute-force single-stage oracle");
  add_common(oracle, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(cfg);
    if (solve_f->parsed()) return cmd_solve_finite(cfg);
    if (solve_i->parsed()) return cmd_solve_infinite(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (example->parsed()) return cmd_example_security(cfg);
    if (oracle->parsed()) return cmd_oracle_check(cfg);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const NoStageEquilibrium& e) {
    std::cerr << "no equilibrium: " << e.what() << "\n";
    return kNoEquilibrium;
  } catch (const NoFollowerFixedPoint& e) {
    std::cerr << "no equilibrium: " << e.what() << "\n";
    return kNoEquilibrium;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
