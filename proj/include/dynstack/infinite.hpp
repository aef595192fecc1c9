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

#ifndef DYNSTACK_INFINITE_HPP
#define DYNSTACK_INFINITE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dynstack/backward.hpp"
#include "dynstack/grid.hpp"
#include "dynstack/stage.hpp"

namespace dynstack {

struct IHSolution {
  PolicyTable policy;  // single time slice
  ValueTable v_l;      // single slice
  ValueTable v_f;
  std::vector<double> residual_history;  // sup-norm change per sweep
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> failures;
};

// Time-homogeneous one-shot fixed point, solved by sweeping the stage solver
// over the grid with the current tables as continuation until the sup-norm
// residual drops below tol.
inline IHSolution solve_ih(const GameSpec& spec, const BeliefGrid& grid,
                           StageParams params = {}, double tol = 1e-6,
                           int max_sweeps = 200, int threads = 1) {
  if (!spec.infinite())
    throw std::invalid_argument("solve_ih requires horizon = infinite");
  if (!(spec.delta < 1.0))
    throw std::invalid_argument("solve_ih requires discount < 1");
  const int cells = grid.pair_count();

  IHSolution sol;
  sol.v_l = ValueTable::zeros(1, cells, spec.nxl());
  sol.v_f = ValueTable::zeros(1, cells, spec.nxf());
  sol.policy.entries.assign(1, std::vector<PolicyEntry>(cells));
  params.t = 1;

  ValueTable new_l = sol.v_l, new_f = sol.v_f;
  std::mutex fail_mutex;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const ContinuationValue cont_l = [&sol, &grid](const BeliefPair& p, int x) {
      return interpolate_value(sol.v_l, grid, 1, p, x);
    };
    const ContinuationValue cont_f = [&sol, &grid](const BeliefPair& p, int x) {
      return interpolate_value(sol.v_f, grid, 1, p, x);
    };
    detail::parallel_for(cells, threads, [&](int c) {
      const BeliefPair pair = grid.pair_at(c);
      PolicyEntry& entry = sol.policy.set(1, c);
      try {
        const StageSolution s = solve_stage(pair, cont_l, cont_f, spec, params);
        entry.gamma = {s.gamma_l, s.gamma_f};
        entry.converged = true;
        entry.leader_warning = s.leader_warning;
        for (int x = 0; x < spec.nxl(); ++x) new_l.set(1, c, x) = s.v_l[x];
        for (int x = 0; x < spec.nxf(); ++x) new_f.set(1, c, x) = s.v_f[x];
      } catch (const NoStageEquilibrium& e) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        sol.failures.push_back("sweep=" + std::to_string(sweep) +
                               " pair=" + std::to_string(c) + ": " + e.what());
        entry.converged = false;
        for (int x = 0; x < spec.nxl(); ++x)
          new_l.set(1, c, x) = sol.v_l.at(1, c, x);
        for (int x = 0; x < spec.nxf(); ++x)
          new_f.set(1, c, x) = sol.v_f.at(1, c, x);
      }
    });
    double residual = 0.0;
    for (std::size_t i = 0; i < new_l.values[0].size(); ++i)
      residual = std::max(residual,
                          std::fabs(new_l.values[0][i] - sol.v_l.values[0][i]));
    for (std::size_t i = 0; i < new_f.values[0].size(); ++i)
      residual = std::max(residual,
                          std::fabs(new_f.values[0][i] - sol.v_f.values[0][i]));
    sol.v_l.values[0] = new_l.values[0];
    sol.v_f.values[0] = new_f.values[0];
    sol.residual_history.push_back(residual);
    sol.iterations = sweep + 1;
    if (residual <= tol) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

struct ConvergenceReport {
  double fitted_ratio = 0.0;  // per-sweep residual decay after burn-in
  double worst_ratio = 0.0;   // max consecutive residual ratio after burn-in
  bool contraction_ok = false;
  int burn_in = 3;
  int samples = 0;
};

// Least-squares slope of log residuals after a burn-in; the ratio should not
// exceed the discount by much for a contraction-driven sweep. The default
// burn-in grows with the sweep count so the initial transient, where the
// prescription pattern is still settling, is excluded from the fit.
inline ConvergenceReport convergence_report(const IHSolution& sol, double delta,
                                            int burn_in = -1) {
  ConvergenceReport rep;
  const int n_hist = static_cast<int>(sol.residual_history.size());
  if (burn_in < 0) burn_in = std::max(3, n_hist / 4);
  rep.burn_in = burn_in;
  std::vector<double> logs;
  for (std::size_t i = burn_in; i < sol.residual_history.size(); ++i) {
    const double r = sol.residual_history[i];
    if (r <= 0.0) break;
    logs.push_back(std::log(r));
  }
  rep.samples = static_cast<int>(logs.size());
  for (std::size_t i = 1; i < logs.size(); ++i)
    rep.worst_ratio = std::max(rep.worst_ratio, std::exp(logs[i] - logs[i - 1]));
  if (logs.size() >= 2) {
    const int n = static_cast<int>(logs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      sx += i;
      sy += logs[i];
      sxx += static_cast<double>(i) * i;
      sxy += i * logs[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.fitted_ratio = std::exp(slope);
  } else {
    rep.fitted_ratio = 0.0;  // converged before the burn-in window filled
  }
  rep.contraction_ok = rep.fitted_ratio <= delta + 0.05;
  return rep;
}

}  // namespace dynstack

#endif  // DYNSTACK_INFINITE_HPP
