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

#ifndef DYNSTACK_BACKWARD_HPP
#define DYNSTACK_BACKWARD_HPP

#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dynstack/grid.hpp"
#include "dynstack/stage.hpp"

namespace dynstack {

namespace detail {

inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

struct BackwardResult {
  PolicyTable policy;
  ValueTable v_l;
  ValueTable v_f;
  // "t=<t> pair=<idx>: <reason>" per failed cell
  std::vector<std::string> failures;
};

// Finite-horizon recursion: t = T down to 1, solving every grid cell against
// interpolated continuations from t+1. Failed cells fall back to the myopic
// zero-continuation solution and are flagged; aborts only when the failure
// fraction exceeds max_failure_fraction.
inline BackwardResult backward_recursion(const GameSpec& spec,
                                         const BeliefGrid& grid,
                                         StageParams params = {},
                                         double max_failure_fraction = 0.05,
                                         int threads = 1) {
  if (spec.infinite())
    throw std::invalid_argument("backward_recursion requires a finite horizon");
  const int T = spec.horizon;
  const int cells = grid.pair_count();

  BackwardResult res;
  res.v_l = ValueTable::zeros(T + 1, cells, spec.nxl());
  res.v_f = ValueTable::zeros(T + 1, cells, spec.nxf());
  res.policy.entries.assign(T, std::vector<PolicyEntry>(cells));

  std::mutex fail_mutex;
  for (int t = T; t >= 1; --t) {
    ContinuationValue cont_l, cont_f;  // null at t == T: V_{T+1} == 0
    if (t < T) {
      cont_l = [&res, &grid, t](const BeliefPair& p, int x) {
        return interpolate_value(res.v_l, grid, t + 1, p, x);
      };
      cont_f = [&res, &grid, t](const BeliefPair& p, int x) {
        return interpolate_value(res.v_f, grid, t + 1, p, x);
      };
    }
    StageParams cell_params = params;
    cell_params.t = t;
    detail::parallel_for(cells, threads, [&](int c) {
      const BeliefPair pair = grid.pair_at(c);
      PolicyEntry& entry = res.policy.set(t, c);
      try {
        const StageSolution sol = solve_stage(pair, cont_l, cont_f, spec,
                                              cell_params);
        entry.gamma = {sol.gamma_l, sol.gamma_f};
        entry.converged = true;
        entry.leader_warning = sol.leader_warning;
        for (int x = 0; x < spec.nxl(); ++x) res.v_l.set(t, c, x) = sol.v_l[x];
        for (int x = 0; x < spec.nxf(); ++x) res.v_f.set(t, c, x) = sol.v_f[x];
      } catch (const NoStageEquilibrium& e) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        res.failures.push_back("t=" + std::to_string(t) +
                               " pair=" + std::to_string(c) + ": " + e.what());
        entry.converged = false;
        // Myopic fallback keeps the tables total.
        try {
          const StageSolution myopic = solve_stage(pair, nullptr, nullptr, spec,
                                                   cell_params);
          entry.gamma = {myopic.gamma_l, myopic.gamma_f};
          for (int x = 0; x < spec.nxl(); ++x)
            res.v_l.set(t, c, x) = myopic.v_l[x];
          for (int x = 0; x < spec.nxf(); ++x)
            res.v_f.set(t, c, x) = myopic.v_f[x];
        } catch (const NoStageEquilibrium&) {
          entry.gamma = {Prescription::uniform(spec.nxl(), spec.nal()),
                         Prescription::uniform(spec.nxf(), spec.naf())};
        }
      }
    });
    if ((double)res.failures.size() > max_failure_fraction * cells * T)
      throw NoStageEquilibrium("failure fraction exceeded: " +
                               std::to_string(res.failures.size()) + " cells");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Versioned structured-text artifact for solved tables.

namespace detail {

inline void write_prescription(std::ostream& os, const Prescription& g) {
  os << g.n_states << ' ' << g.n_actions;
  for (double v : g.p) os << ' ' << fmt_double(v);
}

inline Prescription read_prescription(std::istream& is) {
  Prescription g;
  is >> g.n_states >> g.n_actions;
  g.p.resize(static_cast<std::size_t>(g.n_states) * g.n_actions);
  for (double& v : g.p) is >> v;
  return g;
}

}  // namespace detail

inline void save_tables(const std::string& path, const GameSpec& spec,
                        const BeliefGrid& grid, const PolicyTable& policy,
                        const ValueTable& v_l, const ValueTable& v_f) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "dynstack-tables 1\n";
  f << "grid " << grid.leader.dim << ' ' << grid.leader.resolution << ' '
    << grid.follower.dim << ' ' << grid.follower.resolution << "\n";
  f << "slices " << policy.horizon() << ' ' << v_l.values.size() << "\n";
  f << "private " << spec.nxl() << ' ' << spec.nxf() << "\n";
  for (std::size_t s = 0; s < v_l.values.size(); ++s) {
    f << "values_l " << (s + 1);
    for (double v : v_l.values[s]) f << ' ' << detail::fmt_double(v);
    f << "\nvalues_f " << (s + 1);
    for (double v : v_f.values[s]) f << ' ' << detail::fmt_double(v);
    f << "\n";
  }
  for (int t = 1; t <= policy.horizon(); ++t)
    for (int c = 0; c < grid.pair_count(); ++c) {
      const PolicyEntry& e = policy.at(t, c);
      f << "policy " << t << ' ' << c << ' ' << e.converged << ' '
        << e.leader_warning << ' ';
      detail::write_prescription(f, e.gamma.gamma_l);
      f << ' ';
      detail::write_prescription(f, e.gamma.gamma_f);
      f << "\n";
    }
}

struct LoadedTables {
  BeliefGrid grid;
  PolicyTable policy;
  ValueTable v_l;
  ValueTable v_f;
};

inline LoadedTables load_tables(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open tables file: " + path);
  std::string magic;
  int version = 0;
  f >> magic >> version;
  if (magic != "dynstack-tables" || version != 1)
    throw ParseError("unrecognized tables artifact: " + path);
  LoadedTables out;
  std::string key;
  int dl, rl, df, rf;
  f >> key >> dl >> rl >> df >> rf;
  if (key != "grid") throw ParseError("tables artifact: expected 'grid'");
  out.grid.leader = SimplexGrid::build(dl, rl);
  out.grid.follower = SimplexGrid::build(df, rf);
  int horizon, slices;
  f >> key >> horizon >> slices;
  if (key != "slices") throw ParseError("tables artifact: expected 'slices'");
  int nxl, nxf;
  f >> key >> nxl >> nxf;
  if (key != "private") throw ParseError("tables artifact: expected 'private'");
  const int cells = out.grid.pair_count();
  out.v_l = ValueTable::zeros(slices, cells, nxl);
  out.v_f = ValueTable::zeros(slices, cells, nxf);
  for (int s = 0; s < slices; ++s) {
    int idx;
    f >> key >> idx;
    if (key != "values_l") throw ParseError("tables artifact: expected 'values_l'");
    for (double& v : out.v_l.values[idx - 1]) f >> v;
    f >> key >> idx;
    if (key != "values_f") throw ParseError("tables artifact: expected 'values_f'");
    for (double& v : out.v_f.values[idx - 1]) f >> v;
  }
  out.policy.entries.assign(horizon, std::vector<PolicyEntry>(cells));
  for (int i = 0; i < horizon * cells; ++i) {
    int t, c;
    bool conv, warn;
    f >> key >> t >> c >> conv >> warn;
    if (key != "policy" || !f)
      throw ParseError("tables artifact: malformed policy entry");
    PolicyEntry& e = out.policy.set(t, c);
    e.converged = conv;
    e.leader_warning = warn;
    e.gamma.gamma_l = detail::read_prescription(f);
    e.gamma.gamma_f = detail::read_prescription(f);
  }
  return out;
}

}  // namespace dynstack

#endif  // DYNSTACK_BACKWARD_HPP
