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

#ifndef DYNSTACK_ORACLE_HPP
#define DYNSTACK_ORACLE_HPP

#include <cmath>
#include <vector>

#include "dynstack/belief.hpp"
#include "dynstack/stage.hpp"

// Brute-force single-stage Stackelberg solver, kept deliberately independent
// of the stage solver: all expectations below are spelled out directly rather
// than shared, so the two can certify each other.

namespace dynstack {

struct OracleResult {
  std::vector<double> leader_value;  // per x_l
  Prescription leader_strategy;
  Prescription follower_strategy;
  int search_resolution = 0;
};

namespace oracle_detail {

// Local lattice-row enumeration (independent of prescription.hpp's).
inline void rows_rec(int n, int rem, int i, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
  if (i == n - 1) {
    cur[i] = rem;
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= rem; ++k) {
    cur[i] = k;
    rows_rec(n, rem - k, i + 1, cur, out);
  }
}

inline std::vector<std::vector<int>> lattice_rows(int n_actions, int resolution) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n_actions, 0);
  rows_rec(n_actions, resolution, 0, cur, out);
  return out;
}

// E[R^f | x_f, a_f] under pi_l and the leader commitment.
inline double follower_reward(const BeliefPair& pair, const Prescription& gl,
                              int x_f, int a_f, const GameSpec& spec, int t) {
  double v = 0.0;
  for (int xl = 0; xl < spec.nxl(); ++xl)
    for (int al = 0; al < spec.nal(); ++al)
      v += pair.pi_l[xl] * gl.at(xl, al) * spec.rf(t, xl, x_f, al, a_f);
  return v;
}

// E[R^l | x_l] given the follower plays action br[x_f] in state x_f.
inline double leader_reward(const BeliefPair& pair, const Prescription& gl,
                            const std::vector<int>& br, int x_l,
                            const GameSpec& spec, int t) {
  double v = 0.0;
  for (int xf = 0; xf < spec.nxf(); ++xf)
    for (int al = 0; al < spec.nal(); ++al)
      v += pair.pi_f[xf] * gl.at(x_l, al) * spec.rl(t, x_l, xf, al, br[xf]);
  return v;
}

}  // namespace oracle_detail

// Single-stage (zero continuation) Stackelberg equilibrium by exhaustive
// lattice search over leader commitments; the follower best response per
// private state is an exact finite comparison, ties broken leader-favorably
// (or adversarially).
inline OracleResult brute_force_stackelberg_t1(const BeliefPair& pair,
                                               const GameSpec& spec,
                                               int resolution,
                                               TieBreak tie = TieBreak::favor_leader,
                                               int t = 1,
                                               std::uint64_t cap = 50'000'000) {
  const int nxl = spec.nxl(), nal = spec.nal(), nxf = spec.nxf(), naf = spec.naf();
  const auto rows = oracle_detail::lattice_rows(nal, resolution);
  std::uint64_t total = 1;
  for (int x = 0; x < nxl; ++x) {
    total *= rows.size();
    if (total > cap) throw TooLargeError("oracle lattice too large");
  }

  OracleResult best;
  best.search_resolution = resolution;
  double best_weighted = 0.0;
  bool found = false;

  std::vector<int> idx(nxl, 0);
  while (true) {
    Prescription gl;
    gl.n_states = nxl;
    gl.n_actions = nal;
    for (int x = 0; x < nxl; ++x)
      for (int a = 0; a < nal; ++a)
        gl.p.push_back(static_cast<double>(rows[idx[x]][a]) / resolution);

    // Exact follower best response per private state.
    std::vector<int> br(nxf, 0);
    for (int xf = 0; xf < nxf; ++xf) {
      double best_v = -1e300;
      for (int af = 0; af < naf; ++af)
        best_v = std::max(best_v, oracle_detail::follower_reward(pair, gl, xf,
                                                                 af, spec, t));
      int pick = -1;
      double pick_lr = 0.0;
      for (int af = 0; af < naf; ++af) {
        const double v = oracle_detail::follower_reward(pair, gl, xf, af, spec, t);
        if (v < best_v - 1e-12) continue;
        double lr = 0.0;
        for (int xl = 0; xl < nxl; ++xl)
          for (int al = 0; al < nal; ++al)
            lr += pair.pi_l[xl] * gl.at(xl, al) * spec.rl(t, xl, xf, al, af);
        const bool better = tie == TieBreak::favor_leader ? lr > pick_lr + 1e-12
                                                          : lr < pick_lr - 1e-12;
        if (pick < 0 || better) {
          pick = af;
          pick_lr = lr;
        }
      }
      br[xf] = pick;
    }

    std::vector<double> lv(nxl);
    double weighted = 0.0;
    for (int xl = 0; xl < nxl; ++xl) {
      lv[xl] = oracle_detail::leader_reward(pair, gl, br, xl, spec, t);
      weighted += pair.pi_l[xl] * lv[xl];
    }
    if (!found || weighted > best_weighted + 1e-12) {
      found = true;
      best_weighted = weighted;
      best.leader_value = lv;
      best.leader_strategy = gl;
      best.follower_strategy = Prescription::pure(naf, br);
    }

    int i = nxl - 1;
    while (i >= 0 && ++idx[i] == (int)rows.size()) idx[i--] = 0;
    if (i < 0) break;
  }
  return best;
}

struct CrossCheckReport {
  double leader_value_diff = 0.0;  // |weighted oracle value - stage value|
  bool follower_agree = true;      // outside the indifference margin
  std::vector<int> excluded_states;  // follower states inside the margin
  std::vector<int> disagreement_states;
  double indifference_margin = 1e-6;
  OracleResult oracle;
  StageSolution stage;
};

// Runs the stage solver (zero continuations, no refinement so both sides scan
// the same lattice) against the brute-force oracle.
inline CrossCheckReport cross_check(const BeliefPair& pair, const GameSpec& spec,
                                    int resolution,
                                    TieBreak tie = TieBreak::favor_leader) {
  CrossCheckReport rep;
  rep.oracle = brute_force_stackelberg_t1(pair, spec, resolution, tie);
  StageParams params;
  params.leader_resolution = resolution;
  params.refine = false;
  params.tie = tie;
  rep.stage = solve_stage(pair, nullptr, nullptr, spec, params);

  double oracle_w = 0.0, stage_w = 0.0;
  for (int xl = 0; xl < spec.nxl(); ++xl) {
    oracle_w += pair.pi_l[xl] * rep.oracle.leader_value[xl];
    stage_w += pair.pi_l[xl] * rep.stage.v_l[xl];
  }
  rep.leader_value_diff = std::fabs(oracle_w - stage_w);

  // Compare best-response identities, excluding near-indifferent states.
  for (int xf = 0; xf < spec.nxf(); ++xf) {
    std::vector<double> vals(spec.naf());
    for (int af = 0; af < spec.naf(); ++af)
      vals[af] = oracle_detail::follower_reward(pair, rep.oracle.leader_strategy,
                                                xf, af, spec, 1);
    double top = -1e300, second = -1e300;
    for (double v : vals) {
      if (v > top) {
        second = top;
        top = v;
      } else if (v > second) {
        second = v;
      }
    }
    if (spec.naf() > 1 && top - second < rep.indifference_margin) {
      rep.excluded_states.push_back(xf);
      continue;
    }
    int oracle_a = 0, stage_a = 0;
    for (int af = 0; af < spec.naf(); ++af) {
      if (rep.oracle.follower_strategy.at(xf, af) > 0.5) oracle_a = af;
      if (rep.stage.gamma_f.at(xf, af) > 0.5) stage_a = af;
    }
    if (oracle_a != stage_a) {
      rep.follower_agree = false;
      rep.disagreement_states.push_back(xf);
    }
  }
  return rep;
}

}  // namespace dynstack

#endif  // DYNSTACK_ORACLE_HPP
