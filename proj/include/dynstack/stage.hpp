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

#ifndef DYNSTACK_STAGE_HPP
#define DYNSTACK_STAGE_HPP

#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "dynstack/belief.hpp"
#include "dynstack/game.hpp"
#include "dynstack/prescription.hpp"

namespace dynstack {

// Continuation V_{t+1}(belief pair, next private state); an empty function
// means identically zero (the terminal condition).
using ContinuationValue = std::function<double(const BeliefPair&, int)>;

enum class TieBreak { favor_leader, pessimistic };

struct StageParams {
  int leader_resolution = 100;
  bool refine = true;          // local pass at refine_factor x resolution
  int refine_factor = 10;
  double tol = 1e-9;           // value-comparison tolerance
  int max_iter = 100;          // follower best-response iterations
  TieBreak tie = TieBreak::favor_leader;
  std::uint64_t lattice_cap = 10'000'000;
  int t = 1;                   // reward time index
};

struct NoFollowerFixedPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoStageEquilibrium : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StageSolution {
  Prescription gamma_l;
  Prescription gamma_f;
  std::vector<double> v_l;  // indexed by x_l
  std::vector<double> v_f;  // indexed by x_f
  bool converged = true;
  int iterations = 0;
  // Set when |X^l| > 1 and the weighted-optimal gamma_l is not optimal for
  // every leader state with positive belief.
  bool leader_warning = false;
};

namespace detail {

// Continuation values per joint action, for one player's next state:
// cont[a_l * naf + a_f][x'] = V_{t+1}(F(pair, gammas, a), x').
// Empty rows when v_next is null.
inline std::vector<std::vector<double>> continuation_table(
    const BeliefPair& pair, const PrescriptionPair& gammas,
    const ContinuationValue& v_next, const GameSpec& spec, Player who) {
  const int n_next = who == Player::leader ? spec.nxl() : spec.nxf();
  std::vector<std::vector<double>> cont(
      static_cast<std::size_t>(spec.nal()) * spec.naf());
  if (!v_next) return cont;
  for (int al = 0; al < spec.nal(); ++al)
    for (int af = 0; af < spec.naf(); ++af) {
      const BeliefPair next = update_pair(pair, gammas, {al, af}, spec);
      auto& row = cont[al * spec.naf() + af];
      row.resize(n_next);
      for (int xn = 0; xn < n_next; ++xn) row[xn] = v_next(next, xn);
    }
  return cont;
}

inline double follower_objective_from_table(
    const BeliefPair& pair, const Prescription& gamma_l,
    const std::vector<double>& gamma_f_row, int x_f,
    const std::vector<std::vector<double>>& cont, const GameSpec& spec,
    double delta, int t) {
  double total = 0.0;
  for (int af = 0; af < spec.naf(); ++af) {
    const double pf = gamma_f_row[af];
    if (pf == 0.0) continue;
    for (int al = 0; al < spec.nal(); ++al) {
      double inner = 0.0;
      for (int xl = 0; xl < spec.nxl(); ++xl) {
        const double w = pair.pi_l[xl] * gamma_l.at(xl, al);
        if (w == 0.0) continue;
        inner += w * spec.rf(t, xl, x_f, al, af);
      }
      // weight of (a_l, a_f) under pi_l and gamma_l, for the continuation term
      double wa = 0.0;
      for (int xl = 0; xl < spec.nxl(); ++xl)
        wa += pair.pi_l[xl] * gamma_l.at(xl, al);
      const auto& c = cont[al * spec.naf() + af];
      if (!c.empty() && wa > 0.0) {
        double ec = 0.0;
        for (int xn = 0; xn < spec.nxf(); ++xn)
          ec += spec.q_f(x_f, al, af, xn) * c[xn];
        inner += wa * delta * ec;
      }
      total += pf * inner;
    }
  }
  return total;
}

// Leader's expected instantaneous reward if the follower plays a_f in state
// x_f; used only to break follower indifference.
inline double leader_row_reward(const BeliefPair& pair,
                                const Prescription& gamma_l, int x_f, int af,
                                const GameSpec& spec, int t) {
  double v = 0.0;
  for (int xl = 0; xl < spec.nxl(); ++xl)
    for (int al = 0; al < spec.nal(); ++al)
      v += pair.pi_l[xl] * gamma_l.at(xl, al) * spec.rl(t, xl, x_f, al, af);
  return v;
}

inline std::uint64_t encode_pure(const std::vector<int>& actions, int n_actions) {
  std::uint64_t code = 0;
  for (int a : actions) code = code * n_actions + a;
  return code;
}

struct FollowerBR {
  Prescription gamma;
  int iterations = 0;
};

inline FollowerBR follower_best_response_impl(const BeliefPair& pair,
                                              const Prescription& gamma_l,
                                              const ContinuationValue& v_next_f,
                                              const GameSpec& spec,
                                              const StageParams& params) {
  const int nxf = spec.nxf(), naf = spec.naf();
  Prescription candidate = Prescription::uniform(nxf, naf);
  std::set<std::uint64_t> visited;
  int iterations = 0;
  bool cycle = false;

  auto best_rows = [&](const Prescription& full) {
    const auto cont = continuation_table(pair, {gamma_l, full}, v_next_f, spec,
                                         Player::follower);
    std::vector<int> actions(nxf);
    for (int xf = 0; xf < nxf; ++xf) {
      double best = -1e300;
      std::vector<double> vals(naf);
      for (int a = 0; a < naf; ++a) {
        std::vector<double> row(naf, 0.0);
        row[a] = 1.0;
        vals[a] = follower_objective_from_table(pair, gamma_l, row, xf, cont,
                                                spec, spec.delta, params.t);
        best = std::max(best, vals[a]);
      }
      int pick = -1;
      double pick_lr = 0.0;
      for (int a = 0; a < naf; ++a) {
        if (vals[a] < best - params.tol) continue;
        const double lr = leader_row_reward(pair, gamma_l, xf, a, spec, params.t);
        const bool better = params.tie == TieBreak::favor_leader
                                ? lr > pick_lr + params.tol
                                : lr < pick_lr - params.tol;
        if (pick < 0 || better) {
          pick = a;
          pick_lr = lr;
        }
      }
      actions[xf] = pick;
    }
    return actions;
  };

  for (; iterations < params.max_iter; ++iterations) {
    const auto actions = best_rows(candidate);
    const Prescription next = Prescription::pure(naf, actions);
    if (next == candidate) return {candidate, iterations + 1};
    const std::uint64_t code = encode_pure(actions, naf);
    if (visited.count(code)) {
      cycle = true;
      break;
    }
    visited.insert(code);
    candidate = next;
  }
  (void)cycle;

  // Exhaustive scan over pure prescriptions for a self-consistent one.
  std::uint64_t n_pure = 1;
  for (int x = 0; x < nxf; ++x) n_pure *= naf;
  std::optional<Prescription> best_p;
  double best_score = 0.0;
  for (std::uint64_t code = 0; code < n_pure; ++code) {
    std::vector<int> actions(nxf);
    std::uint64_t c = code;
    for (int x = nxf - 1; x >= 0; --x) {
      actions[x] = static_cast<int>(c % naf);
      c /= naf;
    }
    const Prescription p = Prescription::pure(naf, actions);
    const auto cont = continuation_table(pair, {gamma_l, p}, v_next_f, spec,
                                         Player::follower);
    bool consistent = true;
    for (int xf = 0; xf < nxf && consistent; ++xf) {
      double best = -1e300, own = 0.0;
      for (int a = 0; a < naf; ++a) {
        std::vector<double> row(naf, 0.0);
        row[a] = 1.0;
        const double v = follower_objective_from_table(
            pair, gamma_l, row, xf, cont, spec, spec.delta, params.t);
        best = std::max(best, v);
        if (a == actions[xf]) own = v;
      }
      consistent = own >= best - params.tol;
    }
    if (!consistent) continue;
    double score = 0.0;
    for (int xf = 0; xf < nxf; ++xf)
      score += pair.pi_f[xf] *
               leader_row_reward(pair, gamma_l, xf, actions[xf], spec, params.t);
    const bool better = params.tie == TieBreak::favor_leader
                            ? score > best_score + params.tol
                            : score < best_score - params.tol;
    if (!best_p || better) {
      best_p = p;
      best_score = score;
    }
  }
  if (!best_p)
    throw NoFollowerFixedPoint(
        "no self-consistent pure follower prescription exists");
  return {*best_p, iterations};
}

// Rows on the (resolution * factor) lattice within 1/resolution of a base row.
inline std::vector<std::vector<double>> local_rows(const std::vector<double>& base,
                                                   int resolution, int factor) {
  const int fine = resolution * factor;
  const int n = static_cast<int>(base.size());
  std::vector<int> center(n), lo(n), hi(n);
  for (int a = 0; a < n; ++a) {
    center[a] = static_cast<int>(std::lround(base[a] * fine));
    lo[a] = std::max(0, center[a] - factor);
    hi[a] = std::min(fine, center[a] + factor);
  }
  std::vector<std::vector<double>> out;
  std::vector<int> cur(n, 0);
  auto rec = [&](auto&& self, int i, int rem) -> void {
    if (i == n - 1) {
      if (rem >= lo[i] && rem <= hi[i]) {
        cur[i] = rem;
        std::vector<double> row(n);
        for (int a = 0; a < n; ++a) row[a] = static_cast<double>(cur[a]) / fine;
        out.push_back(std::move(row));
      }
      return;
    }
    for (int k = lo[i]; k <= std::min(hi[i], rem); ++k) {
      cur[i] = k;
      self(self, i + 1, rem - k);
    }
  };
  rec(rec, 0, fine);
  return out;
}

}  // namespace detail

// Follower's stage objective for state x_f when it plays gamma_f_row while
// beliefs are updated as if it follows gamma_f_full.
inline double follower_stage_objective(const BeliefPair& pair,
                                       const Prescription& gamma_l,
                                       const std::vector<double>& gamma_f_row,
                                       const Prescription& gamma_f_full, int x_f,
                                       const ContinuationValue& v_next_f,
                                       const GameSpec& spec, int t = 1) {
  if ((int)gamma_f_row.size() != spec.naf() ||
      gamma_f_full.n_states != spec.nxf() || gamma_l.n_states != spec.nxl())
    throw DimensionError("follower_stage_objective: dimension mismatch");
  const auto cont = detail::continuation_table(pair, {gamma_l, gamma_f_full},
                                               v_next_f, spec, Player::follower);
  return detail::follower_objective_from_table(pair, gamma_l, gamma_f_row, x_f,
                                               cont, spec, spec.delta, t);
}

inline Prescription follower_best_response(const BeliefPair& pair,
                                           const Prescription& gamma_l,
                                           const ContinuationValue& v_next_f,
                                           const GameSpec& spec,
                                           double tol = 1e-9, int max_iter = 100,
                                           TieBreak tie = TieBreak::favor_leader,
                                           int t = 1) {
  StageParams params;
  params.tol = tol;
  params.max_iter = max_iter;
  params.tie = tie;
  params.t = t;
  return detail::follower_best_response_impl(pair, gamma_l, v_next_f, spec,
                                             params)
      .gamma;
}

// Leader's stage objective per leader state, given the follower response.
inline std::vector<double> leader_stage_objective(const BeliefPair& pair,
                                                  const Prescription& gamma_l,
                                                  const Prescription& gamma_f_hat,
                                                  const ContinuationValue& v_next_l,
                                                  const GameSpec& spec, int t = 1) {
  if (gamma_l.n_states != spec.nxl() || gamma_f_hat.n_states != spec.nxf())
    throw DimensionError("leader_stage_objective: dimension mismatch");
  const auto cont = detail::continuation_table(pair, {gamma_l, gamma_f_hat},
                                               v_next_l, spec, Player::leader);
  std::vector<double> out(spec.nxl(), 0.0);
  for (int xl = 0; xl < spec.nxl(); ++xl) {
    double total = 0.0;
    for (int al = 0; al < spec.nal(); ++al) {
      const double pl = gamma_l.at(xl, al);
      if (pl == 0.0) continue;
      for (int af = 0; af < spec.naf(); ++af) {
        double wf = 0.0, r = 0.0;
        for (int xf = 0; xf < spec.nxf(); ++xf) {
          const double w = pair.pi_f[xf] * gamma_f_hat.at(xf, af);
          wf += w;
          r += w * spec.rl(t, xl, xf, al, af);
        }
        double v = r;
        const auto& c = cont[al * spec.naf() + af];
        if (!c.empty() && wf > 0.0) {
          double ec = 0.0;
          for (int xn = 0; xn < spec.nxl(); ++xn)
            ec += spec.q_l(xl, al, af, xn) * c[xn];
          v += wf * spec.delta * ec;
        }
        total += pl * v;
      }
    }
    out[xl] = total;
  }
  return out;
}

// Per-(t, belief) equilibrium: leader lattice search over enumerate_grid plus
// a local refinement pass, follower fixed point per candidate, lexicographic
// tie-breaking among equal-value leader candidates.
inline StageSolution solve_stage(const BeliefPair& pair,
                                 const ContinuationValue& v_next_l,
                                 const ContinuationValue& v_next_f,
                                 const GameSpec& spec,
                                 const StageParams& params = {}) {
  StageSolution sol;
  sol.converged = false;
  double best_weighted = 0.0;
  std::vector<double> per_state_max(spec.nxl(), -1e300);
  bool found = false;

  auto consider = [&](const Prescription& gl) {
    detail::FollowerBR br;
    try {
      br = detail::follower_best_response_impl(pair, gl, v_next_f, spec, params);
    } catch (const NoFollowerFixedPoint&) {
      return;
    }
    sol.iterations += br.iterations;
    const auto obj = leader_stage_objective(pair, gl, br.gamma, v_next_l, spec,
                                            params.t);
    double weighted = 0.0;
    for (int xl = 0; xl < spec.nxl(); ++xl) {
      weighted += pair.pi_l[xl] * obj[xl];
      per_state_max[xl] = std::max(per_state_max[xl], obj[xl]);
    }
    if (!found || weighted > best_weighted + params.tol) {
      found = true;
      best_weighted = weighted;
      sol.gamma_l = gl;
      sol.gamma_f = br.gamma;
      sol.v_l = obj;
    }
  };

  for (const auto& gl :
       enumerate_grid(spec.nxl(), spec.nal(), params.leader_resolution,
                      params.lattice_cap))
    consider(gl);
  if (!found) throw NoStageEquilibrium("no leader candidate admits a follower fixed point");

  if (params.refine && params.refine_factor > 1) {
    std::vector<std::vector<std::vector<double>>> row_sets(spec.nxl());
    std::uint64_t count = 1;
    for (int x = 0; x < spec.nxl(); ++x) {
      row_sets[x] = detail::local_rows(sol.gamma_l.row(x),
                                       params.leader_resolution,
                                       params.refine_factor);
      count *= row_sets[x].size();
    }
    if (count <= 1'000'000) {
      std::vector<int> idx(spec.nxl(), 0);
      while (true) {
        Prescription gl;
        gl.n_states = spec.nxl();
        gl.n_actions = spec.nal();
        for (int x = 0; x < spec.nxl(); ++x)
          for (double v : row_sets[x][idx[x]]) gl.p.push_back(v);
        consider(gl);
        int i = spec.nxl() - 1;
        while (i >= 0 && ++idx[i] == (int)row_sets[i].size()) idx[i--] = 0;
        if (i < 0) break;
      }
    }
  }

  // Follower backup per (Vdef); leader values already computed at the argmax.
  sol.v_f.resize(spec.nxf());
  for (int xf = 0; xf < spec.nxf(); ++xf)
    sol.v_f[xf] = follower_stage_objective(pair, sol.gamma_l,
                                           sol.gamma_f.row(xf), sol.gamma_f, xf,
                                           v_next_f, spec, params.t);
  sol.converged = true;
  for (int xl = 0; xl < spec.nxl(); ++xl)
    if (pair.pi_l[xl] > 0.0 && sol.v_l[xl] < per_state_max[xl] - 1e-6)
      sol.leader_warning = true;
  return sol;
}

}  // namespace dynstack

#endif  // DYNSTACK_STAGE_HPP
