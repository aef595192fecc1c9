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

#ifndef DYNSTACK_FORWARD_HPP
#define DYNSTACK_FORWARD_HPP

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dynstack/backward.hpp"
#include "dynstack/grid.hpp"

namespace dynstack {

// Equilibrium strategy built from the solved tables: beliefs evolve by the
// factorized update along the public action history, prescriptions come from
// the nearest grid cell (prescriptions are discrete objects; neighbors may
// genuinely disagree, so they are looked up, not interpolated).
struct StrategyEvaluator {
  const GameSpec* spec = nullptr;
  const BeliefGrid* grid = nullptr;
  const PolicyTable* policy = nullptr;
  int horizon = 0;  // number of playable steps (tables may be a single slice
                    // reused every step for the infinite-horizon policy)
  bool stationary = false;

  BeliefPair initial_belief() const {
    return {Belief(spec->prior_l), Belief(spec->prior_f)};
  }

  const PolicyEntry& entry(int t, const BeliefPair& mu) const {
    if (!stationary && t > policy->horizon())
      throw std::out_of_range("strategy queried past the horizon");
    const int slice = stationary ? 1 : t;
    return policy->at(slice, grid->nearest_pair_index(mu));
  }

  PrescriptionPair prescriptions(int t, const BeliefPair& mu) const {
    return entry(t, mu).gamma;
  }

  // Action distribution for player i at (t, public belief, private state).
  std::vector<double> action_distribution(int t, const BeliefPair& mu,
                                          Player who, int x) const {
    const PrescriptionPair g = prescriptions(t, mu);
    return who == Player::leader ? g.gamma_l.row(x) : g.gamma_f.row(x);
  }

  BeliefPair next_belief(int t, const BeliefPair& mu, JointAction a) const {
    return update_pair(mu, prescriptions(t, mu), a, *spec);
  }
};

inline StrategyEvaluator construct_strategy(const GameSpec& spec,
                                            const BeliefGrid& grid,
                                            const PolicyTable& policy,
                                            int horizon,
                                            bool stationary = false) {
  StrategyEvaluator ev;
  ev.spec = &spec;
  ev.grid = &grid;
  ev.policy = &policy;
  ev.horizon = horizon;
  ev.stationary = stationary;
  return ev;
}

struct EpisodeStep {
  int t;
  int x_l, x_f;
  BeliefPair mu;
  PrescriptionPair gamma;
  int a_l, a_f;
  double r_l, r_f;
};

struct EpisodeTrace {
  std::vector<EpisodeStep> steps;
  double discounted_l = 0.0;
  double discounted_f = 0.0;
};

// Pure follower strategy override: (t, joint actions a_{1:t-1}, own type
// history x^f_{1:t}) -> action.
using FollowerOverride =
    std::function<int(int t, const std::vector<JointAction>& history,
                      const std::vector<int>& x_f_history)>;

namespace detail {

inline int sample(const std::vector<double>& p, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace detail

inline EpisodeTrace simulate_episode(const StrategyEvaluator& ev,
                                     const GameSpec& spec, std::uint64_t seed,
                                     const FollowerOverride* deviation = nullptr) {
  std::mt19937_64 rng(seed);
  EpisodeTrace trace;
  BeliefPair mu = ev.initial_belief();
  int x_l = detail::sample(spec.prior_l, rng);
  int x_f = detail::sample(spec.prior_f, rng);
  std::vector<JointAction> history;
  std::vector<int> x_f_history{x_f};
  double disc = 1.0;
  for (int t = 1; t <= ev.horizon; ++t) {
    const PrescriptionPair gamma = ev.prescriptions(t, mu);
    const int a_l = detail::sample(gamma.gamma_l.row(x_l), rng);
    const int a_f = deviation ? (*deviation)(t, history, x_f_history)
                              : detail::sample(gamma.gamma_f.row(x_f), rng);
    const double r_l = spec.rl(t, x_l, x_f, a_l, a_f);
    const double r_f = spec.rf(t, x_l, x_f, a_l, a_f);
    trace.steps.push_back({t, x_l, x_f, mu, gamma, a_l, a_f, r_l, r_f});
    trace.discounted_l += disc * r_l;
    trace.discounted_f += disc * r_f;
    disc *= spec.delta;
    const JointAction a{a_l, a_f};
    history.push_back(a);
    mu = update_pair(mu, gamma, a, spec);
    std::vector<double> row_l(spec.nxl()), row_f(spec.nxf());
    for (int xn = 0; xn < spec.nxl(); ++xn) row_l[xn] = spec.q_l(x_l, a_l, a_f, xn);
    for (int xn = 0; xn < spec.nxf(); ++xn) row_f[xn] = spec.q_f(x_f, a_l, a_f, xn);
    x_l = detail::sample(row_l, rng);
    x_f = detail::sample(row_f, rng);
    x_f_history.push_back(x_f);
  }
  return trace;
}

struct MonteCarloStats {
  // Means and standard errors of the discounted return, conditioned on the
  // sampled initial private state of the respective player.
  std::vector<double> mean_l, se_l, mean_f, se_f;
  std::vector<long> count_l, count_f;
  long episodes = 0;
};

inline MonteCarloStats monte_carlo_value(const StrategyEvaluator& ev,
                                         const GameSpec& spec, long num_episodes,
                                         std::uint64_t seed) {
  MonteCarloStats st;
  st.mean_l.assign(spec.nxl(), 0.0);
  st.se_l.assign(spec.nxl(), 0.0);
  st.mean_f.assign(spec.nxf(), 0.0);
  st.se_f.assign(spec.nxf(), 0.0);
  st.count_l.assign(spec.nxl(), 0);
  st.count_f.assign(spec.nxf(), 0);
  std::vector<double> sum_l(spec.nxl(), 0.0), sq_l(spec.nxl(), 0.0);
  std::vector<double> sum_f(spec.nxf(), 0.0), sq_f(spec.nxf(), 0.0);
  for (long e = 0; e < num_episodes; ++e) {
    const EpisodeTrace tr = simulate_episode(ev, spec, seed + (std::uint64_t)e);
    const int xl0 = tr.steps.front().x_l;
    const int xf0 = tr.steps.front().x_f;
    sum_l[xl0] += tr.discounted_l;
    sq_l[xl0] += tr.discounted_l * tr.discounted_l;
    ++st.count_l[xl0];
    sum_f[xf0] += tr.discounted_f;
    sq_f[xf0] += tr.discounted_f * tr.discounted_f;
    ++st.count_f[xf0];
  }
  st.episodes = num_episodes;
  auto finish = [](const std::vector<double>& sum, const std::vector<double>& sq,
                   const std::vector<long>& n, std::vector<double>& mean,
                   std::vector<double>& se) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      if (n[i] == 0) continue;
      mean[i] = sum[i] / n[i];
      const double var =
          n[i] > 1 ? std::max(0.0, (sq[i] - n[i] * mean[i] * mean[i]) / (n[i] - 1))
                   : 0.0;
      se[i] = std::sqrt(var / n[i]);
    }
  };
  finish(sum_l, sq_l, st.count_l, st.mean_l, st.se_l);
  finish(sum_f, sq_f, st.count_f, st.mean_f, st.se_f);
  return st;
}

namespace detail {

// Exact follower reward-to-go along the constructed profile. maximize=true
// takes the best follower action at every (public history, own type) node,
// which realizes the maximum over all pure history-dependent follower
// strategies (the objective is additive across disjoint histories);
// maximize=false follows the equilibrium prescriptions.
inline double follower_value_exact_rec(const StrategyEvaluator& ev,
                                       const GameSpec& spec, int t,
                                       const BeliefPair& mu, int x_f,
                                       bool maximize) {
  if (t > ev.horizon) return 0.0;
  const PrescriptionPair gamma = ev.prescriptions(t, mu);
  std::vector<double> action_value(spec.naf(), 0.0);
  for (int af = 0; af < spec.naf(); ++af) {
    double v = 0.0;
    for (int al = 0; al < spec.nal(); ++al) {
      double w = 0.0, r = 0.0;
      for (int xl = 0; xl < spec.nxl(); ++xl) {
        const double ww = mu.pi_l[xl] * gamma.gamma_l.at(xl, al);
        w += ww;
        r += ww * spec.rf(t, xl, x_f, al, af);
      }
      v += r;
      if (w > 0.0 && spec.delta > 0.0 && t < ev.horizon) {
        const BeliefPair next = update_pair(mu, gamma, {al, af}, spec);
        double cont = 0.0;
        for (int xn = 0; xn < spec.nxf(); ++xn) {
          const double q = spec.q_f(x_f, al, af, xn);
          if (q > 0.0)
            cont += q * follower_value_exact_rec(ev, spec, t + 1, next, xn,
                                                 maximize);
        }
        v += w * spec.delta * cont;
      }
    }
    action_value[af] = v;
  }
  if (maximize) {
    double best = action_value[0];
    for (double v : action_value) best = std::max(best, v);
    return best;
  }
  double v = 0.0;
  for (int af = 0; af < spec.naf(); ++af)
    v += gamma.gamma_f.at(x_f, af) * action_value[af];
  return v;
}

}  // namespace detail

// Value of the follower's best pure history-dependent deviation against the
// constructed leader strategy, starting from the prior belief and type x_f.
inline double max_follower_deviation_value(const StrategyEvaluator& ev,
                                           const GameSpec& spec, int x_f) {
  return detail::follower_value_exact_rec(ev, spec, 1, ev.initial_belief(), x_f,
                                          /*maximize=*/true);
}

// Exact follower value under the constructed equilibrium profile.
inline double equilibrium_follower_value_exact(const StrategyEvaluator& ev,
                                               const GameSpec& spec, int x_f) {
  return detail::follower_value_exact_rec(ev, spec, 1, ev.initial_belief(), x_f,
                                          /*maximize=*/false);
}

}  // namespace dynstack

#endif  // DYNSTACK_FORWARD_HPP
