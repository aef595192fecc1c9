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

#ifndef DYNSTACK_BELIEF_HPP
#define DYNSTACK_BELIEF_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dynstack/game.hpp"
#include "dynstack/prescription.hpp"

namespace dynstack {

// Public posterior over one player's private state.
struct Belief {
  std::vector<double> p;

  Belief() = default;
  explicit Belief(std::vector<double> probs) : p(std::move(probs)) {}
  static Belief point_mass(int n, int x) {
    Belief b;
    b.p.assign(n, 0.0);
    b.p[x] = 1.0;
    return b;
  }
  static Belief uniform(int n) {
    Belief b;
    b.p.assign(n, 1.0 / n);
    return b;
  }

  int size() const { return static_cast<int>(p.size()); }
  double operator[](int x) const { return p[x]; }
  double sum() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
  }
  bool valid(double tol = kProbTol) const {
    for (double v : p)
      if (v < 0.0) return false;
    return std::fabs(sum() - 1.0) <= tol;
  }

  bool operator==(const Belief&) const = default;
};

struct BeliefPair {
  Belief pi_l;
  Belief pi_f;
  bool operator==(const BeliefPair&) const = default;
};

struct DegenerateObservation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One player's factorized Bayes update F^i(pi, gamma, a).
// The normalizer sum_x pi(x) gamma(a^i|x) conditions only on the player's own
// action coordinate; kernels depend on the full joint action. A normalizer
// below kProbTol triggers the prediction-only update sum_x pi(x) Q(x'|x,a).
inline Belief update_player(const Belief& pi, const Prescription& gamma,
                            JointAction a, const Kernel& kernel, Player own) {
  const int n = pi.size();
  if (gamma.n_states != n || kernel.n_states != n)
    throw DimensionError("update_player: belief/prescription/kernel sizes differ");
  const int own_a = own == Player::leader ? a.leader : a.follower;
  if (own_a < 0 ||
      own_a >= gamma.n_actions)
    throw DimensionError("update_player: action index out of range");

  Belief out;
  out.p.assign(n, 0.0);
  double denom = 0.0;
  for (int x = 0; x < n; ++x) denom += pi[x] * gamma.at(x, own_a);
  if (denom < kProbTol) {
    for (int x = 0; x < n; ++x)
      for (int xn = 0; xn < n; ++xn)
        out.p[xn] += pi[x] * kernel(x, a.leader, a.follower, xn);
  } else {
    for (int x = 0; x < n; ++x) {
      const double w = pi[x] * gamma.at(x, own_a);
      if (w == 0.0) continue;
      for (int xn = 0; xn < n; ++xn)
        out.p[xn] += w * kernel(x, a.leader, a.follower, xn);
    }
  }
  double s = out.sum();
  if (s <= 0.0) throw DegenerateObservation("update_player: zero posterior mass");
  for (double& v : out.p) v /= s;
  return out;
}

// Factorized pair update: each component conditions on its own action through
// its own prescription only.
inline BeliefPair update_pair(const BeliefPair& pair,
                              const PrescriptionPair& gammas, JointAction a,
                              const GameSpec& spec) {
  return {update_player(pair.pi_l, gammas.gamma_l, a, spec.q_l, Player::leader),
          update_player(pair.pi_f, gammas.gamma_f, a, spec.q_f, Player::follower)};
}

// Exact un-factorized Bayes update over joint states (x_l, x_f), used as the
// testing oracle for the factorization. Joint index = x_l * nxf + x_f.
inline std::vector<double> joint_oracle_update(const std::vector<double>& joint_pi,
                                               const PrescriptionPair& gammas,
                                               JointAction a,
                                               const GameSpec& spec) {
  const int nl = spec.nxl(), nf = spec.nxf();
  if ((int)joint_pi.size() != nl * nf)
    throw DimensionError("joint_oracle_update: joint distribution size mismatch");
  std::vector<double> out(static_cast<std::size_t>(nl) * nf, 0.0);
  double norm = 0.0;
  for (int xl = 0; xl < nl; ++xl)
    for (int xf = 0; xf < nf; ++xf) {
      const double w = joint_pi[xl * nf + xf] *
                       gammas.gamma_l.at(xl, a.leader) *
                       gammas.gamma_f.at(xf, a.follower);
      if (w == 0.0) continue;
      norm += w;
      for (int xln = 0; xln < nl; ++xln) {
        const double wl = w * spec.q_l(xl, a.leader, a.follower, xln);
        if (wl == 0.0) continue;
        for (int xfn = 0; xfn < nf; ++xfn)
          out[xln * nf + xfn] += wl * spec.q_f(xf, a.leader, a.follower, xfn);
      }
    }
  if (norm < kProbTol)
    throw DegenerateObservation("joint_oracle_update: zero normalizer");
  double s = 0.0;
  for (double v : out) s += v;
  for (double& v : out) v /= s;
  return out;
}

}  // namespace dynstack

#endif  // DYNSTACK_BELIEF_HPP
