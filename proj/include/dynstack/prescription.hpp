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

#ifndef DYNSTACK_PRESCRIPTION_HPP
#define DYNSTACK_PRESCRIPTION_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynstack/game.hpp"

namespace dynstack {

struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// gamma : X^i -> Delta(A^i), row-stochastic table over actions.
struct Prescription {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> p;  // row-major, p[x * n_actions + a]

  static Prescription uniform(int n_states, int n_actions) {
    Prescription g;
    g.n_states = n_states;
    g.n_actions = n_actions;
    g.p.assign(static_cast<std::size_t>(n_states) * n_actions,
               1.0 / n_actions);
    return g;
  }

  // One action per state.
  static Prescription pure(int n_actions, const std::vector<int>& actions) {
    Prescription g;
    g.n_states = static_cast<int>(actions.size());
    g.n_actions = n_actions;
    g.p.assign(static_cast<std::size_t>(g.n_states) * n_actions, 0.0);
    for (int x = 0; x < g.n_states; ++x) g.p[x * n_actions + actions[x]] = 1.0;
    return g;
  }

  double at(int x, int a) const { return p[static_cast<std::size_t>(x) * n_actions + a]; }
  double& at(int x, int a) { return p[static_cast<std::size_t>(x) * n_actions + a]; }
  std::vector<double> row(int x) const {
    return {p.begin() + static_cast<std::size_t>(x) * n_actions,
            p.begin() + static_cast<std::size_t>(x + 1) * n_actions};
  }
  void set_row(int x, const std::vector<double>& r) {
    std::copy(r.begin(), r.end(), p.begin() + static_cast<std::size_t>(x) * n_actions);
  }
  bool row_stochastic(double tol = kProbTol) const {
    for (int x = 0; x < n_states; ++x) {
      double sum = 0.0;
      for (int a = 0; a < n_actions; ++a) {
        if (at(x, a) < 0.0) return false;
        sum += at(x, a);
      }
      if (std::fabs(sum - 1.0) > tol) return false;
    }
    return true;
  }

  bool operator==(const Prescription&) const = default;
  bool operator<(const Prescription& o) const { return p < o.p; }
};

struct PrescriptionPair {
  Prescription gamma_l;
  Prescription gamma_f;
  bool operator==(const PrescriptionPair&) const = default;
};

inline bool is_pure(const Prescription& gamma, double tol) {
  for (int x = 0; x < gamma.n_states; ++x) {
    bool found = false;
    for (int a = 0; a < gamma.n_actions; ++a)
      if (gamma.at(x, a) >= 1.0 - tol) found = true;
    if (!found) return false;
  }
  return true;
}

// All compositions (k_0,...,k_{n-1}) of total into n nonnegative parts,
// lexicographic.
inline std::vector<std::vector<int>> compositions(int total, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  auto rec = [&](auto&& self, int i, int rem) -> void {
    if (i == n - 1) {
      cur[i] = rem;
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= rem; ++k) {
      cur[i] = k;
      self(self, i + 1, rem - k);
    }
  };
  rec(rec, 0, total);
  return out;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

inline std::uint64_t simplex_lattice_count(int n_actions, int resolution) {
  return binomial(resolution + n_actions - 1, n_actions - 1);
}

// All prescriptions whose rows lie on the {k/M} simplex lattice,
// lexicographic in (row of state 0, row of state 1, ...).
inline std::vector<Prescription> enumerate_grid(int n_states, int n_actions,
                                                int resolution,
                                                std::uint64_t cap = 10'000'000) {
  if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
  const std::uint64_t per_row = simplex_lattice_count(n_actions, resolution);
  std::uint64_t total = 1;
  for (int s = 0; s < n_states; ++s) {
    if (total > cap / per_row + 1) total = cap + 1;
    else total *= per_row;
    if (total > cap)
      throw TooLargeError("prescription lattice has more than " +
                          std::to_string(cap) + " elements");
  }
  const auto rows = compositions(resolution, n_actions);
  std::vector<Prescription> out;
  out.reserve(total);
  std::vector<int> idx(n_states, 0);
  while (true) {
    Prescription g;
    g.n_states = n_states;
    g.n_actions = n_actions;
    g.p.reserve(static_cast<std::size_t>(n_states) * n_actions);
    for (int x = 0; x < n_states; ++x)
      for (int a = 0; a < n_actions; ++a)
        g.p.push_back(static_cast<double>(rows[idx[x]][a]) / resolution);
    out.push_back(std::move(g));
    int i = n_states - 1;
    while (i >= 0 && ++idx[i] == (int)rows.size()) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

}  // namespace dynstack

#endif  // DYNSTACK_PRESCRIPTION_HPP
