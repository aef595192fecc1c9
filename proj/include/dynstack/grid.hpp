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

#ifndef DYNSTACK_GRID_HPP
#define DYNSTACK_GRID_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "dynstack/belief.hpp"
#include "dynstack/prescription.hpp"

namespace dynstack {

// Simplex lattice over one player's belief space: points k/G with integer
// coordinates summing to G, lexicographic order.
struct SimplexGrid {
  int dim = 0;
  int resolution = 0;
  std::vector<std::vector<int>> points;
  std::map<std::vector<int>, int> index;

  static SimplexGrid build(int dim, int resolution,
                           std::uint64_t cap = 50'000'000) {
    if (resolution < 1) throw std::invalid_argument("grid resolution must be >= 1");
    if (binomial(resolution + dim - 1, dim - 1) > cap)
      throw TooLargeError("belief grid exceeds the configured cap");
    SimplexGrid g;
    g.dim = dim;
    g.resolution = resolution;
    g.points = compositions(resolution, dim);
    for (int i = 0; i < (int)g.points.size(); ++i) g.index[g.points[i]] = i;
    return g;
  }

  int size() const { return static_cast<int>(points.size()); }
  Belief belief_at(int i) const {
    Belief b;
    b.p.resize(dim);
    for (int j = 0; j < dim; ++j)
      b.p[j] = static_cast<double>(points[i][j]) / resolution;
    return b;
  }
  int index_of(const std::vector<int>& pt) const {
    auto it = index.find(pt);
    if (it == index.end()) throw std::out_of_range("lattice point not in grid");
    return it->second;
  }
};

struct GridVertex {
  int index;
  double weight;
};

namespace detail {

// Clamp tiny negative drift and renormalize so queries stay on the simplex.
inline std::vector<double> clamp_to_simplex(const std::vector<double>& p) {
  std::vector<double> q(p);
  double s = 0.0;
  for (double& v : q) {
    if (v < 0.0) v = 0.0;
    s += v;
  }
  if (s <= 0.0) throw std::invalid_argument("belief with no mass");
  for (double& v : q) v /= s;
  return q;
}

}  // namespace detail

// Freudenthal simplex interpolation weights (at most dim vertices, weights
// nonnegative and summing to 1; exact on affine functions of the belief).
inline std::vector<GridVertex> barycentric_weights(const SimplexGrid& grid,
                                                   const Belief& belief) {
  const int d = grid.dim;
  const int G = grid.resolution;
  const std::vector<double> p = detail::clamp_to_simplex(belief.p);
  if ((int)p.size() != d)
    throw DimensionError("barycentric_weights: belief dimension mismatch");
  if (d == 1) return {{0, 1.0}};

  // Cumulative-sum coordinates y_j = G * sum_{i>=j} p_i; y_0 = G, y_d = 0.
  std::vector<double> y(d + 1, 0.0);
  for (int j = d - 1; j >= 0; --j) y[j] = y[j + 1] + G * p[j];
  y[0] = static_cast<double>(G);

  std::vector<int> base(d + 1, 0);
  std::vector<double> frac(d + 1, 0.0);
  base[0] = G;
  for (int j = 1; j < d; ++j) {
    base[j] = static_cast<int>(std::floor(y[j]));
    frac[j] = y[j] - base[j];
    if (frac[j] > 1.0 - 1e-13) {  // absorb float drift at cell boundaries
      base[j] += 1;
      frac[j] = 0.0;
    }
    if (frac[j] < 1e-13) frac[j] = 0.0;
    base[j] = std::clamp(base[j], 0, base[j - 1]);
  }

  // Sort interior coordinates by descending fractional part.
  std::vector<int> order(d - 1);
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });

  std::vector<GridVertex> out;
  std::vector<int> v(base.begin(), base.end());
  auto emit = [&](double w) {
    if (w <= 0.0) return;
    std::vector<int> pt(d);
    for (int j = 0; j < d; ++j) pt[j] = v[j] - v[j + 1];
    out.push_back({grid.index_of(pt), w});
  };
  emit(1.0 - frac[order[0]]);
  for (int k = 0; k < d - 1; ++k) {
    const int j = order[k];
    v[j] += 1;
    const double next = (k + 1 < d - 1) ? frac[order[k + 1]] : 0.0;
    emit(frac[j] - next);
  }
  return out;
}

// Single best lattice point for a query belief: the max-weight Freudenthal
// vertex (lowest index on ties).
inline int nearest_index(const SimplexGrid& grid, const Belief& belief) {
  auto w = barycentric_weights(grid, belief);
  int best = w[0].index;
  double bw = w[0].weight;
  for (const auto& vw : w)
    if (vw.weight > bw + 1e-15 || (std::fabs(vw.weight - bw) <= 1e-15 && vw.index < best)) {
      best = vw.index;
      bw = vw.weight;
    }
  return best;
}

// Product grid over the two players' belief simplices.
struct BeliefGrid {
  SimplexGrid leader;
  SimplexGrid follower;

  int pair_count() const { return leader.size() * follower.size(); }
  int pair_index(int il, int jf) const { return il * follower.size() + jf; }
  BeliefPair pair_at(int idx) const {
    return {leader.belief_at(idx / follower.size()),
            follower.belief_at(idx % follower.size())};
  }
  int nearest_pair_index(const BeliefPair& pair) const {
    return pair_index(nearest_index(leader, pair.pi_l),
                      nearest_index(follower, pair.pi_f));
  }
};

inline BeliefGrid build_grid(const GameSpec& spec, int resolution,
                             std::uint64_t cap = 50'000'000) {
  BeliefGrid g;
  g.leader = SimplexGrid::build(spec.nxl(), resolution, cap);
  g.follower = SimplexGrid::build(spec.nxf(), resolution, cap);
  if (static_cast<std::uint64_t>(g.leader.size()) * g.follower.size() > cap)
    throw TooLargeError("belief pair grid exceeds the configured cap");
  return g;
}

// V^i_t(pi, x) tabulated on the pair grid. Slice t (1-based) runs 1..T+1 for
// the finite horizon; a single slice for the infinite-horizon solver.
struct ValueTable {
  int n_private = 0;
  // values[t-1][pair_index * n_private + x]
  std::vector<std::vector<double>> values;

  static ValueTable zeros(int slices, int pair_count, int n_private) {
    ValueTable v;
    v.n_private = n_private;
    v.values.assign(slices, std::vector<double>(
                                static_cast<std::size_t>(pair_count) * n_private,
                                0.0));
    return v;
  }
  double at(int t, int pair, int x) const {
    return values[t - 1][static_cast<std::size_t>(pair) * n_private + x];
  }
  double& set(int t, int pair, int x) {
    return values[t - 1][static_cast<std::size_t>(pair) * n_private + x];
  }
};

// Multilinear interpolation: Freudenthal per player, tensor product across
// players. Exact at grid points.
inline double interpolate_value(const ValueTable& table, const BeliefGrid& grid,
                                int t, const BeliefPair& pair, int x) {
  const auto wl = barycentric_weights(grid.leader, pair.pi_l);
  const auto wf = barycentric_weights(grid.follower, pair.pi_f);
  double v = 0.0;
  for (const auto& a : wl)
    for (const auto& b : wf)
      v += a.weight * b.weight * table.at(t, grid.pair_index(a.index, b.index), x);
  return v;
}

// Nearest-neighbor lookup, for diagnosing interpolation artifacts.
inline double nearest_value(const ValueTable& table, const BeliefGrid& grid,
                            int t, const BeliefPair& pair, int x) {
  return table.at(t, grid.nearest_pair_index(pair), x);
}

struct PolicyEntry {
  PrescriptionPair gamma;
  bool converged = true;
  bool leader_warning = false;  // chosen gamma_l not optimal for every x_l
};

// theta_t[pi] on the grid.
struct PolicyTable {
  // entries[t-1][pair_index]
  std::vector<std::vector<PolicyEntry>> entries;

  const PolicyEntry& at(int t, int pair) const { return entries[t - 1][pair]; }
  PolicyEntry& set(int t, int pair) { return entries[t - 1][pair]; }
  int horizon() const { return static_cast<int>(entries.size()); }
};

}  // namespace dynstack

#endif  // DYNSTACK_GRID_HPP
