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

#include <cstdio>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "dynstack/backward.hpp"
#include "test_util.hpp"

using namespace dynstack;
using namespace dynstack::testutil;

namespace {

GameSpec finite_security(int horizon) {
  GameSpec g = example_security_game();
  g.horizon = horizon;
  return g;
}

int point_mass_cell(const BeliefGrid& grid, double pi_high) {
  return grid.nearest_pair_index(
      {Belief({1.0}), Belief({1.0 - pi_high, pi_high})});
}

}  // namespace

TEST_CASE("horizon-1 recursion reduces to the stage solution") {
  const GameSpec g = finite_security(1);
  const BeliefGrid grid = build_grid(g, 10);
  const BackwardResult res = backward_recursion(g, grid);
  CHECK(res.failures.empty());
  CHECK(res.policy.horizon() == 1);
  for (int c = 0; c < grid.pair_count(); c += 3) {
    const StageSolution sol = solve_stage(grid.pair_at(c), nullptr, nullptr, g);
    CHECK(res.v_l.at(1, c, 0) == Catch::Approx(sol.v_l[0]).margin(1e-12));
    for (int xf = 0; xf < 2; ++xf)
      CHECK(res.v_f.at(1, c, xf) == Catch::Approx(sol.v_f[xf]).margin(1e-12));
  }
}

TEST_CASE("terminal slice stays identically zero") {
  const GameSpec g = finite_security(2);
  const BeliefGrid grid = build_grid(g, 5);
  const BackwardResult res = backward_recursion(g, grid);
  for (double v : res.v_l.values[2]) CHECK(v == 0.0);
  for (double v : res.v_f.values[2]) CHECK(v == 0.0);
}

TEST_CASE("point-mass beliefs are absorbing, so values compound geometrically") {
  // Static follower type: at a point-mass belief the public posterior never
  // moves, so the T-step value is the stage value times (1 + d + ... ).
  const int T = 3;
  const GameSpec g = finite_security(T);
  const BeliefGrid grid = build_grid(g, 20);
  const BackwardResult res = backward_recursion(g, grid);
  CHECK(res.failures.empty());

  const double geo = 1.0 + 0.6 + 0.36;
  const int high = point_mass_cell(grid, 1.0);
  CHECK(res.v_l.at(1, high, 0) == Catch::Approx(3.0 * geo).margin(1e-6));
  const int low = point_mass_cell(grid, 0.0);
  CHECK(res.v_l.at(1, low, 0) == Catch::Approx((11.0 / 3.0) * geo).margin(6e-3));
}

TEST_CASE("one more stage never hurts the leader at a point mass") {
  const BeliefGrid grid = build_grid(finite_security(3), 10);
  const BackwardResult res = backward_recursion(finite_security(3), grid);
  const int low = point_mass_cell(grid, 0.0);
  CHECK(res.v_l.at(1, low, 0) >= res.v_l.at(2, low, 0) - 1e-9);
  CHECK(res.v_l.at(2, low, 0) >= res.v_l.at(3, low, 0) - 1e-9);
}

TEST_CASE("random finite games solve every cell") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 5; ++k) {
    const GameSpec g = random_game(2, 2, 2, 2, rng, /*random_rewards=*/true);
    const BeliefGrid grid = build_grid(g, 4);
    StageParams params;
    params.leader_resolution = 10;
    params.refine = false;
    const BackwardResult res = backward_recursion(g, grid, params);
    CHECK(res.failures.empty());
    for (int t = 1; t <= g.horizon; ++t)
      for (int c = 0; c < grid.pair_count(); ++c) {
        CHECK(res.policy.at(t, c).converged);
        CHECK(res.policy.at(t, c).gamma.gamma_l.row_stochastic());
        CHECK(res.policy.at(t, c).gamma.gamma_f.row_stochastic());
      }
  }
}

TEST_CASE("multithreaded recursion matches the sequential result") {
  std::mt19937_64 rng(22);
  const GameSpec g = random_game(2, 2, 2, 2, rng, /*random_rewards=*/true);
  const BeliefGrid grid = build_grid(g, 4);
  StageParams params;
  params.leader_resolution = 10;
  params.refine = false;
  const BackwardResult seq = backward_recursion(g, grid, params, 0.05, 1);
  const BackwardResult par = backward_recursion(g, grid, params, 0.05, 4);
  CHECK(seq.v_l.values == par.v_l.values);
  CHECK(seq.v_f.values == par.v_f.values);
  for (int t = 1; t <= g.horizon; ++t)
    for (int c = 0; c < grid.pair_count(); ++c)
      CHECK(seq.policy.at(t, c).gamma == par.policy.at(t, c).gamma);
}

TEST_CASE("solved tables survive a save/load round trip") {
  const GameSpec g = finite_security(2);
  const BeliefGrid grid = build_grid(g, 5);
  const BackwardResult res = backward_recursion(g, grid);
  const std::string path = "tables_roundtrip.txt";
  save_tables(path, g, grid, res.policy, res.v_l, res.v_f);
  const LoadedTables back = load_tables(path);
  std::remove(path.c_str());
  CHECK(back.grid.pair_count() == grid.pair_count());
  REQUIRE(back.v_l.values.size() == res.v_l.values.size());
  for (std::size_t s = 0; s < res.v_l.values.size(); ++s) {
    CHECK(back.v_l.values[s] == res.v_l.values[s]);
    CHECK(back.v_f.values[s] == res.v_f.values[s]);
  }
  REQUIRE(back.policy.horizon() == res.policy.horizon());
  for (int t = 1; t <= res.policy.horizon(); ++t)
    for (int c = 0; c < grid.pair_count(); ++c) {
      CHECK(back.policy.at(t, c).gamma == res.policy.at(t, c).gamma);
      CHECK(back.policy.at(t, c).converged == res.policy.at(t, c).converged);
    }
}

TEST_CASE("infinite-horizon input is rejected") {
  const GameSpec g = example_security_game();
  const BeliefGrid grid = build_grid(g, 5);
  CHECK_THROWS_AS(backward_recursion(g, grid), std::invalid_argument);
}
