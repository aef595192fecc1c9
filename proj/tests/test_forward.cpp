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

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "dynstack/forward.hpp"
#include "test_util.hpp"

using namespace dynstack;
using namespace dynstack::testutil;

namespace {

GameSpec finite_security(int horizon) {
  GameSpec g = example_security_game();
  g.horizon = horizon;
  return g;
}

}  // namespace

TEST_CASE("strategy lookup returns the solved cell at the prior") {
  const GameSpec g = finite_security(1);
  const BeliefGrid grid = build_grid(g, 10);  // prior (0.5, 0.5) is a node
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev = construct_strategy(g, grid, res.policy, 1);
  const BeliefPair mu = ev.initial_belief();
  const int cell = grid.nearest_pair_index(mu);
  CHECK(ev.prescriptions(1, mu) == res.policy.at(1, cell).gamma);
  const auto row = ev.action_distribution(1, mu, Player::follower, 1);
  CHECK(row == res.policy.at(1, cell).gamma.gamma_f.row(1));
}

TEST_CASE("belief propagation matches the factorized update") {
  const GameSpec g = finite_security(2);
  const BeliefGrid grid = build_grid(g, 10);
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev = construct_strategy(g, grid, res.policy, 2);
  const BeliefPair mu = ev.initial_belief();
  const PrescriptionPair gamma = ev.prescriptions(1, mu);
  for (int al = 0; al < 2; ++al)
    for (int af = 0; af < 2; ++af)
      CHECK(ev.next_belief(1, mu, {al, af}) ==
            update_pair(mu, gamma, {al, af}, g));
}

TEST_CASE("querying past the horizon throws") {
  const GameSpec g = finite_security(1);
  const BeliefGrid grid = build_grid(g, 5);
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev = construct_strategy(g, grid, res.policy, 1);
  CHECK_THROWS_AS(ev.prescriptions(2, ev.initial_belief()), std::out_of_range);
}

TEST_CASE("a stationary policy slice serves every step") {
  const GameSpec g = finite_security(1);
  const BeliefGrid grid = build_grid(g, 5);
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev =
      construct_strategy(g, grid, res.policy, 10, /*stationary=*/true);
  const BeliefPair mu = ev.initial_belief();
  CHECK(ev.prescriptions(7, mu) == ev.prescriptions(1, mu));
}

TEST_CASE("episodes are reproducible from the seed") {
  const GameSpec g = finite_security(3);
  const BeliefGrid grid = build_grid(g, 10);
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev = construct_strategy(g, grid, res.policy, 3);
  const EpisodeTrace a = simulate_episode(ev, g, 12345);
  const EpisodeTrace b = simulate_episode(ev, g, 12345);
  REQUIRE(a.steps.size() == b.steps.size());
  CHECK(a.discounted_l == b.discounted_l);
  CHECK(a.discounted_f == b.discounted_f);
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].a_l == b.steps[i].a_l);
    CHECK(a.steps[i].a_f == b.steps[i].a_f);
    CHECK(a.steps[i].x_f == b.steps[i].x_f);
  }
  const EpisodeTrace c = simulate_episode(ev, g, 54321);
  bool differs = c.discounted_l != a.discounted_l ||
                 c.discounted_f != a.discounted_f;
  for (std::size_t i = 0; i < std::min(a.steps.size(), c.steps.size()); ++i)
    differs = differs || a.steps[i].a_l != c.steps[i].a_l ||
              a.steps[i].a_f != c.steps[i].a_f;
  CHECK(differs);
}

TEST_CASE("episode bookkeeping: rewards and discounting are consistent") {
  const GameSpec g = finite_security(3);
  const BeliefGrid grid = build_grid(g, 10);
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev = construct_strategy(g, grid, res.policy, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EpisodeTrace tr = simulate_episode(ev, g, seed);
    REQUIRE(tr.steps.size() == 3);
    double dl = 0.0, df = 0.0, disc = 1.0;
    for (const EpisodeStep& s : tr.steps) {
      CHECK(s.r_l == g.rl(s.t, s.x_l, s.x_f, s.a_l, s.a_f));
      CHECK(s.r_f == g.rf(s.t, s.x_l, s.x_f, s.a_l, s.a_f));
      dl += disc * s.r_l;
      df += disc * s.r_f;
      disc *= g.delta;
    }
    CHECK(tr.discounted_l == Catch::Approx(dl).margin(1e-12));
    CHECK(tr.discounted_f == Catch::Approx(df).margin(1e-12));
  }
}

TEST_CASE("Monte Carlo means agree with the solved tables at one step") {
  const GameSpec g = finite_security(1);
  const BeliefGrid grid = build_grid(g, 10);
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev = construct_strategy(g, grid, res.policy, 1);
  const int cell = grid.nearest_pair_index(ev.initial_belief());
  const MonteCarloStats st = monte_carlo_value(ev, g, 40000, 7);
  CHECK(st.mean_l[0] ==
        Catch::Approx(res.v_l.at(1, cell, 0)).margin(5 * st.se_l[0] + 1e-6));
  for (int xf = 0; xf < 2; ++xf)
    CHECK(st.mean_f[xf] ==
          Catch::Approx(res.v_f.at(1, cell, xf)).margin(5 * st.se_f[xf] + 1e-6));
}

TEST_CASE("exact follower values bracket the equilibrium play") {
  const GameSpec g = finite_security(2);
  const BeliefGrid grid = build_grid(g, 20);
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev = construct_strategy(g, grid, res.policy, 2);
  for (int xf = 0; xf < 2; ++xf) {
    const double eq = equilibrium_follower_value_exact(ev, g, xf);
    const double dev = max_follower_deviation_value(ev, g, xf);
    CHECK(dev >= eq - 1e-12);
  }
}

TEST_CASE("a forced deviation never beats the computed deviation bound") {
  const GameSpec g = finite_security(2);
  const BeliefGrid grid = build_grid(g, 20);
  const BackwardResult res = backward_recursion(g, grid);
  const StrategyEvaluator ev = construct_strategy(g, grid, res.policy, 2);
  for (int forced = 0; forced < 2; ++forced) {
    const FollowerOverride always = [forced](int, const std::vector<JointAction>&,
                                             const std::vector<int>&) {
      return forced;
    };
    // Condition on the initial type by averaging many episodes.
    std::vector<double> sum(2, 0.0);
    std::vector<long> count(2, 0);
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
      const EpisodeTrace tr = simulate_episode(ev, g, 1000000 + seed, &always);
      sum[tr.steps.front().x_f] += tr.discounted_f;
      ++count[tr.steps.front().x_f];
    }
    for (int xf = 0; xf < 2; ++xf) {
      const double mean = sum[xf] / count[xf];
      CHECK(mean <= max_follower_deviation_value(ev, g, xf) + 0.05);
    }
  }
}
