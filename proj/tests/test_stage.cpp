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

#include "dynstack/stage.hpp"
#include "test_util.hpp"

using namespace dynstack;
using namespace dynstack::testutil;

namespace {

// Independent spelled-out sums over (x_l, a_l, a_f), with a continuation that
// is constant in the belief (c_f[x'] for the follower, c_l[x'] for the leader)
// so it can be computed without any belief update.
double follower_value_by_sum(const BeliefPair& pair, const Prescription& gl,
                             const std::vector<double>& gf_row, int x_f,
                             const std::vector<double>& c_f,
                             const GameSpec& spec) {
  double total = 0.0;
  for (int af = 0; af < spec.naf(); ++af)
    for (int al = 0; al < spec.nal(); ++al)
      for (int xl = 0; xl < spec.nxl(); ++xl) {
        double v = spec.rf(1, xl, x_f, al, af);
        if (!c_f.empty()) {
          double cont = 0.0;
          for (int xn = 0; xn < spec.nxf(); ++xn)
            cont += spec.q_f(x_f, al, af, xn) * c_f[xn];
          v += spec.delta * cont;
        }
        total += pair.pi_l[xl] * gl.at(xl, al) * gf_row[af] * v;
      }
  return total;
}

double leader_value_by_sum(const BeliefPair& pair, const Prescription& gl,
                           const Prescription& gf, int x_l,
                           const std::vector<double>& c_l,
                           const GameSpec& spec) {
  double total = 0.0;
  for (int al = 0; al < spec.nal(); ++al)
    for (int af = 0; af < spec.naf(); ++af)
      for (int xf = 0; xf < spec.nxf(); ++xf) {
        double v = spec.rl(1, x_l, xf, al, af);
        if (!c_l.empty()) {
          double cont = 0.0;
          for (int xn = 0; xn < spec.nxl(); ++xn)
            cont += spec.q_l(x_l, al, af, xn) * c_l[xn];
          v += spec.delta * cont;
        }
        total += gl.at(x_l, al) * pair.pi_f[xf] * gf.at(xf, af) * v;
      }
  return total;
}

BeliefPair security_pair(double pi_high) {
  return {Belief({1.0}), Belief({1.0 - pi_high, pi_high})};
}

}  // namespace

TEST_CASE("follower stage objective matches a spelled-out sum") {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 100; ++k) {
    const GameSpec g = random_game(2, 2, 2, 2, rng, /*random_rewards=*/true);
    const BeliefPair pair{Belief(random_distribution(2, rng)),
                          Belief(random_distribution(2, rng))};
    const Prescription gl = random_prescription(2, 2, rng);
    const Prescription gf = random_prescription(2, 2, rng);
    for (int xf = 0; xf < 2; ++xf) {
      const double got = follower_stage_objective(pair, gl, gf.row(xf), gf, xf,
                                                  nullptr, g);
      const double want =
          follower_value_by_sum(pair, gl, gf.row(xf), xf, {}, g);
      REQUIRE(got == Catch::Approx(want).margin(1e-12));
    }
  }
}

TEST_CASE("leader stage objective matches a spelled-out sum") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const GameSpec g = random_game(2, 2, 2, 2, rng, /*random_rewards=*/true);
    const BeliefPair pair{Belief(random_distribution(2, rng)),
                          Belief(random_distribution(2, rng))};
    const Prescription gl = random_prescription(2, 2, rng);
    const Prescription gf = random_prescription(2, 2, rng);
    const auto got = leader_stage_objective(pair, gl, gf, nullptr, g);
    for (int xl = 0; xl < 2; ++xl)
      REQUIRE(got[xl] ==
              Catch::Approx(leader_value_by_sum(pair, gl, gf, xl, {}, g))
                  .margin(1e-12));
  }
}

TEST_CASE("belief-constant continuations match a spelled-out sum") {
  std::mt19937_64 rng(12);
  const std::vector<double> c_f{0.7, -1.3}, c_l{2.0, 0.4};
  const ContinuationValue vf = [&](const BeliefPair&, int x) { return c_f[x]; };
  const ContinuationValue vl = [&](const BeliefPair&, int x) { return c_l[x]; };
  for (int k = 0; k < 50; ++k) {
    const GameSpec g = random_game(2, 2, 2, 2, rng, /*random_rewards=*/true);
    const BeliefPair pair{Belief(random_distribution(2, rng)),
                          Belief(random_distribution(2, rng))};
    const Prescription gl = random_prescription(2, 2, rng);
    const Prescription gf = random_prescription(2, 2, rng);
    for (int xf = 0; xf < 2; ++xf)
      REQUIRE(follower_stage_objective(pair, gl, gf.row(xf), gf, xf, vf, g) ==
              Catch::Approx(follower_value_by_sum(pair, gl, gf.row(xf), xf, c_f, g))
                  .margin(1e-12));
    const auto lv = leader_stage_objective(pair, gl, gf, vl, g);
    for (int xl = 0; xl < 2; ++xl)
      REQUIRE(lv[xl] ==
              Catch::Approx(leader_value_by_sum(pair, gl, gf, xl, c_l, g))
                  .margin(1e-12));
  }
}

TEST_CASE("follower best response beats every pure alternative") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    const GameSpec g = random_game(1 + (int)(rng() % 2), 2, 2, 2, rng,
                                   /*random_rewards=*/true);
    const BeliefPair pair{Belief(random_distribution(g.nxl(), rng)),
                          Belief(random_distribution(2, rng))};
    const Prescription gl = random_prescription(g.nxl(), 2, rng);
    const Prescription br = follower_best_response(pair, gl, nullptr, g);
    for (int xf = 0; xf < 2; ++xf) {
      const double own =
          follower_stage_objective(pair, gl, br.row(xf), br, xf, nullptr, g);
      for (int a = 0; a < 2; ++a) {
        std::vector<double> row(2, 0.0);
        row[a] = 1.0;
        const double alt =
            follower_stage_objective(pair, gl, row, br, xf, nullptr, g);
        REQUIRE(own >= alt - 1e-9);
      }
    }
  }
}

TEST_CASE("pure leader commitments pin down the follower response") {
  const GameSpec g = example_security_game();
  const BeliefPair pair = security_pair(0.0);

  // All of D1: the weak type prefers A1 (1 > 0), the strong type always A1.
  Prescription d1 = Prescription::pure(2, {0});
  Prescription br = follower_best_response(pair, d1, nullptr, g);
  CHECK(br.at(0, 0) == 1.0);
  CHECK(br.at(1, 0) == 1.0);

  // All of D2: the weak type prefers A2 (2 > 0); the strong type is
  // indifferent (1 = 1) and the leader-favorable tie picks A2 (1 > 0).
  Prescription d2 = Prescription::pure(2, {1});
  br = follower_best_response(pair, d2, nullptr, g);
  CHECK(br.at(0, 1) == 1.0);
  CHECK(br.at(1, 1) == 1.0);
}

TEST_CASE("indifference at the threshold is broken by the tie rule") {
  const GameSpec g = example_security_game();
  const BeliefPair pair = security_pair(0.0);
  // P(D1) = 2/3 makes the weak type indifferent (both actions worth 2/3).
  Prescription gl = Prescription::uniform(1, 2);
  gl.set_row(0, {2.0 / 3.0, 1.0 / 3.0});

  const Prescription fav = follower_best_response(pair, gl, nullptr, g);
  CHECK(fav.at(0, 1) == 1.0);  // A2 earns the leader 11/3 against 5/3

  const Prescription pes = follower_best_response(pair, gl, nullptr, g, 1e-9,
                                                  100, TieBreak::pessimistic);
  CHECK(pes.at(0, 0) == 1.0);
}

TEST_CASE("stage solution against the weak type reaches 11/3") {
  const GameSpec g = example_security_game();
  const StageSolution sol =
      solve_stage(security_pair(0.0), nullptr, nullptr, g);
  CHECK(sol.converged);
  CHECK(sol.v_l[0] == Catch::Approx(11.0 / 3.0).margin(2e-3));
  // The optimum sits at the indifference threshold with the tie going to A2.
  CHECK(sol.gamma_l.at(0, 0) == Catch::Approx(2.0 / 3.0).margin(2e-3));
  CHECK(sol.gamma_f.at(0, 1) == 1.0);
}

TEST_CASE("stage solution against the strong type is pure D1 worth 3") {
  const GameSpec g = example_security_game();
  const StageSolution sol =
      solve_stage(security_pair(1.0), nullptr, nullptr, g);
  CHECK(sol.converged);
  CHECK(sol.v_l[0] == Catch::Approx(3.0).margin(1e-9));
  CHECK(sol.gamma_l.at(0, 0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(sol.gamma_f.at(1, 0) == 1.0);
}

TEST_CASE("stage solution at the uniform prior reaches 17/6") {
  // 0.5 * (3 + p) + 0.5 * 3p maximized at the threshold p = 2/3.
  const GameSpec g = example_security_game();
  const StageSolution sol =
      solve_stage(security_pair(0.5), nullptr, nullptr, g);
  CHECK(sol.v_l[0] == Catch::Approx(17.0 / 6.0).margin(2e-3));
}

TEST_CASE("follower backup equals the spelled-out value at the solution") {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 20; ++k) {
    const GameSpec g = random_game(1, 2, 2, 2, rng, /*random_rewards=*/true);
    const BeliefPair pair{Belief({1.0}), Belief(random_distribution(2, rng))};
    StageParams params;
    params.leader_resolution = 20;
    params.refine = false;
    const StageSolution sol = solve_stage(pair, nullptr, nullptr, g, params);
    for (int xf = 0; xf < 2; ++xf)
      REQUIRE(sol.v_f[xf] ==
              Catch::Approx(follower_value_by_sum(
                                pair, sol.gamma_l, sol.gamma_f.row(xf), xf, {}, g))
                  .margin(1e-12));
  }
}

TEST_CASE("stage value dominates every sampled leader commitment") {
  std::mt19937_64 rng(15);
  for (int k = 0; k < 20; ++k) {
    const GameSpec g = random_game(1, 2, 2, 2, rng, /*random_rewards=*/true);
    const BeliefPair pair{Belief({1.0}), Belief(random_distribution(2, rng))};
    const StageSolution sol = solve_stage(pair, nullptr, nullptr, g);
    for (int step = 0; step <= 10; ++step) {
      Prescription gl = Prescription::uniform(1, 2);
      gl.set_row(0, {step / 10.0, 1.0 - step / 10.0});
      const Prescription br = follower_best_response(pair, gl, nullptr, g);
      const auto lv = leader_stage_objective(pair, gl, br, nullptr, g);
      REQUIRE(sol.v_l[0] >= lv[0] - 1e-9);
    }
  }
}

TEST_CASE("solve_stage is deterministic") {
  std::mt19937_64 rng(16);
  const GameSpec g = random_game(2, 2, 2, 2, rng, /*random_rewards=*/true);
  const BeliefPair pair{Belief(random_distribution(2, rng)),
                        Belief(random_distribution(2, rng))};
  StageParams params;
  params.leader_resolution = 10;
  const StageSolution a = solve_stage(pair, nullptr, nullptr, g, params);
  const StageSolution b = solve_stage(pair, nullptr, nullptr, g, params);
  CHECK(a.gamma_l == b.gamma_l);
  CHECK(a.gamma_f == b.gamma_f);
  CHECK(a.v_l == b.v_l);
  CHECK(a.v_f == b.v_f);
}

TEST_CASE("dimension mismatches are rejected") {
  const GameSpec g = example_security_game();
  const BeliefPair pair = security_pair(0.5);
  const Prescription wrong = Prescription::uniform(3, 2);
  CHECK_THROWS_AS(
      leader_stage_objective(pair, wrong, Prescription::uniform(2, 2), nullptr, g),
      DimensionError);
  CHECK_THROWS_AS(
      follower_stage_objective(pair, Prescription::uniform(1, 2),
                               {0.5, 0.25, 0.25}, Prescription::uniform(2, 2), 0,
                               nullptr, g),
      DimensionError);
}
