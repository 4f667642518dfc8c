#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "hyperteam/greedy.hpp"
#include "hyperteam/spectral.hpp"
#include "oracles.hpp"

using namespace hyperteam;

namespace {

ProblemInstance make(std::vector<int> budgets, std::vector<int> energies) {
  const int N = static_cast<int>(budgets.size()), K = static_cast<int>(energies.size());
  // Any valid allocation; the optimizers ignore it.
  Assignment a = Assignment::Zero(N, K);
  for (int k = 0; k < K; ++k) a(k % N, k) = 1;
  std::vector<std::string> agents, tasks;
  for (int i = 0; i < N; ++i) agents.push_back("a" + std::to_string(i));
  for (int k = 0; k < K; ++k) tasks.push_back("t" + std::to_string(k));
  return {agents, std::move(budgets), tasks, std::move(energies), a};
}

double oracle_score(const oracle::Grid& B, const std::vector<int>& E) {
  oracle::Grid sub;
  std::vector<int> sub_e;
  if (!oracle::active_part(B, E, sub, sub_e) || !oracle::connected(sub))
    return -std::numeric_limits<double>::infinity();
  return oracle::mu2(sub, sub_e);
}

// Best-first fill over every (agent, task) pair, written directly from the rule.
oracle::Grid oracle_phase1(oracle::Grid B, const std::vector<int>& budgets, const std::vector<int>& E, int h) {
  const int N = static_cast<int>(B.size()), K = static_cast<int>(E.size());
  auto used = [&](int j) { int s = 0; for (int k = 0; k < K; ++k) s += B[j][k]; return s; };
  auto need = [&](int k) { int s = 0; for (int j = 0; j < N; ++j) s += B[j][k]; return E[k] - s; };
  double current = oracle_score(B, E);
  for (;;) {
    bool open = false;
    for (int k = 0; k < K; ++k) open |= need(k) > 0;
    if (!open) return B;
    int bj = -1, bk = -1, bu = 0;
    double best_gain = 0.0, best_value = 0.0;
    for (int j = 0; j < N; ++j) {
      const int rem = budgets[j] - used(j);
      if (rem <= 0) continue;
      for (int k = 0; k < K; ++k) {
        if (need(k) <= 0) continue;
        const int u = std::min({rem, need(k), h});
        B[j][k] += u;
        const double v = oracle_score(B, E);
        B[j][k] -= u;
        const double g = (v - current) / u;
        if (bj < 0 || g > best_gain + 1e-9) {
          bj = j, bk = k, bu = u, best_gain = g, best_value = v;
        }
      }
    }
    REQUIRE(bj >= 0);
    B[bj][bk] += bu;
    current = best_value;
  }
}

}  // namespace

TEST_CASE("parameters") {
  GreedyParams p;
  CHECK_NOTHROW(p.check());
  p.h = 0;
  CHECK_THROWS(p.check());
  p = {};
  p.random_threshold = 0;
  CHECK_THROWS(p.check());
  CHECK(parse_phase1_order("per-task") == Phase1Order::per_task);
  CHECK(to_string(Phase1Order::global) == "global");
  CHECK_THROWS(parse_phase1_order("sideways"));
}

TEST_CASE("hub start") {
  SUBCASE("one hub covers everything") {
    const auto a = centralized_init(make({1, 6}, {1, 1, 1, 2}));
    CHECK(a.row(1).sum() == 4);
    CHECK(a.row(0).sum() == 0);
  }
  SUBCASE("two hubs share a task") {
    const auto a = centralized_init(make({5, 5}, {2, 1, 1, 1, 1, 1, 1, 1}));
    CHECK(a.row(0).sum() == 5);
    for (int k = 0; k < 5; ++k) CHECK(a(0, k) == 1);
    CHECK(a(1, 0) == 1);  // first of hub 0's tasks still short
    for (int k = 5; k < 8; ++k) CHECK(a(1, k) == 1);
    CHECK(is_connected(a));
  }
  SUBCASE("chain falls back to a touched task when none is short") {
    const auto a = centralized_init(make({3, 3}, {1, 1, 1, 1}));
    CHECK(a(1, 0) == 1);
    CHECK(a(1, 3) == 1);
  }
  SUBCASE("unit budgets cannot chain") {
    CHECK_THROWS_AS(centralized_init(make({1, 1}, {1, 1})), InstanceError);
  }
  SUBCASE("infeasible totals") {
    CHECK_THROWS_AS(centralized_init(make({1, 1}, {3})), InstanceError);
  }
}

TEST_CASE("phase 1 fills a single task from two agents") {
  const auto inst = make({1, 1}, {2});
  Rng rng(0);
  const auto a = phase1(inst, centralized_init(inst), {}, rng);
  CHECK(a(0, 0) == 1);
  CHECK(a(1, 0) == 1);
}

TEST_CASE("phase 1 matches a naive best-first scan") {
  std::mt19937 gen(12);
  std::uniform_int_distribution<int> budget(1, 4);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<int> budgets(12);
    for (auto& b : budgets) b = budget(gen);
    budgets[0] = 5;
    const int total = std::accumulate(budgets.begin(), budgets.end(), 0);
    std::vector<int> energies{total / 3, total / 3, total / 3 - 1};
    const auto inst = make(budgets, energies);
    const auto start = centralized_init(inst);
    Rng rng(0);
    const auto got = phase1(inst, start, {}, rng);
    const auto want = oracle_phase1(oracle::to_grid(start), budgets, energies, 1);
    CHECK(oracle::to_grid(got) == want);
    for (auto d : task_deficiency(got, energies)) CHECK(d <= 0);
  }
}

TEST_CASE("phase 1 stall keeps the partial allocation") {
  // hub 1 must chain through an already satisfied task and cannot reach t2's second unit
  const auto inst = make({2, 2}, {1, 1, 2});
  Rng rng(0);
  const auto start = centralized_init(inst);
  CHECK_THROWS_AS(phase1(inst, start, {}, rng), GreedyStall);
  try {
    phase1(inst, start, {}, rng);
  } catch (const GreedyStall& e) {
    CHECK(e.partial().sum() == 4);
  }
  const auto r = greedy_optimize(inst, {});
  CHECK_FALSE(r.feasible);
  CHECK(r.note.find("infeasible by greedy") == 0);
}

TEST_CASE("phase 2 spends every budget by default") {
  std::mt19937 gen(4);
  const auto base = fixtures::random_connected(10, 4, gen);
  auto budgets = base.budgets();
  for (auto& b : budgets) b += 2;
  const auto inst = base.with_budgets(budgets);
  Rng rng(1);
  const auto done = phase2(inst, phase1(inst, centralized_init(inst), {}, rng), {}, rng);
  for (int i = 0; i < inst.num_agents(); ++i) CHECK(done.row(i).sum() == inst.budgets()[i]);
  CHECK(active_connectivity(done, inst.energies()));
}

TEST_CASE("phase 2 without exhaust never lowers connectivity") {
  std::mt19937 gen(4);
  const auto base = fixtures::random_connected(10, 4, gen);
  auto budgets = base.budgets();
  for (auto& b : budgets) b += 2;
  const auto inst = base.with_budgets(budgets);
  GreedyParams p;
  p.exhaust_budgets = false;
  Rng rng(1);
  const auto filled = phase1(inst, centralized_init(inst), p, rng);
  const auto done = phase2(inst, filled, p, rng);
  const double before = *active_connectivity(filled, inst.energies());
  const double after = *active_connectivity(done, inst.energies());
  CHECK(after >= before - 1e-12);
  for (int i = 0; i < inst.num_agents(); ++i) CHECK(done.row(i).sum() <= inst.budgets()[i]);
  for (auto d : task_deficiency(done, inst.energies())) CHECK(d <= 0);
}

TEST_CASE("stochastic phase 2 exhausts every budget eventually or retires") {
  std::mt19937 gen(5);
  const auto base = fixtures::random_connected(8, 3, gen);
  auto budgets = base.budgets();
  for (auto& b : budgets) b += 1;
  const auto inst = base.with_budgets(budgets);
  GreedyParams p;
  p.stochastic_accept = true;
  p.phase2_temperature = 1e6;  // every losing move passes
  Rng rng(2);
  const auto done = phase2(inst, phase1(inst, centralized_init(inst), p, rng), p, rng);
  for (int i = 0; i < inst.num_agents(); ++i) CHECK(done.row(i).sum() == inst.budgets()[i]);
}

TEST_CASE("phase 2 is skipped without spare budget") {
  std::mt19937 gen(6);
  const auto inst = fixtures::random_connected(10, 4, gen);
  Rng rng(0);
  const auto filled = phase1(inst, centralized_init(inst), {}, rng);
  CHECK(phase2(inst, filled, {}, rng) == filled);
  const auto r = greedy_optimize(inst, {});
  CHECK(r.feasible);
  CHECK(r.note.find("phase 2 skipped") == 0);
  CHECK(r.trace.front().phase == "init");
  CHECK(r.trace.back().phase == "1");
}

TEST_CASE("greedy result is feasible and reproducible") {
  std::mt19937 gen(7);
  const auto base = fixtures::random_connected(15, 5, gen);
  auto budgets = base.budgets();
  budgets[3] += 3;
  const auto inst = base.with_budgets(budgets);
  for (auto order : {Phase1Order::global, Phase1Order::per_task}) {
    GreedyParams p;
    p.phase1_order = order;
    const auto r1 = greedy_optimize(inst, p);
    const auto r2 = greedy_optimize(inst, p);
    CHECK(r1.feasible);
    CHECK(r1.best_assignment == r2.best_assignment);
    CHECK(validate(inst.with_assignment(r1.best_assignment)).feasible());
  }
}

TEST_CASE("random agent choice above the threshold") {
  std::mt19937 gen(8);
  const auto inst = fixtures::random_connected(30, 3, gen, 1, false, 0.4);
  GreedyParams p;
  p.random_threshold = 5;
  p.seed = 99;
  const auto r1 = greedy_optimize(inst, p);
  const auto r2 = greedy_optimize(inst, p);
  CHECK(r1.feasible);
  CHECK(r1.best_assignment == r2.best_assignment);
}
