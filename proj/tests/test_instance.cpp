#include <doctest.h>

#include "hyperteam/instance.hpp"

using namespace hyperteam;

namespace {

Assignment grid(int rows, int cols, std::initializer_list<int> values) {
  Assignment a(rows, cols);
  auto it = values.begin();
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) a(i, k) = *it++;
  return a;
}

ProblemInstance make(std::vector<int> budgets, std::vector<int> energies, Assignment a) {
  std::vector<std::string> agents, tasks;
  for (std::size_t i = 0; i < budgets.size(); ++i) agents.push_back("a" + std::to_string(i));
  for (std::size_t k = 0; k < energies.size(); ++k) tasks.push_back("t" + std::to_string(k));
  return {agents, std::move(budgets), tasks, std::move(energies), std::move(a)};
}

}  // namespace

TEST_CASE("construction rejects malformed instances") {
  CHECK_THROWS_AS(make({1, -1}, {1}, grid(2, 1, {1, 0})), InstanceError);
  CHECK_THROWS_AS(make({1, 1}, {0}, grid(2, 1, {1, 0})), InstanceError);
  CHECK_THROWS_AS(make({1, 1}, {1}, grid(2, 1, {1, -1})), InstanceError);
  CHECK_THROWS_AS(make({1, 1}, {1}, grid(1, 1, {1})), InstanceError);
  CHECK_THROWS_AS(ProblemInstance({"x", "x"}, {1, 1}, {"t"}, {2}, grid(2, 1, {1, 1})), InstanceError);
  CHECK_THROWS_AS(ProblemInstance({}, {}, {"t"}, {2}, Assignment(0, 1)), InstanceError);
}

TEST_CASE("ids map to input order") {
  const auto inst = make({2, 1}, {3}, grid(2, 1, {2, 1}));
  CHECK(inst.agent_index("a1") == 1);
  CHECK(inst.task_index("t0") == 0);
  CHECK_THROWS_AS(inst.agent_index("nobody"), InstanceError);
  CHECK(inst.total_budget() == 3);
  CHECK(inst.total_energy() == 3);
}

TEST_CASE("validate reports deficiency, overrun and connectivity") {
  // agent 0 overspends, task 1 is short.
  const auto inst = make({1, 4}, {2, 3}, grid(2, 2, {2, 0, 0, 2}));
  const auto report = validate(inst);
  CHECK(report.feasible_total);
  CHECK(report.deficiency == std::vector<std::int64_t>{0, 1});
  CHECK(report.overrun == std::vector<std::int64_t>{1, 0});
  CHECK_FALSE(report.connected);
  CHECK_FALSE(report.feasible());

  const auto ok = make({2, 2}, {2, 2}, grid(2, 2, {1, 1, 1, 1}));
  CHECK(validate(ok).feasible());

  const auto short_total = make({1, 1}, {3}, grid(2, 1, {1, 1}));
  CHECK_FALSE(validate(short_total).feasible_total);
}

TEST_CASE("components ignore empty rows and columns") {
  const auto a = grid(4, 3, {1, 0, 0,
                             1, 0, 0,
                             0, 0, 2,
                             0, 0, 0});
  const auto c = connected_components(a);
  CHECK(c.count == 2);
  CHECK(c.agent_label[0] == c.agent_label[1]);
  CHECK(c.agent_label[0] != c.agent_label[2]);
  CHECK(c.agent_label[3] == -1);
  CHECK(c.task_label[1] == -1);
  CHECK_FALSE(is_connected(a));
  CHECK(is_connected(grid(2, 2, {1, 1, 0, 1})));
}

TEST_CASE("co-membership graph and factor metrics") {
  const auto a = grid(3, 2, {1, 0,
                             1, 1,
                             0, 3});
  const auto g = co_membership_graph(a);
  CHECK(g[0] == std::vector<int>{1});
  CHECK(g[1] == std::vector<int>{0, 2});
  CHECK(g[2] == std::vector<int>{1});
  const auto fm = factor_metrics(a);
  CHECK(fm.mean_tasks_per_agent == doctest::Approx(4.0 / 3.0));
  CHECK(fm.mean_teammates_per_agent == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("summary statistics") {
  const auto inst = make({1, 2, 3}, {2, 4}, grid(3, 2, {1, 0, 1, 1, 0, 3}));
  const auto s = summary_stats(inst);
  CHECK(s.n_agents == 3);
  CHECK(s.n_tasks == 2);
  CHECK(s.mean_budget == doctest::Approx(2.0));
  CHECK(s.mean_energy == doctest::Approx(3.0));
  CHECK(s.mean_agents_per_task == doctest::Approx(2.0));
}

TEST_CASE("copies with new data are validated") {
  const auto inst = make({1, 1}, {2}, grid(2, 1, {1, 1}));
  CHECK_THROWS_AS(inst.with_budgets({1}), InstanceError);
  const auto zeroed = inst.with_budgets({0, 1});
  CHECK(zeroed.zero_budget_agents() == std::vector<int>{0});
  CHECK(inst.with_assignment(grid(2, 1, {0, 2})).assignment()(1, 0) == 2);
}
