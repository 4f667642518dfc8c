#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "hyperteam/instance.hpp"

namespace fixtures {

inline hyperteam::ProblemInstance from_grid(const hyperteam::Assignment& a, std::vector<int> energies) {
  std::vector<std::string> agents, tasks;
  std::vector<int> budgets;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    agents.push_back("a" + std::to_string(i));
    budgets.push_back(a.row(i).sum());
  }
  for (Eigen::Index k = 0; k < a.cols(); ++k) tasks.push_back("t" + std::to_string(k));
  return {agents, budgets, tasks, std::move(energies), a};
}

/// Connected allocation with weights 1..max_weight: a random spanning tree over
/// agents and tasks plus independent extra entries with probability `density`.
/// Energies are the column sums unless `random_energy`, then drawn from 1..9.
inline hyperteam::ProblemInstance random_connected(int N, int K, std::mt19937& gen, int max_weight = 3,
                                                   bool random_energy = false, double density = 0.3) {
  std::bernoulli_distribution hit(density);
  std::uniform_int_distribution<int> weight(1, max_weight), energy(1, 9);
  auto pick = [&](const std::vector<int>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(gen)];
  };

  hyperteam::Assignment a = hyperteam::Assignment::Zero(N, K);
  // Tree seeded with one agent-task edge; every later node hooks onto the other side.
  std::vector<int> rest;  // agents >= 0, tasks encoded as -1 - k
  const int first_agent = std::uniform_int_distribution<int>(0, N - 1)(gen);
  const int first_task = std::uniform_int_distribution<int>(0, K - 1)(gen);
  for (int i = 0; i < N; ++i)
    if (i != first_agent) rest.push_back(i);
  for (int k = 0; k < K; ++k)
    if (k != first_task) rest.push_back(-1 - k);
  std::shuffle(rest.begin(), rest.end(), gen);
  a(first_agent, first_task) = weight(gen);
  std::vector<int> agents{first_agent}, tasks{first_task};
  for (int node : rest) {
    if (node >= 0) {
      a(node, pick(tasks)) = weight(gen);
      agents.push_back(node);
    } else {
      a(pick(agents), -1 - node) = weight(gen);
      tasks.push_back(-1 - node);
    }
  }
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < K; ++k)
      if (a(i, k) == 0 && hit(gen)) a(i, k) = weight(gen);

  std::vector<int> e(K);
  for (int k = 0; k < K; ++k) e[k] = random_energy ? energy(gen) : a.col(k).sum();
  return from_grid(a, e);
}

}  // namespace fixtures
