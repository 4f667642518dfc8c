#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyperteam/instance.hpp"

namespace hyperteam {

struct AttackResult {
  std::vector<int> removed;
  Assignment patched_assignment;
  double patching_cost = 0.0;
  std::int64_t unsatisfied_sum = 0;
  bool success = false;
};

/// Mean and standard error (sample sigma / sqrt(n)).
struct MetricSummary {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct AttackRun {
  int run = 0;
  AttackResult result;
};

struct ExperimentSummary {
  int n_exp = 0;
  MetricSummary patching_cost;
  MetricSummary unsatisfied_sum;
  std::vector<AttackRun> runs;
};

MetricSummary summarize(std::span<const double> values);

/// Zeroes the rows and budgets of `removed`. Throws on bad indices or if every agent goes.
ProblemInstance remove_agents(const ProblemInstance& inst, std::span<const int> removed);

/// Cost of one patched unit recruited at BFS ring `ring` (ring 0 = the task's own members).
using HopCost = std::function<double(int ring)>;
double linear_hop_cost(int ring);

/**
 * Refills the deficient tasks of an attacked instance (as returned by
 * remove_agents). Tasks go in descending deficiency, ties by index. For each,
 * the co-membership graph of the attacked allocation is searched outward from
 * the task's surviving members; spare budget is drawn ring by ring, agents in
 * index order, one unit at a time.
 */
AttackResult patch(const ProblemInstance& attacked, std::span<const int> removed,
                   const HopCost& cost = linear_hop_cost);

enum class AttackMode { random, targeted_degree };

AttackMode parse_attack_mode(const std::string& name);
std::string to_string(AttackMode mode);

/**
 * n_exp independent attacks removing m agents each. Random mode draws the
 * agents without replacement from the stream (seed, run); targeted_degree
 * removes the m agents with the most allocated units (same set every run).
 */
ExperimentSummary attack_experiment(const ProblemInstance& inst, int m, int n_exp, std::uint64_t seed,
                                    AttackMode mode = AttackMode::random, int jobs = 1);

/// mu2_optimized / mu2_original; throws std::invalid_argument unless mu2_original > 0.
double gain(double mu2_optimized, double mu2_original);

}  // namespace hyperteam
