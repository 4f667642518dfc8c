#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hyperteam/csa.hpp"
#include "hyperteam/instance.hpp"
#include "hyperteam/rng.hpp"

namespace hyperteam {

/// global: one best (task, agent) pair per step over all unfulfilled tasks.
/// per_task: every unfulfilled task takes its own best agent in turn.
enum class Phase1Order { global, per_task };

struct GreedyParams {
  int h = 1;  // energy packet size
  Phase1Order phase1_order = Phase1Order::global;
  bool stochastic_accept = false;
  double phase2_temperature = 0.01;
  /// Phase 2 takes each agent's best move even when it lowers mu2, so every budget is spent.
  /// Off: a losing best move retires the agent. Ignored when stochastic_accept is on.
  bool exhaust_budgets = true;
  int random_threshold = 50;
  std::uint64_t seed = 0;

  void check() const;
};

Phase1Order parse_phase1_order(const std::string& name);
std::string to_string(Phase1Order order);

/// Phase 1 ran out of agents with remaining budget before every task was full.
class GreedyStall : public InstanceError {
 public:
  GreedyStall(const std::string& what, Assignment partial)
      : InstanceError(what), partial_(std::move(partial)) {}
  const Assignment& partial() const { return partial_; }

 private:
  Assignment partial_;
};

/**
 * Hub start: agents in descending budget order each put one unit on as many
 * uncovered tasks as they can. Every hub after the first first spends one unit
 * on a task of the previous hub (the lowest-index one still short of energy,
 * else the lowest-index one) so the hubs form a chain.
 *
 * Throws InstanceError when the totals are infeasible or the hubs cannot cover
 * and chain all tasks.
 */
Assignment centralized_init(const ProblemInstance& inst);

/**
 * Fills unfulfilled tasks with min(remaining budget, deficiency, h) units at a
 * time, choosing by mu2 gain per unit (ties: lowest agent, then lowest task).
 * Above `random_threshold` available agents the agent is drawn uniformly
 * instead of scanned. Throws GreedyStall if budgets run out first.
 */
Assignment phase1(const ProblemInstance& inst, Assignment start, const GreedyParams& params, Rng& rng,
                  std::vector<TraceRow>* trace = nullptr, const Objective& objective = hypergraph_objective());

/**
 * Spends leftover budget. Each round visits the agents with budget left in
 * index order; an agent gives min(remaining, h) units to its best task. A
 * negative best gain retires the agent, unless stochastic acceptance is on and
 * the move passes exp(delta / T), or exhaust_budgets is set. No-op when total
 * budget equals total energy.
 */
Assignment phase2(const ProblemInstance& inst, Assignment start, const GreedyParams& params, Rng& rng,
                  std::vector<TraceRow>* trace = nullptr, const Objective& objective = hypergraph_objective());

OptimizationResult greedy_optimize(const ProblemInstance& inst, const GreedyParams& params,
                                   const Objective& objective = hypergraph_objective());

}  // namespace hyperteam
