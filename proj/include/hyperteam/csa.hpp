#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperteam/instance.hpp"
#include "hyperteam/rng.hpp"

namespace hyperteam {

/// Connectivity objective of an allocation; nullopt when it is disconnected.
using Objective = std::function<std::optional<double>(const Assignment&, std::span<const int>)>;

Objective hypergraph_objective();
Objective bipartite_objective();

/// Annealing hyperparameters. Empty penalty vectors fall back to `default_penalty`.
struct CsaParams {
  double initial_temperature = 1.0;
  double cooling = 0.999;
  double stop_temperature = 1e-4;
  long max_iterations = 50'000;
  int swaps_per_proposal = 0;  // 0: max(1, ceil((N + K) / 50))
  std::vector<double> task_penalty;
  std::vector<double> agent_penalty;
  double default_penalty = 10.0;
  int pack_size = 1;
  double p_guided = 0.8;
  double coeff_tasks_per_agent = 0.0;
  double coeff_teammates = 0.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range values.
  void check() const;
  int resolved_swaps(int n_agents, int n_tasks) const;
  double lambda(int task) const;
  double eta(int agent) const;
};

struct Evaluation {
  /// -inf when the candidate is disconnected.
  double penalty = -std::numeric_limits<double>::infinity();
  std::optional<double> mu2;
  std::vector<std::int64_t> deficiency;
  bool feasible = false;
};

Evaluation evaluate(const Assignment& assignment, const ProblemInstance& inst, const CsaParams& params,
                    const Objective& objective = hypergraph_objective());

/// Spends every agent's full budget, in packs of `pack_size` on uniformly random tasks.
Assignment initialize_assignment(const ProblemInstance& inst, const CsaParams& params, Rng& rng);

/// Uniformly shuffled allocation that meets every task requirement and spends
/// every budget; retried until connected.
Assignment random_feasible_assignment(const ProblemInstance& inst, Rng& rng, int max_attempts = 1000);

struct PerturbStats {
  int guided = 0;
  int swaps = 0;
  int noops = 0;
};

/**
 * Applies `params.resolved_swaps()` moves in place. A guided move shifts units
 * from an over-provisioned task to a deficient one (both picked proportional
 * to |deficiency|); otherwise two agents in two random tasks exchange units.
 * Agent totals are preserved by both moves and `deficiency` is kept current.
 */
PerturbStats perturb(Assignment& assignment, std::vector<std::int64_t>& deficiency, const CsaParams& params,
                     Rng& rng);

struct TraceRow {
  long iter = 0;
  double temperature = 0.0;
  double penalty = 0.0;
  double mu2 = 0.0;  // NaN when disconnected
  bool feasible = false;
  bool accepted = false;
  double best_penalty = 0.0;
  std::string phase;  // greedy only: init / 1 / 2
};

struct OptimizationResult {
  Assignment best_assignment;
  double best_penalty = -std::numeric_limits<double>::infinity();
  double best_mu2 = 0.0;
  bool feasible = false;
  std::vector<TraceRow> trace;
  long iterations_run = 0;
  /// mu2 of the first feasible state the chain visited, if any.
  std::optional<double> first_feasible_mu2;
  std::string note;
};

OptimizationResult anneal(const ProblemInstance& inst, const CsaParams& params,
                          const Objective& objective = hypergraph_objective());
OptimizationResult anneal_from(const ProblemInstance& inst, Assignment start, const CsaParams& params,
                               const Objective& objective = hypergraph_objective());

/// Independent chains with seeds derived from params.seed; best penalty wins,
/// ties to the lower run index. `jobs` bounds concurrent chains.
OptimizationResult anneal_restarts(const ProblemInstance& inst, const CsaParams& params, int runs, int jobs,
                                   const Objective& objective = hypergraph_objective());

}  // namespace hyperteam
