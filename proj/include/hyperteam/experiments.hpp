#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperteam/greedy.hpp"
#include "hyperteam/instance.hpp"
#include "hyperteam/rng.hpp"

namespace hyperteam {

// ---- small-hypergraph enumeration ----

struct EnumeratedHypergraph {
  std::vector<std::vector<int>> edges;  // sorted node lists, edges in generation order
  double mu2 = 0.0;
};

/// Unit-weight instance of an edge list over `n_nodes` nodes; budgets and energies are the marginals.
ProblemInstance hypergraph_instance(int n_nodes, const std::vector<std::vector<int>>& edges);

/**
 * Every set of `n_edges` distinct hyperedges over `n_nodes` nodes (each edge
 * with at least two nodes) whose hypergraph is connected and covers all nodes,
 * sorted by mu2 descending (stable in generation order). Throws
 * std::invalid_argument when the candidate count exceeds one million.
 */
std::vector<EnumeratedHypergraph> enumerate_small(int n_nodes = 5, int n_edges = 3, int jobs = 1);

/// Keeps the first hypergraph of each class under node relabelling. n_nodes <= 8.
std::vector<EnumeratedHypergraph> unique_up_to_relabelling(const std::vector<EnumeratedHypergraph>& all,
                                                           int n_nodes);

/// `count` evenly spaced ranks, first and last included.
std::vector<std::size_t> representatives(std::size_t total, std::size_t count = 4);

/// Diffusion trajectory of each hypergraph from the shared x0 (row r = time r).
std::vector<Eigen::MatrixXd> diffusion_comparison(const std::vector<EnumeratedHypergraph>& picks, int n_nodes,
                                                  const Eigen::VectorXd& x0, std::span<const double> times);

/// First time whose row lies within `eps` (max norm) of mean(x0); +inf if never.
double consensus_time(const Eigen::MatrixXd& trajectory, const Eigen::VectorXd& x0, std::span<const double> times,
                      double eps);

// ---- community rewiring ----

enum class RewireScheme { one_node, one_edge, head2tail, random };

RewireScheme parse_scheme(const std::string& name);
std::string to_string(RewireScheme scheme);
const std::vector<RewireScheme>& all_schemes();

struct CommunitySpec {
  int n_communities = 2;
  int nodes_per_community = 6;
  int edges_per_community = 6;

  void check() const;
};

/// Disjoint complete blocks: community c owns agents [c n, (c+1) n) and tasks [c m, (c+1) m).
ProblemInstance build_communities(const CommunitySpec& spec);

/**
 * N_c - 1 membership swaps between communities: node u leaves hyperedge e for
 * f while v leaves f for e (u not in f, v not in e), so every row and column
 * sum is kept. Redrawn until connected; throws InstanceError after
 * `max_retries` disconnected attempts.
 */
ProblemInstance rewire(const ProblemInstance& inst, const CommunitySpec& spec, RewireScheme scheme, Rng& rng,
                       int max_retries = 1000);

// ---- power-law fits ----

struct PowerLawFit {
  double exponent = 0.0;  // slope of log y on log x
  double intercept = 0.0;
  double r2 = 0.0;
  double exponent_stderr = 0.0;
};

/// OLS on (log x, log y). Needs at least 3 points, all positive.
PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys);

// ---- scaling experiment ----

struct ScalingOptions {
  std::vector<RewireScheme> schemes = all_schemes();
  std::vector<int> sizes = {2, 3, 4, 5, 6, 7, 8};
  int reps = 30;
  /// Community size tied to community count (n_c = m_c = N_c); otherwise fixed_size.
  bool coupled = true;
  int fixed_size = 6;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct ScalingSample {
  RewireScheme scheme;
  int n_communities;
  int rep;
  double mu2;
};

struct ScalingFit {
  RewireScheme scheme;
  /// mu2 ~ N_c^(-a): a is the negated slope of log mean mu2 on log N_c.
  double a = 0.0;
  double a_stderr = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<int> sizes;
  std::vector<double> mean_mu2;
  std::vector<double> sd_mu2;
};

struct ScalingReport {
  std::vector<ScalingSample> samples;
  std::vector<ScalingFit> fits;
};

ScalingReport scaling_experiment(const ScalingOptions& options);

// ---- budget sweep ----

struct BudgetSweepOptions {
  std::vector<int> multipliers = {1, 3, 5};
  std::vector<int> task_counts = {5, 10, 20};
  int reps = 10;
  double agents_per_task = 4.0;
  double tolerance = 0.1;
  int max_attempts = 1000;
  GreedyParams greedy;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct BudgetSample {
  int beta;
  int n_tasks;
  int rep;
  int n_agents;
  double mu2;
};

struct BudgetCurvePoint {
  int beta;
  int n_tasks;
  double mean_agents;
  double mean_mu2;
  double sd_mu2;
};

struct BudgetSlope {
  int beta;
  PowerLawFit fit;  // log mean mu2 on log mean N
};

struct BudgetSweepReport {
  std::vector<BudgetSample> samples;
  std::vector<BudgetCurvePoint> curve;
  std::vector<BudgetSlope> slopes;
};

/**
 * Connected sub-instance with `n_tasks` tasks grown breadth-first from a
 * random task (neighbour order shuffled), keeping every agent with units on a
 * sampled task. Agents keep their full budgets and tasks their energies.
 * Retried until the agent count is within `tolerance` (relative) of
 * agents_per_task * n_tasks.
 */
ProblemInstance sample_subinstance(const ProblemInstance& inst, int n_tasks, double agents_per_task,
                                   double tolerance, int max_attempts, Rng& rng);

BudgetSweepReport budget_sweep(const ProblemInstance& inst, const BudgetSweepOptions& options);

/**
 * Connected random allocation in which every agent holds `units_per_agent`
 * units, dealt to tasks uniformly at random so that every task gets the same
 * number of units. Budgets and energies equal the marginals, so the instance
 * is feasible with no spare budget. n_agents * units_per_agent must be a
 * multiple of n_tasks.
 */
ProblemInstance synthetic_population(int n_agents, int n_tasks, int units_per_agent, Rng& rng,
                                     int max_attempts = 1000);

}  // namespace hyperteam
