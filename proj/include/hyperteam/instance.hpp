#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace hyperteam {

/// Integer energy allocation: entry (i, k) is the units agent i spends on task k.
using Assignment = Eigen::MatrixXi;

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Agents with integer budgets, tasks with integer energy requirements and the
 * current allocation of agent energy to tasks.
 *
 * Ids are opaque strings; they are mapped to dense indices in input order.
 * Instances are treated as immutable once validated; optimizers work on
 * copies of the assignment.
 */
class ProblemInstance {
 public:
  ProblemInstance() = default;
  ProblemInstance(std::vector<std::string> agent_ids, std::vector<int> budgets,
                  std::vector<std::string> task_ids, std::vector<int> energies,
                  Assignment assignment);

  int num_agents() const { return static_cast<int>(agent_ids_.size()); }
  int num_tasks() const { return static_cast<int>(task_ids_.size()); }

  const std::vector<std::string>& agent_ids() const { return agent_ids_; }
  const std::vector<std::string>& task_ids() const { return task_ids_; }
  const std::vector<int>& budgets() const { return budgets_; }
  const std::vector<int>& energies() const { return energies_; }
  const Assignment& assignment() const { return assignment_; }

  int agent_index(const std::string& id) const;
  int task_index(const std::string& id) const;

  std::int64_t total_budget() const;
  std::int64_t total_energy() const;

  /// Copy of this instance with a different allocation (validated).
  ProblemInstance with_assignment(Assignment assignment) const;
  /// Copy with replaced budgets (validated).
  ProblemInstance with_budgets(std::vector<int> budgets) const;

  /// Agents with zero budget are legal but never receive work from optimizers.
  std::vector<int> zero_budget_agents() const;

 private:
  void check() const;

  std::vector<std::string> agent_ids_;
  std::vector<int> budgets_;
  std::vector<std::string> task_ids_;
  std::vector<int> energies_;
  Assignment assignment_;
  std::unordered_map<std::string, int> agent_index_;
  std::unordered_map<std::string, int> task_index_;
};

struct ValidationReport {
  bool feasible_total = false;
  /// E_k minus the units allocated to task k; negative when over-provisioned.
  std::vector<std::int64_t> deficiency;
  /// Units allocated beyond the agent's budget, zero when within budget.
  std::vector<std::int64_t> overrun;
  bool connected = false;

  bool feasible() const;
};

struct SummaryStats {
  int n_agents = 0;
  int n_tasks = 0;
  double mean_budget = 0.0;
  double mean_energy = 0.0;
  double mean_tasks_per_agent = 0.0;      // T-bar
  double mean_agents_per_task = 0.0;      // A-bar
  double mean_teammates_per_agent = 0.0;  // A-hat
};

/// Binary incidence of an allocation (1 where the allocation is positive).
Eigen::MatrixXi incidence(const Assignment& assignment);

ValidationReport validate(const ProblemInstance& inst);

/// E_k - sum_i B_ik for every task.
std::vector<std::int64_t> task_deficiency(const Assignment& assignment,
                                          const std::vector<int>& energies);

/**
 * Connected components of the agent/task bipartite graph induced by the
 * positive entries of `assignment`. Agents and tasks without any positive
 * entry get label -1 and are not counted.
 */
struct Components {
  std::vector<int> agent_label;
  std::vector<int> task_label;
  int count = 0;
};
Components connected_components(const Assignment& assignment);

/// True iff every agent and every task sit in one single component.
bool is_connected(const ProblemInstance& inst);
bool is_connected(const Assignment& assignment);

/// Agents adjacent iff they share at least one task. Sorted, loop-free lists.
std::vector<std::vector<int>> co_membership_graph(const Assignment& assignment);
std::vector<std::vector<int>> co_membership_graph(const ProblemInstance& inst);

/// T-bar and A-hat of an allocation, averaged over all rows.
struct FactorMetrics {
  double mean_tasks_per_agent = 0.0;
  double mean_teammates_per_agent = 0.0;
};
FactorMetrics factor_metrics(const Assignment& assignment);

SummaryStats summary_stats(const ProblemInstance& inst);

}  // namespace hyperteam
