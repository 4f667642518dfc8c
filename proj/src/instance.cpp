#include "hyperteam/instance.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace hyperteam {

ProblemInstance::ProblemInstance(std::vector<std::string> agent_ids, std::vector<int> budgets,
                                 std::vector<std::string> task_ids, std::vector<int> energies,
                                 Assignment assignment)
    : agent_ids_(std::move(agent_ids)),
      budgets_(std::move(budgets)),
      task_ids_(std::move(task_ids)),
      energies_(std::move(energies)),
      assignment_(std::move(assignment)) {
  for (int i = 0; i < num_agents(); ++i) {
    if (!agent_index_.emplace(agent_ids_[i], i).second)
      throw InstanceError("duplicate agent id '" + agent_ids_[i] + "'");
  }
  for (int k = 0; k < num_tasks(); ++k) {
    if (!task_index_.emplace(task_ids_[k], k).second)
      throw InstanceError("duplicate task id '" + task_ids_[k] + "'");
  }
  check();
}

void ProblemInstance::check() const {
  if (agent_ids_.empty()) throw InstanceError("instance has no agents");
  if (task_ids_.empty()) throw InstanceError("instance has no tasks");
  if (budgets_.size() != agent_ids_.size())
    throw InstanceError("budget count does not match agent count");
  if (energies_.size() != task_ids_.size())
    throw InstanceError("energy count does not match task count");
  if (assignment_.rows() != num_agents() || assignment_.cols() != num_tasks())
    throw InstanceError("assignment shape does not match agents x tasks");
  for (int i = 0; i < num_agents(); ++i) {
    if (budgets_[i] < 0) throw InstanceError("negative budget for agent '" + agent_ids_[i] + "'");
  }
  for (int k = 0; k < num_tasks(); ++k) {
    if (energies_[k] < 1)
      throw InstanceError("task '" + task_ids_[k] + "' must require at least one energy unit");
  }
  if (assignment_.size() > 0 && assignment_.minCoeff() < 0)
    throw InstanceError("negative weight in assignment");
}

int ProblemInstance::agent_index(const std::string& id) const {
  auto it = agent_index_.find(id);
  if (it == agent_index_.end()) throw InstanceError("unknown agent id '" + id + "'");
  return it->second;
}

int ProblemInstance::task_index(const std::string& id) const {
  auto it = task_index_.find(id);
  if (it == task_index_.end()) throw InstanceError("unknown task id '" + id + "'");
  return it->second;
}

std::int64_t ProblemInstance::total_budget() const {
  return std::accumulate(budgets_.begin(), budgets_.end(), std::int64_t{0});
}

std::int64_t ProblemInstance::total_energy() const {
  return std::accumulate(energies_.begin(), energies_.end(), std::int64_t{0});
}

ProblemInstance ProblemInstance::with_assignment(Assignment assignment) const {
  ProblemInstance copy = *this;
  copy.assignment_ = std::move(assignment);
  copy.check();
  return copy;
}

ProblemInstance ProblemInstance::with_budgets(std::vector<int> budgets) const {
  ProblemInstance copy = *this;
  copy.budgets_ = std::move(budgets);
  copy.check();
  return copy;
}

std::vector<int> ProblemInstance::zero_budget_agents() const {
  std::vector<int> out;
  for (int i = 0; i < num_agents(); ++i)
    if (budgets_[i] == 0) out.push_back(i);
  return out;
}

bool ValidationReport::feasible() const {
  return std::all_of(deficiency.begin(), deficiency.end(), [](auto d) { return d <= 0; }) &&
         std::all_of(overrun.begin(), overrun.end(), [](auto o) { return o == 0; });
}

Eigen::MatrixXi incidence(const Assignment& assignment) {
  return (assignment.array() > 0).cast<int>().matrix();
}

std::vector<std::int64_t> task_deficiency(const Assignment& assignment,
                                          const std::vector<int>& energies) {
  std::vector<std::int64_t> out(energies.size());
  for (Eigen::Index k = 0; k < assignment.cols(); ++k)
    out[k] = static_cast<std::int64_t>(energies[k]) - assignment.col(k).cast<std::int64_t>().sum();
  return out;
}

ValidationReport validate(const ProblemInstance& inst) {
  ValidationReport report;
  report.feasible_total = inst.total_budget() >= inst.total_energy();
  report.deficiency = task_deficiency(inst.assignment(), inst.energies());
  report.overrun.resize(inst.num_agents());
  for (int i = 0; i < inst.num_agents(); ++i) {
    const std::int64_t spent = inst.assignment().row(i).cast<std::int64_t>().sum();
    report.overrun[i] = std::max<std::int64_t>(0, spent - inst.budgets()[i]);
  }
  report.connected = is_connected(inst);
  return report;
}

Components connected_components(const Assignment& assignment) {
  const auto n = static_cast<int>(assignment.rows());
  const auto m = static_cast<int>(assignment.cols());
  Components comp;
  comp.agent_label.assign(n, -1);
  comp.task_label.assign(m, -1);

  // Bipartite BFS; nodes 0..n-1 are agents, n..n+m-1 are tasks.
  std::queue<int> frontier;
  for (int start = 0; start < n; ++start) {
    if (comp.agent_label[start] != -1 || assignment.row(start).maxCoeff() <= 0) continue;
    const int label = comp.count++;
    comp.agent_label[start] = label;
    frontier.push(start);
    while (!frontier.empty()) {
      const int node = frontier.front();
      frontier.pop();
      if (node < n) {
        for (int k = 0; k < m; ++k) {
          if (assignment(node, k) > 0 && comp.task_label[k] == -1) {
            comp.task_label[k] = label;
            frontier.push(n + k);
          }
        }
      } else {
        const int k = node - n;
        for (int i = 0; i < n; ++i) {
          if (assignment(i, k) > 0 && comp.agent_label[i] == -1) {
            comp.agent_label[i] = label;
            frontier.push(i);
          }
        }
      }
    }
  }
  return comp;
}

bool is_connected(const Assignment& assignment) {
  const Components comp = connected_components(assignment);
  if (comp.count != 1) return false;
  auto labelled = [](int l) { return l == 0; };
  return std::all_of(comp.agent_label.begin(), comp.agent_label.end(), labelled) &&
         std::all_of(comp.task_label.begin(), comp.task_label.end(), labelled);
}

bool is_connected(const ProblemInstance& inst) { return is_connected(inst.assignment()); }

std::vector<std::vector<int>> co_membership_graph(const Assignment& assignment) {
  const auto n = static_cast<int>(assignment.rows());
  const auto m = static_cast<int>(assignment.cols());
  std::vector<std::vector<int>> adj(n);
  std::vector<int> members;
  for (int k = 0; k < m; ++k) {
    members.clear();
    for (int i = 0; i < n; ++i)
      if (assignment(i, k) > 0) members.push_back(i);
    for (int a : members)
      for (int b : members)
        if (a != b) adj[a].push_back(b);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

std::vector<std::vector<int>> co_membership_graph(const ProblemInstance& inst) {
  return co_membership_graph(inst.assignment());
}

FactorMetrics factor_metrics(const Assignment& assignment) {
  FactorMetrics fm;
  const auto n = assignment.rows();
  if (n == 0) return fm;
  fm.mean_tasks_per_agent = static_cast<double>(incidence(assignment).sum()) / static_cast<double>(n);
  std::size_t teammates = 0;
  for (const auto& row : co_membership_graph(assignment)) teammates += row.size();
  fm.mean_teammates_per_agent = static_cast<double>(teammates) / static_cast<double>(n);
  return fm;
}

SummaryStats summary_stats(const ProblemInstance& inst) {
  SummaryStats s;
  s.n_agents = inst.num_agents();
  s.n_tasks = inst.num_tasks();
  s.mean_budget = static_cast<double>(inst.total_budget()) / s.n_agents;
  s.mean_energy = static_cast<double>(inst.total_energy()) / s.n_tasks;
  const auto fm = factor_metrics(inst.assignment());
  s.mean_tasks_per_agent = fm.mean_tasks_per_agent;
  s.mean_agents_per_task = static_cast<double>(incidence(inst.assignment()).sum()) / s.n_tasks;
  s.mean_teammates_per_agent = fm.mean_teammates_per_agent;
  return s;
}

}  // namespace hyperteam
