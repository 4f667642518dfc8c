#include "hyperteam/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hyperteam {

void GreedyParams::check() const {
  if (h < 1) throw std::invalid_argument("packet size h must be at least 1");
  if (random_threshold < 1) throw std::invalid_argument("random_threshold must be at least 1");
  if (stochastic_accept && !(phase2_temperature > 0.0))
    throw std::invalid_argument("phase-2 temperature must be positive");
}

Assignment centralized_init(const ProblemInstance& inst) {
  if (inst.total_budget() < inst.total_energy())
    throw InstanceError("infeasible totals: total budget is below total energy");
  const int N = inst.num_agents();
  const int K = inst.num_tasks();
  const auto& budgets = inst.budgets();
  const auto& energies = inst.energies();

  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return budgets[a] > budgets[b]; });

  Assignment a = Assignment::Zero(N, K);
  std::vector<bool> covered(K, false);
  int uncovered = K;
  int next_task = 0;
  int prev_hub = -1;

  for (int hub : order) {
    if (uncovered == 0) break;
    int budget = budgets[hub];
    if (budget == 0) break;
    if (prev_hub >= 0) {
      if (budget < 2)
        throw InstanceError("hub " + inst.agent_ids()[hub] + " has no budget to both chain and cover a task");
      int shared = -1;
      for (int k = 0; k < K && shared < 0; ++k)
        if (a(prev_hub, k) > 0 && a.col(k).sum() < energies[k]) shared = k;
      for (int k = 0; k < K && shared < 0; ++k)
        if (a(prev_hub, k) > 0) shared = k;
      a(hub, shared) += 1;
      --budget;
    }
    for (; budget > 0 && uncovered > 0; --budget) {
      while (covered[next_task]) ++next_task;
      a(hub, next_task) += 1;
      covered[next_task] = true;
      --uncovered;
    }
    prev_hub = hub;
  }
  if (uncovered > 0) throw InstanceError("hub budgets cannot cover every task");
  return a;
}

namespace {

// Gains closer than this count as ties and go to the lower index.
constexpr double kTie = 1e-12;

double score_or_worst(const std::optional<double>& v) {
  return v ? *v : -std::numeric_limits<double>::infinity();
}

std::vector<int> remaining_budget(const ProblemInstance& inst, const Assignment& a) {
  std::vector<int> rem(inst.num_agents());
  for (int i = 0; i < inst.num_agents(); ++i) rem[i] = std::max(0, inst.budgets()[i] - a.row(i).sum());
  return rem;
}

bool all_fulfilled(const std::vector<std::int64_t>& deficiency) {
  return std::all_of(deficiency.begin(), deficiency.end(), [](std::int64_t d) { return d <= 0; });
}

void record(std::vector<TraceRow>* trace, const char* phase, double temperature, double mu2, bool feasible,
            bool accepted) {
  if (!trace) return;
  const long iter = trace->empty() ? 0 : trace->back().iter + 1;
  double best = std::isfinite(mu2) ? mu2 : -std::numeric_limits<double>::infinity();
  if (!trace->empty()) best = std::max(best, trace->back().best_penalty);
  trace->push_back({iter, temperature, mu2, mu2, feasible, accepted, best, phase});
}

}  // namespace

Phase1Order parse_phase1_order(const std::string& name) {
  if (name == "global") return Phase1Order::global;
  if (name == "per-task" || name == "per_task") return Phase1Order::per_task;
  throw std::invalid_argument("unknown phase-1 order: " + name);
}

std::string to_string(Phase1Order order) { return order == Phase1Order::global ? "global" : "per-task"; }

namespace {

struct Pick {
  int agent = -1;
  int task = -1;
  int units = 0;
  double value = 0.0;
};

// Best (agent, task) over the given candidates by gain per unit; scan is agent-major
// so the strict comparison keeps the lowest agent, then the lowest task.
Pick best_pick(Assignment& a, const ProblemInstance& inst, const std::vector<int>& agents,
               const std::vector<int>& tasks, const std::vector<int>& rem,
               const std::vector<std::int64_t>& deficiency, int h, double current, const Objective& objective) {
  Pick best;
  double best_gain = -std::numeric_limits<double>::infinity();
  for (int j : agents)
    for (int k : tasks) {
      const int units = static_cast<int>(std::min<std::int64_t>({rem[j], deficiency[k], h}));
      a(j, k) += units;
      const double value = score_or_worst(objective(a, inst.energies()));
      a(j, k) -= units;
      const double gain = (value - current) / units;
      if (best.agent < 0 || gain > best_gain + kTie) {
        best = {j, k, units, value};
        best_gain = gain;
      }
    }
  return best;
}

}  // namespace

Assignment phase1(const ProblemInstance& inst, Assignment a, const GreedyParams& params, Rng& rng,
                  std::vector<TraceRow>* trace, const Objective& objective) {
  params.check();
  const int N = inst.num_agents();
  std::vector<int> rem = remaining_budget(inst, a);
  std::vector<std::int64_t> deficiency = task_deficiency(a, inst.energies());
  double current = score_or_worst(objective(a, inst.energies()));

  auto available = [&] {
    std::vector<int> out;
    for (int j = 0; j < N; ++j)
      if (rem[j] > 0) out.push_back(j);
    return out;
  };
  auto commit = [&](const Pick& p) {
    a(p.agent, p.task) += p.units;
    rem[p.agent] -= p.units;
    deficiency[p.task] -= p.units;
    current = p.value;
    record(trace, "1", 0.0, current, all_fulfilled(deficiency), true);
  };
  // Uniform agent above the threshold, otherwise the full candidate list.
  auto candidates = [&](const std::vector<int>& free) {
    if (static_cast<int>(free.size()) <= params.random_threshold) return free;
    return std::vector<int>{free[uniform_below(rng, free.size())]};
  };

  while (!all_fulfilled(deficiency)) {
    std::vector<int> open;
    for (int k = 0; k < inst.num_tasks(); ++k)
      if (deficiency[k] > 0) open.push_back(k);

    if (params.phase1_order == Phase1Order::global) {
      const auto free = available();
      if (free.empty())
        throw GreedyStall("no agent budget left while " + std::to_string(open.size()) + " tasks are unfulfilled", a);
      commit(best_pick(a, inst, candidates(free), open, rem, deficiency, params.h, current, objective));
      continue;
    }
    for (int k : open) {
      const auto free = available();
      if (free.empty())
        throw GreedyStall("no agent budget left while task " + inst.task_ids()[k] + " is unfulfilled", a);
      commit(best_pick(a, inst, candidates(free), {k}, rem, deficiency, params.h, current, objective));
    }
  }
  return a;
}

Assignment phase2(const ProblemInstance& inst, Assignment a, const GreedyParams& params, Rng& rng,
                  std::vector<TraceRow>* trace, const Objective& objective) {
  params.check();
  if (inst.total_budget() == inst.total_energy()) return a;
  const int N = inst.num_agents();
  const int K = inst.num_tasks();
  std::vector<int> rem = remaining_budget(inst, a);
  std::vector<bool> retired(N, false);
  double current = score_or_worst(objective(a, inst.energies()));
  auto available = [&](int j) { return rem[j] > 0 && !retired[j]; };

  for (;;) {
    bool any = false;
    for (int j = 0; j < N; ++j) {
      if (!available(j)) continue;
      any = true;
      const int units = std::min(rem[j], params.h);
      int best_task = -1;
      double best_gain = -std::numeric_limits<double>::infinity();
      double best_value = current;
      for (int k = 0; k < K; ++k) {
        a(j, k) += units;
        const double value = score_or_worst(objective(a, inst.energies()));
        a(j, k) -= units;
        const double gain = (value - current) / units;
        if (best_task < 0 || gain > best_gain + kTie) {
          best_task = k;
          best_gain = gain;
          best_value = value;
        }
      }
      bool accept = best_gain >= -kTie || (params.exhaust_budgets && !params.stochastic_accept && std::isfinite(best_value));
      if (!accept && params.stochastic_accept && std::isfinite(best_gain))
        accept = uniform01(rng) < std::exp((best_value - current) / params.phase2_temperature);
      if (accept) {
        a(j, best_task) += units;
        rem[j] -= units;
        current = best_value;
      } else {
        retired[j] = true;
      }
      record(trace, "2", params.stochastic_accept ? params.phase2_temperature : 0.0, current, true, accept);
    }
    if (!any) break;
  }
  return a;
}

OptimizationResult greedy_optimize(const ProblemInstance& inst, const GreedyParams& params,
                                   const Objective& objective) {
  params.check();
  Rng rng(derive_seed(params.seed, {name_tag("greedy")}));
  OptimizationResult result;

  Assignment a = centralized_init(inst);
  auto mu2_of = [&](const Assignment& x) {
    const auto v = objective(x, inst.energies());
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
  };
  record(&result.trace, "init", 0.0, mu2_of(a), all_fulfilled(task_deficiency(a, inst.energies())), true);

  try {
    a = phase1(inst, std::move(a), params, rng, &result.trace, objective);
  } catch (const GreedyStall& e) {
    result.best_assignment = e.partial();
    result.note = std::string("infeasible by greedy: ") + e.what();
    result.feasible = false;
    result.best_mu2 = std::numeric_limits<double>::quiet_NaN();
    result.iterations_run = static_cast<long>(result.trace.size()) - 1;
    return result;
  }
  result.first_feasible_mu2 = mu2_of(a);

  if (inst.total_budget() == inst.total_energy()) {
    result.note = "phase 2 skipped: total budget equals total energy";
  } else {
    a = phase2(inst, std::move(a), params, rng, &result.trace, objective);
  }

  result.best_mu2 = mu2_of(a);
  result.best_penalty = result.best_mu2;
  result.feasible = validate(inst.with_assignment(a)).feasible();
  result.best_assignment = std::move(a);
  result.iterations_run = static_cast<long>(result.trace.size()) - 1;
  return result;
}

}  // namespace hyperteam
