#include "hyperteam/csa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hyperteam/bipartite.hpp"
#include "hyperteam/spectral.hpp"
#include "parallel.hpp"

namespace hyperteam {

Objective hypergraph_objective() {
  return [](const Assignment& a, std::span<const int> energies) { return active_connectivity(a, energies); };
}

Objective bipartite_objective() {
  return [](const Assignment& a, std::span<const int> energies) {
    return active_bipartite_connectivity(a, energies);
  };
}

void CsaParams::check() const {
  if (!(initial_temperature > stop_temperature && stop_temperature > 0.0))
    throw std::invalid_argument("temperatures must satisfy T0 > T_th > 0");
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("cooling factor must lie in (0, 1)");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be nonnegative");
  if (swaps_per_proposal < 0) throw std::invalid_argument("swaps_per_proposal must be nonnegative");
  if (pack_size < 1) throw std::invalid_argument("pack_size must be at least 1");
  if (!(p_guided >= 0.0 && p_guided <= 1.0)) throw std::invalid_argument("p_guided must lie in [0, 1]");
  if (coeff_tasks_per_agent < 0.0 || coeff_teammates < 0.0 || default_penalty < 0.0)
    throw std::invalid_argument("penalty coefficients must be nonnegative");
  auto nonneg = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
  };
  if (!nonneg(task_penalty) || !nonneg(agent_penalty))
    throw std::invalid_argument("penalty weights must be nonnegative");
}

int CsaParams::resolved_swaps(int n_agents, int n_tasks) const {
  if (swaps_per_proposal > 0) return swaps_per_proposal;
  return std::max(1, (n_agents + n_tasks + 49) / 50);
}

double CsaParams::lambda(int task) const {
  return task < static_cast<int>(task_penalty.size()) ? task_penalty[task] : default_penalty;
}

double CsaParams::eta(int agent) const {
  return agent < static_cast<int>(agent_penalty.size()) ? agent_penalty[agent] : default_penalty;
}

Evaluation evaluate(const Assignment& assignment, const ProblemInstance& inst, const CsaParams& params,
                    const Objective& objective) {
  Evaluation ev;
  ev.deficiency = task_deficiency(assignment, inst.energies());
  double violation = 0.0;
  bool feasible = true;
  for (int k = 0; k < inst.num_tasks(); ++k) {
    if (ev.deficiency[k] > 0) {
      violation += params.lambda(k) * static_cast<double>(ev.deficiency[k]);
      feasible = false;
    }
  }
  for (int i = 0; i < inst.num_agents(); ++i) {
    const std::int64_t over = static_cast<std::int64_t>(assignment.row(i).sum()) - inst.budgets()[i];
    if (over > 0) {
      violation += params.eta(i) * static_cast<double>(over);
      feasible = false;
    }
  }
  ev.feasible = feasible;
  ev.mu2 = objective(assignment, inst.energies());
  if (!ev.mu2) return ev;
  double factors = 0.0;
  if (params.coeff_tasks_per_agent > 0.0 || params.coeff_teammates > 0.0) {
    const FactorMetrics fm = factor_metrics(assignment);
    factors = params.coeff_tasks_per_agent * fm.mean_tasks_per_agent +
              params.coeff_teammates * fm.mean_teammates_per_agent;
  }
  ev.penalty = *ev.mu2 - violation - factors;
  return ev;
}

Assignment initialize_assignment(const ProblemInstance& inst, const CsaParams& params, Rng& rng) {
  if (inst.total_budget() < inst.total_energy())
    throw InstanceError("infeasible totals: total budget is below total energy");
  const int K = inst.num_tasks();
  const int pack = std::max(1, params.pack_size);
  Assignment a = Assignment::Zero(inst.num_agents(), K);
  for (int i = 0; i < inst.num_agents(); ++i) {
    const int budget = inst.budgets()[i];
    for (int p = 0; p < budget / pack; ++p) a(i, static_cast<Eigen::Index>(uniform_below(rng, K))) += pack;
    for (int r = 0; r < budget % pack; ++r) a(i, static_cast<Eigen::Index>(uniform_below(rng, K))) += 1;
  }
  return a;
}

Assignment random_feasible_assignment(const ProblemInstance& inst, Rng& rng, int max_attempts) {
  if (inst.total_budget() < inst.total_energy())
    throw InstanceError("infeasible totals: total budget is below total energy");
  std::vector<int> units;
  for (int i = 0; i < inst.num_agents(); ++i) units.insert(units.end(), inst.budgets()[i], i);
  const int K = inst.num_tasks();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    shuffle(std::span<int>(units), rng);
    Assignment a = Assignment::Zero(inst.num_agents(), K);
    std::size_t next = 0;
    for (int k = 0; k < K; ++k)
      for (int e = 0; e < inst.energies()[k]; ++e) a(units[next++], k) += 1;
    for (; next < units.size(); ++next) a(units[next], static_cast<Eigen::Index>(uniform_below(rng, K))) += 1;
    if (is_connected(restrict_to(a, active_support(a)))) return a;
  }
  throw InstanceError("could not draw a connected feasible assignment");
}

namespace {

// Uniformly chosen agent holding units of `task`; -1 if none.
int pick_member(const Assignment& a, int task, Rng& rng) {
  int count = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) count += a(i, task) > 0;
  if (count == 0) return -1;
  auto target = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(count)));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    if (a(i, task) > 0 && target-- == 0) return static_cast<int>(i);
  return -1;
}

constexpr int kSwapRetries = 16;

}  // namespace

PerturbStats perturb(Assignment& a, std::vector<std::int64_t>& deficiency, const CsaParams& params, Rng& rng) {
  PerturbStats stats;
  const int K = static_cast<int>(a.cols());
  const int moves = params.resolved_swaps(static_cast<int>(a.rows()), K);
  const std::int64_t pack = std::max(1, params.pack_size);
  std::vector<std::int64_t> need(K), surplus(K);

  for (int s = 0; s < moves; ++s) {
    bool any_need = false, any_surplus = false;
    for (int k = 0; k < K; ++k) {
      need[k] = std::max<std::int64_t>(0, deficiency[k]);
      surplus[k] = std::max<std::int64_t>(0, -deficiency[k]);
      any_need |= need[k] > 0;
      any_surplus |= surplus[k] > 0;
    }

    if (any_need && any_surplus && uniform01(rng) < params.p_guided) {
      const auto to = static_cast<int>(sample_proportional(std::span<const std::int64_t>(need), rng));
      const auto from = static_cast<int>(sample_proportional(std::span<const std::int64_t>(surplus), rng));
      const int agent = pick_member(a, from, rng);
      const std::int64_t amount = std::min({pack, static_cast<std::int64_t>(a(agent, from)), need[to], surplus[from]});
      a(agent, from) -= static_cast<int>(amount);
      a(agent, to) += static_cast<int>(amount);
      deficiency[from] += amount;
      deficiency[to] -= amount;
      ++stats.guided;
      continue;
    }

    bool moved = false;
    for (int attempt = 0; attempt < kSwapRetries && K >= 2 && !moved; ++attempt) {
      const auto k1 = static_cast<int>(uniform_below(rng, K));
      auto k2 = static_cast<int>(uniform_below(rng, K - 1));
      if (k2 >= k1) ++k2;
      const int x = pick_member(a, k1, rng);
      const int y = pick_member(a, k2, rng);
      if (x < 0 || y < 0) continue;
      const int amount = static_cast<int>(std::min<std::int64_t>({pack, a(x, k1), a(y, k2)}));
      a(x, k1) -= amount;
      a(x, k2) += amount;
      a(y, k2) -= amount;
      a(y, k1) += amount;
      moved = true;
    }
    if (moved)
      ++stats.swaps;
    else
      ++stats.noops;
  }
  return stats;
}

OptimizationResult anneal_from(const ProblemInstance& inst, Assignment start, const CsaParams& params,
                               const Objective& objective) {
  params.check();
  Rng rng(derive_seed(params.seed, {name_tag("csa.chain")}));
  OptimizationResult result;

  Assignment current = std::move(start);
  Evaluation cur = evaluate(current, inst, params, objective);
  auto nan_if_missing = [](const std::optional<double>& v) {
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
  };

  Assignment best_any = current;
  double best_any_penalty = cur.penalty;
  std::optional<Assignment> best_feasible;
  double best_feasible_penalty = -std::numeric_limits<double>::infinity();
  double best_feasible_mu2 = 0.0;
  double best_any_mu2 = nan_if_missing(cur.mu2);
  auto consider = [&](const Assignment& a, const Evaluation& ev) {
    if (ev.penalty > best_any_penalty) {
      best_any_penalty = ev.penalty;
      best_any = a;
      best_any_mu2 = nan_if_missing(ev.mu2);
    }
    if (ev.feasible && ev.mu2) {
      if (!result.first_feasible_mu2) result.first_feasible_mu2 = *ev.mu2;
      if (!best_feasible || ev.penalty > best_feasible_penalty) {
        best_feasible = a;
        best_feasible_penalty = ev.penalty;
        best_feasible_mu2 = *ev.mu2;
      }
    }
  };
  consider(current, cur);

  double T = params.initial_temperature;
  result.trace.push_back({0, T, cur.penalty, nan_if_missing(cur.mu2), cur.feasible, true, best_any_penalty, ""});

  long t = 0;
  while (T > params.stop_temperature && t < params.max_iterations) {
    Assignment candidate = current;
    std::vector<std::int64_t> deficiency = cur.deficiency;
    perturb(candidate, deficiency, params, rng);
    Evaluation ev = evaluate(candidate, inst, params, objective);

    bool accept;
    if (!std::isfinite(cur.penalty)) {
      // Disconnected chain state: walk freely until connectivity returns.
      accept = true;
    } else if (!std::isfinite(ev.penalty)) {
      accept = false;
    } else {
      const double delta = ev.penalty - cur.penalty;
      accept = delta >= 0.0 || uniform01(rng) < std::exp(delta / T);
    }
    ++t;
    if (accept) {
      current = std::move(candidate);
      cur = std::move(ev);
      consider(current, cur);
    }
    result.trace.push_back({t, T, cur.penalty, nan_if_missing(cur.mu2), cur.feasible, accept, best_any_penalty, ""});
    T *= params.cooling;
  }

  result.iterations_run = t;
  if (best_feasible) {
    result.best_assignment = std::move(*best_feasible);
    result.best_penalty = best_feasible_penalty;
    result.best_mu2 = best_feasible_mu2;
    result.feasible = true;
  } else {
    result.best_assignment = std::move(best_any);
    result.best_penalty = best_any_penalty;
    result.best_mu2 = best_any_mu2;
    result.feasible = false;
    result.note = "no feasible state visited";
  }
  return result;
}

OptimizationResult anneal(const ProblemInstance& inst, const CsaParams& params, const Objective& objective) {
  params.check();
  Rng init_rng(derive_seed(params.seed, {name_tag("csa.init")}));
  return anneal_from(inst, initialize_assignment(inst, params, init_rng), params, objective);
}

OptimizationResult anneal_restarts(const ProblemInstance& inst, const CsaParams& params, int runs, int jobs,
                                   const Objective& objective) {
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  std::vector<OptimizationResult> results(static_cast<std::size_t>(runs));
  detail::parallel_for(runs, jobs, [&](int r) {
    CsaParams p = params;
    p.seed = derive_seed(params.seed, {name_tag("csa.restart"), static_cast<std::uint64_t>(r)});
    results[static_cast<std::size_t>(r)] = anneal(inst, p, objective);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    const auto& a = results[r];
    const auto& b = results[best];
    if ((a.feasible && !b.feasible) || (a.feasible == b.feasible && a.best_penalty > b.best_penalty)) best = r;
  }
  return std::move(results[best]);
}

}  // namespace hyperteam
