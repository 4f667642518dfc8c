#include "hyperteam/resilience.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hyperteam/rng.hpp"
#include "parallel.hpp"

namespace hyperteam {

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return s;
}

ProblemInstance remove_agents(const ProblemInstance& inst, std::span<const int> removed) {
  const int N = inst.num_agents();
  std::vector<bool> gone(N, false);
  for (int i : removed) {
    if (i < 0 || i >= N) throw InstanceError("removed agent index out of range");
    if (gone[i]) throw InstanceError("agent " + inst.agent_ids()[i] + " removed twice");
    gone[i] = true;
  }
  if (static_cast<int>(removed.size()) >= N) throw InstanceError("cannot remove every agent");
  Assignment a = inst.assignment();
  std::vector<int> budgets = inst.budgets();
  for (int i : removed) {
    a.row(i).setZero();
    budgets[i] = 0;
  }
  return ProblemInstance(inst.agent_ids(), std::move(budgets), inst.task_ids(), inst.energies(), std::move(a));
}

double linear_hop_cost(int ring) { return ring + 1.0; }

AttackResult patch(const ProblemInstance& attacked, std::span<const int> removed, const HopCost& cost) {
  const int N = attacked.num_agents();
  const int K = attacked.num_tasks();
  AttackResult out;
  out.removed.assign(removed.begin(), removed.end());
  Assignment a = attacked.assignment();

  std::vector<std::int64_t> deficiency = task_deficiency(a, attacked.energies());
  std::vector<int> spare(N);
  for (int i = 0; i < N; ++i) spare[i] = std::max(0, attacked.budgets()[i] - a.row(i).sum());
  const auto graph = co_membership_graph(a);

  std::vector<int> order;
  for (int k = 0; k < K; ++k)
    if (deficiency[k] > 0) order.push_back(k);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return deficiency[x] > deficiency[y]; });

  std::vector<int> seen(N, -1);
  for (int k : order) {
    std::vector<int> ring;
    for (int i = 0; i < N; ++i)
      if (attacked.assignment()(i, k) > 0) ring.push_back(i);
    for (int i : ring) seen[i] = k;

    for (int r = 0; !ring.empty() && deficiency[k] > 0; ++r) {
      for (int i : ring) {
        const int take = static_cast<int>(std::min<std::int64_t>(spare[i], deficiency[k]));
        if (take == 0) continue;
        a(i, k) += take;
        spare[i] -= take;
        deficiency[k] -= take;
        out.patching_cost += take * cost(r);
        if (deficiency[k] == 0) break;
      }
      std::vector<int> next;
      for (int i : ring)
        for (int j : graph[i])
          if (seen[j] != k) {
            seen[j] = k;
            next.push_back(j);
          }
      std::sort(next.begin(), next.end());
      ring = std::move(next);
    }
    out.unsatisfied_sum += std::max<std::int64_t>(0, deficiency[k]);
  }

  out.success = out.unsatisfied_sum == 0;
  out.patched_assignment = std::move(a);
  return out;
}

AttackMode parse_attack_mode(const std::string& name) {
  if (name == "random") return AttackMode::random;
  if (name == "degree" || name == "targeted-degree") return AttackMode::targeted_degree;
  throw std::invalid_argument("unknown attack mode: " + name);
}

std::string to_string(AttackMode mode) { return mode == AttackMode::random ? "random" : "degree"; }

namespace {

std::vector<int> highest_degree(const ProblemInstance& inst, int m) {
  std::vector<int> order(inst.num_agents());
  std::iota(order.begin(), order.end(), 0);
  const Assignment& a = inst.assignment();
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a.row(x).sum() > a.row(y).sum(); });
  order.resize(m);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

ExperimentSummary attack_experiment(const ProblemInstance& inst, int m, int n_exp, std::uint64_t seed,
                                    AttackMode mode, int jobs) {
  const int N = inst.num_agents();
  if (m < 0 || m >= N) throw std::invalid_argument("removal count must satisfy 0 <= m < N");
  if (n_exp < 1) throw std::invalid_argument("n_exp must be at least 1");

  ExperimentSummary summary;
  summary.n_exp = n_exp;
  summary.runs.resize(static_cast<std::size_t>(n_exp));
  detail::parallel_for(n_exp, jobs, [&](int run) {
    std::vector<int> removed;
    if (mode == AttackMode::random) {
      Rng rng(derive_seed(seed, {name_tag("attack"), static_cast<std::uint64_t>(run)}));
      std::vector<int> pool(N);
      std::iota(pool.begin(), pool.end(), 0);
      for (int s = 0; s < m; ++s) {
        const auto j = s + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(N - s)));
        std::swap(pool[s], pool[j]);
      }
      removed.assign(pool.begin(), pool.begin() + m);
      std::sort(removed.begin(), removed.end());
    } else {
      removed = highest_degree(inst, m);
    }
    auto& slot = summary.runs[static_cast<std::size_t>(run)];
    slot.run = run;
    slot.result = patch(remove_agents(inst, removed), removed);
  });

  std::vector<double> costs, unsat;
  for (const auto& r : summary.runs) {
    costs.push_back(r.result.patching_cost);
    unsat.push_back(static_cast<double>(r.result.unsatisfied_sum));
  }
  summary.patching_cost = summarize(costs);
  summary.unsatisfied_sum = summarize(unsat);
  return summary;
}

double gain(double mu2_optimized, double mu2_original) {
  if (!(mu2_original > 0.0)) throw std::invalid_argument("original mu2 must be positive");
  return mu2_optimized / mu2_original;
}

}  // namespace hyperteam
