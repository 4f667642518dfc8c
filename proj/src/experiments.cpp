#include "hyperteam/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hyperteam/spectral.hpp"
#include "parallel.hpp"

namespace hyperteam {

namespace {

std::vector<std::string> numbered(const char* prefix, int n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

std::vector<int> row_sums(const Assignment& a) {
  std::vector<int> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[i] = a.row(i).sum();
  return out;
}

std::vector<int> col_sums(const Assignment& a) {
  std::vector<int> out(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index k = 0; k < a.cols(); ++k) out[k] = a.col(k).sum();
  return out;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1.0));
}

}  // namespace

ProblemInstance hypergraph_instance(int n_nodes, const std::vector<std::vector<int>>& edges) {
  Assignment a = Assignment::Zero(n_nodes, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k)
    for (int v : edges[k]) a(v, static_cast<Eigen::Index>(k)) = 1;
  return ProblemInstance(numbered("v", n_nodes), row_sums(a), numbered("e", static_cast<int>(edges.size())),
                         col_sums(a), a);
}

std::vector<EnumeratedHypergraph> enumerate_small(int n_nodes, int n_edges, int jobs) {
  if (n_nodes < 2 || n_nodes > 20 || n_edges < 1) throw std::invalid_argument("unsupported enumeration size");
  std::vector<std::uint32_t> subsets;
  for (std::uint32_t mask = 0; mask < (1u << n_nodes); ++mask)
    if (std::popcount(mask) >= 2) subsets.push_back(mask);
  const auto S = static_cast<int>(subsets.size());
  if (n_edges > S) return {};

  double candidates = 1.0;
  for (int j = 0; j < n_edges; ++j) candidates = candidates * (S - j) / (j + 1);
  if (candidates > 1e6) throw std::invalid_argument("enumeration would exceed one million candidates");

  const std::uint32_t full = (1u << n_nodes) - 1;
  std::vector<std::vector<int>> combos;
  std::vector<int> idx(n_edges);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    std::uint32_t cover = 0;
    for (int j : idx) cover |= subsets[j];
    if (cover == full) {
      Assignment a = Assignment::Zero(n_nodes, n_edges);
      for (int k = 0; k < n_edges; ++k)
        for (int v = 0; v < n_nodes; ++v)
          if (subsets[idx[k]] >> v & 1u) a(v, k) = 1;
      if (is_connected(a)) combos.push_back(idx);
    }
    int p = n_edges - 1;
    while (p >= 0 && idx[p] == S - n_edges + p) --p;
    if (p < 0) break;
    ++idx[p];
    for (int q = p + 1; q < n_edges; ++q) idx[q] = idx[q - 1] + 1;
  }

  std::vector<EnumeratedHypergraph> out(combos.size());
  detail::parallel_for(static_cast<int>(combos.size()), jobs, [&](int c) {
    auto& h = out[static_cast<std::size_t>(c)];
    for (int j : combos[static_cast<std::size_t>(c)]) {
      std::vector<int> nodes;
      for (int v = 0; v < n_nodes; ++v)
        if (subsets[j] >> v & 1u) nodes.push_back(v);
      h.edges.push_back(std::move(nodes));
    }
    h.mu2 = analyze(hypergraph_instance(n_nodes, h.edges)).mu2();
  });
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.mu2 > y.mu2; });
  return out;
}

std::vector<EnumeratedHypergraph> unique_up_to_relabelling(const std::vector<EnumeratedHypergraph>& all,
                                                           int n_nodes) {
  if (n_nodes < 1 || n_nodes > 8) throw std::invalid_argument("relabelling dedup supports at most 8 nodes");
  std::vector<std::vector<int>> perms;
  std::vector<int> perm(static_cast<std::size_t>(n_nodes));
  std::iota(perm.begin(), perm.end(), 0);
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::set<std::vector<std::uint32_t>> seen;
  std::vector<EnumeratedHypergraph> out;
  for (const auto& h : all) {
    std::vector<std::uint32_t> best;
    for (const auto& p : perms) {
      std::vector<std::uint32_t> masks;
      for (const auto& e : h.edges) {
        std::uint32_t m = 0;
        for (int v : e) m |= 1u << p[static_cast<std::size_t>(v)];
        masks.push_back(m);
      }
      std::sort(masks.begin(), masks.end());
      if (best.empty() || masks < best) best = std::move(masks);
    }
    if (seen.insert(best).second) out.push_back(h);
  }
  return out;
}

std::vector<std::size_t> representatives(std::size_t total, std::size_t count) {
  std::vector<std::size_t> out;
  if (total == 0 || count == 0) return out;
  if (count == 1 || total == 1) return {0};
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t r = (j * (total - 1) + (count - 1) / 2) / (count - 1);
    if (out.empty() || out.back() != r) out.push_back(r);
  }
  return out;
}

std::vector<Eigen::MatrixXd> diffusion_comparison(const std::vector<EnumeratedHypergraph>& picks, int n_nodes,
                                                  const Eigen::VectorXd& x0, std::span<const double> times) {
  if (x0.size() != n_nodes) throw std::invalid_argument("x0 length must equal the node count");
  std::vector<Eigen::MatrixXd> out;
  for (const auto& h : picks) out.push_back(diffuse(analyze(hypergraph_instance(n_nodes, h.edges)).L, x0, times));
  return out;
}

double consensus_time(const Eigen::MatrixXd& trajectory, const Eigen::VectorXd& x0, std::span<const double> times,
                      double eps) {
  const double target = x0.mean();
  for (Eigen::Index r = 0; r < trajectory.rows(); ++r)
    if ((trajectory.row(r).array() - target).abs().maxCoeff() <= eps) return times[r];
  return std::numeric_limits<double>::infinity();
}

// ---- community rewiring ----

RewireScheme parse_scheme(const std::string& name) {
  if (name == "one_node" || name == "one-node") return RewireScheme::one_node;
  if (name == "one_edge" || name == "one-edge") return RewireScheme::one_edge;
  if (name == "head2tail") return RewireScheme::head2tail;
  if (name == "random") return RewireScheme::random;
  throw std::invalid_argument("unknown rewiring scheme: " + name);
}

std::string to_string(RewireScheme scheme) {
  switch (scheme) {
    case RewireScheme::one_node: return "one_node";
    case RewireScheme::one_edge: return "one_edge";
    case RewireScheme::head2tail: return "head2tail";
    case RewireScheme::random: return "random";
  }
  return "?";
}

const std::vector<RewireScheme>& all_schemes() {
  static const std::vector<RewireScheme> schemes = {RewireScheme::one_node, RewireScheme::one_edge,
                                                    RewireScheme::head2tail, RewireScheme::random};
  return schemes;
}

void CommunitySpec::check() const {
  if (n_communities < 2 || nodes_per_community < 2 || edges_per_community < 1)
    throw std::invalid_argument("community spec needs N_c >= 2, n_c >= 2, m_c >= 1");
}

ProblemInstance build_communities(const CommunitySpec& spec) {
  spec.check();
  const int n = spec.nodes_per_community;
  const int m = spec.edges_per_community;
  const int C = spec.n_communities;
  Assignment a = Assignment::Zero(C * n, C * m);
  for (int c = 0; c < C; ++c) a.block(c * n, c * m, n, m).setOnes();
  return ProblemInstance(numbered("a", C * n), row_sums(a), numbered("t", C * m), col_sums(a), a);
}

namespace {

struct Blocks {
  int n, m;
  int agent(int c, Rng& rng) const { return c * n + static_cast<int>(uniform_below(rng, n)); }
  bool task_in(int k, int c) const { return k / m == c; }
};

template <typename Pred>
int pick_index(Eigen::Index count, Pred&& ok, Rng& rng) {
  std::vector<int> options;
  for (Eigen::Index j = 0; j < count; ++j)
    if (ok(static_cast<int>(j))) options.push_back(static_cast<int>(j));
  if (options.empty()) return -1;
  return options[uniform_below(rng, options.size())];
}

// u leaves e for f, v leaves f for e.
bool apply_swap(Assignment& a, int u, int e, int v, int f) {
  if (u < 0 || v < 0 || e < 0 || f < 0 || u == v || e == f) return false;
  if (a(u, e) == 0 || a(v, f) == 0 || a(u, f) != 0 || a(v, e) != 0 || a(u, e) != a(v, f)) return false;
  const int w = a(u, e);
  a(u, e) = 0;
  a(v, f) = 0;
  a(u, f) = w;
  a(v, e) = w;
  return true;
}

// Edge of `u` inside community c that `v` does not hold.
int edge_of(const Assignment& a, const Blocks& b, int u, int c, int v, Rng& rng) {
  return pick_index(a.cols(), [&](int k) { return b.task_in(k, c) && a(u, k) > 0 && a(v, k) == 0; }, rng);
}

bool swap_between(Assignment& a, const Blocks& b, int u, int cu, int v, int cv, Rng& rng) {
  const int e = edge_of(a, b, u, cu, v, rng);
  const int f = edge_of(a, b, v, cv, u, rng);
  return apply_swap(a, u, e, v, f);
}

bool rewire_once(Assignment& a, const CommunitySpec& spec, RewireScheme scheme, Rng& rng) {
  const Blocks b{spec.nodes_per_community, spec.edges_per_community};
  const int C = spec.n_communities;
  switch (scheme) {
    case RewireScheme::one_node: {
      const int c0 = static_cast<int>(uniform_below(rng, C));
      const int u = b.agent(c0, rng);
      for (int c = 0; c < C; ++c) {
        if (c == c0) continue;
        if (!swap_between(a, b, u, c0, b.agent(c, rng), c, rng)) return false;
      }
      return true;
    }
    case RewireScheme::one_edge: {
      const int c0 = static_cast<int>(uniform_below(rng, C));
      const int e = c0 * b.m + static_cast<int>(uniform_below(rng, b.m));
      for (int c = 0; c < C; ++c) {
        if (c == c0) continue;
        const int v = b.agent(c, rng);
        const int f = pick_index(a.cols(), [&](int k) { return b.task_in(k, c) && a(v, k) > 0; }, rng);
        const int u = pick_index(
            a.rows(), [&](int i) { return i / b.n == c0 && a(i, e) > 0 && f >= 0 && a(i, f) == 0; }, rng);
        if (!apply_swap(a, u, e, v, f)) return false;
      }
      return true;
    }
    case RewireScheme::head2tail: {
      for (int c = 0; c + 1 < C; ++c)
        if (!swap_between(a, b, b.agent(c, rng), c, b.agent(c + 1, rng), c + 1, rng)) return false;
      return true;
    }
    case RewireScheme::random: {
      for (int s = 0; s + 1 < C; ++s) {
        const int c1 = static_cast<int>(uniform_below(rng, C));
        int c2 = static_cast<int>(uniform_below(rng, C - 1));
        if (c2 >= c1) ++c2;
        if (!swap_between(a, b, b.agent(c1, rng), c1, b.agent(c2, rng), c2, rng)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

ProblemInstance rewire(const ProblemInstance& inst, const CommunitySpec& spec, RewireScheme scheme, Rng& rng,
                       int max_retries) {
  spec.check();
  if (inst.num_agents() != spec.n_communities * spec.nodes_per_community ||
      inst.num_tasks() != spec.n_communities * spec.edges_per_community)
    throw std::invalid_argument("instance shape does not match the community spec");
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Assignment a = inst.assignment();
    if (rewire_once(a, spec, scheme, rng) && is_connected(a)) return inst.with_assignment(std::move(a));
  }
  throw InstanceError("rewiring did not produce a connected hypergraph within the retry cap");
}

// ---- power-law fits ----

PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("xs and ys differ in length");
  const std::size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("power-law fit needs at least 3 points");
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("power-law fit needs positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double mx = mean_of(lx), my = mean_of(ly);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("power-law fit needs at least two distinct x values");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    ssr += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  fit.exponent_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

// ---- scaling experiment ----

ScalingReport scaling_experiment(const ScalingOptions& options) {
  if (options.reps < 1) throw std::invalid_argument("reps must be at least 1");
  struct Job {
    RewireScheme scheme;
    int size;
    int rep;
  };
  std::vector<Job> jobs;
  for (auto scheme : options.schemes)
    for (int size : options.sizes)
      for (int rep = 0; rep < options.reps; ++rep) jobs.push_back({scheme, size, rep});

  ScalingReport report;
  report.samples.resize(jobs.size());
  detail::parallel_for(static_cast<int>(jobs.size()), options.jobs, [&](int j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    const int per = options.coupled ? job.size : options.fixed_size;
    const CommunitySpec spec{job.size, per, per};
    Rng rng(derive_seed(options.seed, {name_tag(to_string(job.scheme)), static_cast<std::uint64_t>(job.size),
                                       static_cast<std::uint64_t>(job.rep)}));
    const ProblemInstance inst = rewire(build_communities(spec), spec, job.scheme, rng);
    report.samples[static_cast<std::size_t>(j)] = {job.scheme, job.size, job.rep, analyze(inst).mu2()};
  });

  for (auto scheme : options.schemes) {
    ScalingFit fit;
    fit.scheme = scheme;
    std::vector<double> xs;
    for (int size : options.sizes) {
      std::vector<double> values;
      for (const auto& s : report.samples)
        if (s.scheme == scheme && s.n_communities == size) values.push_back(s.mu2);
      fit.sizes.push_back(size);
      fit.mean_mu2.push_back(mean_of(values));
      fit.sd_mu2.push_back(sd_of(values));
      xs.push_back(size);
    }
    if (xs.size() >= 3) {
      const PowerLawFit pl = fit_power_law(xs, fit.mean_mu2);
      fit.a = -pl.exponent;
      fit.a_stderr = pl.exponent_stderr;
      fit.intercept = pl.intercept;
      fit.r2 = pl.r2;
    }
    report.fits.push_back(std::move(fit));
  }
  return report;
}

// ---- budget sweep ----

ProblemInstance sample_subinstance(const ProblemInstance& inst, int n_tasks, double agents_per_task,
                                   double tolerance, int max_attempts, Rng& rng) {
  const int N = inst.num_agents();
  const int K = inst.num_tasks();
  if (n_tasks < 1 || n_tasks > K) throw std::invalid_argument("sample size out of range");
  const Assignment& a = inst.assignment();
  const double target = agents_per_task * n_tasks;

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<bool> task_in(K, false), agent_in(N, false);
    std::vector<int> tasks, queue{static_cast<int>(uniform_below(rng, K))};
    task_in[queue[0]] = true;
    for (std::size_t head = 0; head < queue.size() && static_cast<int>(tasks.size()) < n_tasks; ++head) {
      const int k = queue[head];
      tasks.push_back(k);
      std::vector<int> members;
      for (int i = 0; i < N; ++i)
        if (a(i, k) > 0) members.push_back(i);
      shuffle(std::span<int>(members), rng);
      for (int i : members) {
        std::vector<int> next;
        for (int t = 0; t < K; ++t)
          if (a(i, t) > 0 && !task_in[t]) next.push_back(t);
        shuffle(std::span<int>(next), rng);
        for (int t : next) {
          task_in[t] = true;
          queue.push_back(t);
        }
      }
    }
    if (static_cast<int>(tasks.size()) < n_tasks) continue;
    std::sort(tasks.begin(), tasks.end());
    std::vector<int> agents;
    for (int i = 0; i < N; ++i)
      for (int k : tasks)
        if (a(i, k) > 0) {
          agents.push_back(i);
          break;
        }
    if (std::abs(static_cast<double>(agents.size()) - target) > tolerance * target) continue;

    std::vector<std::string> agent_ids, task_ids;
    std::vector<int> budgets, energies;
    Assignment sub(static_cast<Eigen::Index>(agents.size()), n_tasks);
    for (std::size_t r = 0; r < agents.size(); ++r) {
      agent_ids.push_back(inst.agent_ids()[agents[r]]);
      budgets.push_back(inst.budgets()[agents[r]]);
      for (int c = 0; c < n_tasks; ++c) sub(static_cast<Eigen::Index>(r), c) = a(agents[r], tasks[c]);
    }
    for (int k : tasks) {
      task_ids.push_back(inst.task_ids()[k]);
      energies.push_back(inst.energies()[k]);
    }
    return ProblemInstance(std::move(agent_ids), std::move(budgets), std::move(task_ids), std::move(energies),
                           std::move(sub));
  }
  throw InstanceError("no connected sub-hypergraph of the requested shape found within the retry cap");
}

BudgetSweepReport budget_sweep(const ProblemInstance& inst, const BudgetSweepOptions& options) {
  if (options.reps < 1) throw std::invalid_argument("reps must be at least 1");
  for (int beta : options.multipliers)
    if (beta < 1) throw std::invalid_argument("budget multipliers must be positive integers");
  options.greedy.check();

  struct Draw {
    int n_tasks, rep;
  };
  std::vector<Draw> draws;
  for (int k : options.task_counts)
    for (int rep = 0; rep < options.reps; ++rep) draws.push_back({k, rep});
  std::vector<ProblemInstance> subs(draws.size());
  for (std::size_t d = 0; d < draws.size(); ++d) {
    Rng rng(derive_seed(options.seed, {name_tag("sample"), static_cast<std::uint64_t>(draws[d].n_tasks),
                                       static_cast<std::uint64_t>(draws[d].rep)}));
    subs[d] = sample_subinstance(inst, draws[d].n_tasks, options.agents_per_task, options.tolerance,
                                 options.max_attempts, rng);
  }

  BudgetSweepReport report;
  const auto B = options.multipliers.size();
  report.samples.resize(B * draws.size());
  detail::parallel_for(static_cast<int>(report.samples.size()), options.jobs, [&](int j) {
    const int beta = options.multipliers[static_cast<std::size_t>(j) / draws.size()];
    const std::size_t d = static_cast<std::size_t>(j) % draws.size();
    const ProblemInstance& sub = subs[d];
    std::vector<int> budgets = sub.budgets();
    for (int& b : budgets) b *= beta;
    GreedyParams gp = options.greedy;
    gp.seed = derive_seed(options.seed, {name_tag("greedy"), static_cast<std::uint64_t>(beta),
                                         static_cast<std::uint64_t>(draws[d].n_tasks),
                                         static_cast<std::uint64_t>(draws[d].rep)});
    const OptimizationResult r = greedy_optimize(sub.with_budgets(std::move(budgets)), gp);
    report.samples[static_cast<std::size_t>(j)] = {beta, draws[d].n_tasks, draws[d].rep, sub.num_agents(),
                                                   r.feasible ? r.best_mu2 : std::numeric_limits<double>::quiet_NaN()};
  });

  for (int beta : options.multipliers) {
    std::vector<double> xs, ys;
    for (int k : options.task_counts) {
      std::vector<double> mu, agents;
      for (const auto& s : report.samples)
        if (s.beta == beta && s.n_tasks == k && std::isfinite(s.mu2)) {
          mu.push_back(s.mu2);
          agents.push_back(s.n_agents);
        }
      if (mu.empty()) continue;
      report.curve.push_back({beta, k, mean_of(agents), mean_of(mu), sd_of(mu)});
      xs.push_back(mean_of(agents));
      ys.push_back(mean_of(mu));
    }
    if (xs.size() >= 3) report.slopes.push_back({beta, fit_power_law(xs, ys)});
  }
  return report;
}

ProblemInstance synthetic_population(int n_agents, int n_tasks, int units_per_agent, Rng& rng, int max_attempts) {
  if (n_agents < 1 || n_tasks < 1 || units_per_agent < 1) throw std::invalid_argument("bad population shape");
  const long total = static_cast<long>(n_agents) * units_per_agent;
  if (total % n_tasks != 0) throw std::invalid_argument("agent units must split evenly over tasks");
  const long energy = total / n_tasks;
  std::vector<int> stubs;
  for (int i = 0; i < n_agents; ++i) stubs.insert(stubs.end(), units_per_agent, i);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    shuffle(std::span<int>(stubs), rng);
    Assignment a = Assignment::Zero(n_agents, n_tasks);
    for (long s = 0; s < total; ++s) a(stubs[static_cast<std::size_t>(s)], s / energy) += 1;
    if (is_connected(a))
      return ProblemInstance(numbered("a", n_agents), row_sums(a), numbered("t", n_tasks), col_sums(a), a);
  }
  throw InstanceError("could not draw a connected population within the retry cap");
}

}  // namespace hyperteam
