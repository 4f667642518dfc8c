// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "hyperteam/bipartite.hpp"
#include "hyperteam/csa.hpp"
#include "hyperteam/experiments.hpp"
#include "hyperteam/greedy.hpp"
#include "hyperteam/io.hpp"
#include "hyperteam/resilience.hpp"
#include "hyperteam/spectral.hpp"
#include "oracles.hpp"

using namespace hyperteam;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---- 1 ----

Outcome spectral_exactness() {
  Assignment two(2, 1);
  two << 1, 1;
  const auto b2 = analyze(fixtures::from_grid(two, {2}));
  Eigen::Matrix2d L;
  L << 0.25, -0.25, -0.25, 0.25;
  const double err_L = (b2.L - L).cwiseAbs().maxCoeff();
  const double err2 = std::abs(b2.mu2() - 0.5);
  Assignment three(3, 1);
  three << 1, 1, 1;
  const double err3 = std::abs(analyze(fixtures::from_grid(three, {3})).mu2() - 1.0 / 3.0);
  return {std::max({err_L, err2, err3}) <= 1e-12,
          "max error " + fmt(std::max({err_L, err2, err3}))};
}

// ---- 2 ----

ProblemInstance block_union(const std::vector<ProblemInstance>& parts) {
  int N = 0, K = 0;
  for (const auto& p : parts) N += p.num_agents(), K += p.num_tasks();
  Assignment a = Assignment::Zero(N, K);
  std::vector<int> e;
  int r = 0, c = 0;
  for (const auto& p : parts) {
    a.block(r, c, p.num_agents(), p.num_tasks()) = p.assignment();
    e.insert(e.end(), p.energies().begin(), p.energies().end());
    r += p.num_agents();
    c += p.num_tasks();
  }
  return fixtures::from_grid(a, e);
}

Outcome laplacian_properties() {
  std::mt19937 gen(2024);
  double worst_row = 0, worst_pi = 0, worst_sym = 0, worst_kernel = 0, min_eig = 0, min_mu2 = 1e300;
  for (int t = 0; t < 200; ++t) {
    const int N = 2 + static_cast<int>(gen() % 29), K = 1 + static_cast<int>(gen() % 12);
    const auto inst = fixtures::random_connected(N, K, gen, 5, true, 0.25);
    const auto b = analyze(inst);
    worst_row = std::max(worst_row, (b.P.rowwise().sum().array() - 1.0).abs().maxCoeff());
    worst_pi = std::max(worst_pi, (b.pi.transpose() * b.P - b.pi.transpose()).cwiseAbs().maxCoeff());
    worst_sym = std::max(worst_sym, (b.L - b.L.transpose()).cwiseAbs().maxCoeff());
    worst_kernel = std::max(worst_kernel, (b.L * Eigen::VectorXd::Ones(N)).cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, b.eigenvalues(0));
    min_mu2 = std::min(min_mu2, b.mu2());
  }
  int multiplicity_misses = 0;
  for (int t = 0; t < 20; ++t) {
    const int parts = 2 + t % 3;
    std::vector<ProblemInstance> pieces;
    for (int p = 0; p < parts; ++p)
      pieces.push_back(fixtures::random_connected(2 + static_cast<int>(gen() % 6), 1 + static_cast<int>(gen() % 3),
                                                  gen, 3, true, 0.5));
    const auto b = analyze(block_union(pieces), true);
    int zeros = 0;
    for (Eigen::Index i = 0; i < b.eigenvalues.size(); ++i) zeros += std::abs(b.eigenvalues(i)) < 1e-9;
    multiplicity_misses += zeros != parts || b.components != parts;
  }
  const bool ok = worst_row <= 1e-10 && worst_pi <= 1e-8 && worst_sym <= 1e-12 && worst_kernel <= 1e-10 &&
                  min_eig > -1e-10 && min_mu2 > 0.0 && multiplicity_misses == 0;
  return {ok, "row " + fmt(worst_row) + ", piP " + fmt(worst_pi) + ", L1 " + fmt(worst_kernel) + ", min eig " +
                  fmt(min_eig) + ", min mu2 " + fmt(min_mu2) + ", multiplicity misses " +
                  std::to_string(multiplicity_misses)};
}

// ---- 3 ----

std::vector<double> real_eigenvalues(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  std::vector<double> out;
  for (auto v : es.eigenvalues()) out.push_back(v.real());
  std::sort(out.begin(), out.end());
  return out;
}

Outcome bipartite_blocks() {
  std::mt19937 gen(77);
  double worst_block = 0, worst_spec = 0;
  for (int t = 0; t < 100; ++t) {
    const int N = 2 + static_cast<int>(gen() % 19), K = 1 + static_cast<int>(gen() % 8);
    const auto inst = fixtures::random_connected(N, K, gen, 5, true, 0.3);
    const auto P2 = two_step(bipartite_transition(inst));
    const auto P = transition_matrix(build_matrices(inst));
    worst_block = std::max(worst_block, (P2.topLeftCorner(N, N) - P).cwiseAbs().maxCoeff());
    const auto all = real_eigenvalues(P2);
    auto blocks = real_eigenvalues(P2.topLeftCorner(N, N));
    const auto tasks = real_eigenvalues(P2.bottomRightCorner(K, K));
    blocks.insert(blocks.end(), tasks.begin(), tasks.end());
    std::sort(blocks.begin(), blocks.end());
    for (std::size_t i = 0; i < all.size(); ++i) worst_spec = std::max(worst_spec, std::abs(all[i] - blocks[i]));
  }
  return {worst_block <= 1e-12 && worst_spec <= 1e-9,
          "block error " + fmt(worst_block) + ", spectrum union error " + fmt(worst_spec)};
}

// ---- 4 ----

Outcome enumeration_oracle() {
  const auto all = enumerate_small(5, 3, 1);
  const auto expected = oracle::count_small_hypergraphs(5, 3);
  double worst = 0;
  for (const auto* h : {&all.front(), &all.back()}) {
    const auto inst = hypergraph_instance(5, h->edges);
    worst = std::max(worst, std::abs(h->mu2 - oracle::mu2(oracle::to_grid(inst.assignment()), inst.energies())));
  }

  const auto ranks = representatives(all.size(), 4);
  std::vector<EnumeratedHypergraph> picks;
  for (auto r : ranks) picks.push_back(all[r]);
  Eigen::VectorXd x0(5);
  x0 << 1.0, 0.0, 0.0, 0.0, 0.0;
  std::vector<double> times;
  for (int s = 0; s <= 8000; ++s) times.push_back(0.05 * s);
  const auto traj = diffusion_comparison(picks, 5, x0, times);
  std::vector<double> consensus;
  for (const auto& tr : traj) consensus.push_back(consensus_time(tr, x0, times, 1e-3));
  bool ordered = true;
  for (std::size_t i = 0; i < picks.size(); ++i)
    for (std::size_t j = 0; j < picks.size(); ++j)
      if (picks[i].mu2 > picks[j].mu2 + 1e-9 && !(consensus[i] <= consensus[j])) ordered = false;

  std::string times_text;
  for (std::size_t i = 0; i < picks.size(); ++i)
    times_text += (i ? " " : "") + fmt(picks[i].mu2) + "@" + fmt(consensus[i]);
  return {all.size() == expected && worst <= 1e-9 && ordered,
          std::to_string(all.size()) + " hypergraphs (oracle " + std::to_string(expected) + "), extremal error " +
              fmt(worst) + ", mu2@consensus " + times_text};
}

// ---- 5 ----

Outcome scaling_ordering() {
  ScalingOptions o;
  o.seed = 5;
  const auto report = scaling_experiment(o);
  auto fit = [&](RewireScheme s) {
    for (const auto& f : report.fits)
      if (f.scheme == s) return f;
    return ScalingFit{};
  };
  const auto h2t = fit(RewireScheme::head2tail), rnd = fit(RewireScheme::random);
  const auto edge = fit(RewireScheme::one_edge), node = fit(RewireScheme::one_node);
  const double ci = 1.96 * std::hypot(edge.a_stderr, node.a_stderr);
  const bool ok = h2t.a > rnd.a && rnd.a > edge.a && std::abs(edge.a - node.a) <= ci && h2t.a > 0 && rnd.a > 0 &&
                  edge.a > 0 && node.a > 0;
  return {ok, "a: head2tail " + fmt(h2t.a) + ", random " + fmt(rnd.a) + ", one_edge " + fmt(edge.a) +
                  ", one_node " + fmt(node.a) + " (joint 95% CI " + fmt(ci) + ")"};
}

// ---- 6 and 7 share one synthetic suite ----

struct SuiteRun {
  double mu2_input = 0, mu2_csa = 0, mu2_greedy = 0;
  bool csa_feasible = false, greedy_feasible = false;
  double mean_unsatisfied = 0;
  double spare_variant_unsatisfied = 0;
};

const std::vector<SuiteRun>& synthetic_suite() {
  static const std::vector<SuiteRun> runs = [] {
    std::vector<SuiteRun> out;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(derive_seed(seed, {name_tag("suite")}));
      const auto inst = synthetic_population(40, 10, 2, rng);
      SuiteRun r;
      r.mu2_input = *active_connectivity(inst.assignment(), inst.energies());
      CsaParams cp;
      cp.seed = seed;
      const auto csa = anneal(inst, cp);
      r.csa_feasible = csa.feasible;
      r.mu2_csa = csa.best_mu2;
      GreedyParams gp;
      gp.seed = seed;
      const auto greedy = greedy_optimize(inst, gp);
      r.greedy_feasible = greedy.feasible;
      r.mu2_greedy = greedy.best_mu2;
      r.mean_unsatisfied =
          attack_experiment(inst.with_assignment(csa.best_assignment), 4, 10, seed).unsatisfied_sum.mean;

      // Same population with one spare unit per agent, for context only.
      const auto roomy = inst.with_budgets(std::vector<int>(40, 3));
      const auto csa3 = anneal(roomy, cp);
      r.spare_variant_unsatisfied =
          attack_experiment(roomy.with_assignment(csa3.best_assignment), 4, 10, seed).unsatisfied_sum.mean;
      out.push_back(r);
    }
    return out;
  }();
  return runs;
}

Outcome csa_feasibility_and_gain() {
  bool feasible = true, improved = true, zero_unsat = true;
  std::string unsat, spare;
  for (const auto& r : synthetic_suite()) {
    feasible &= r.csa_feasible;
    improved &= r.mu2_csa >= r.mu2_input;
    zero_unsat &= r.mean_unsatisfied == 0.0;
    unsat += (unsat.empty() ? "" : " ") + fmt(r.mean_unsatisfied);
    spare += (spare.empty() ? "" : " ") + fmt(r.spare_variant_unsatisfied);
  }
  return {feasible && improved && zero_unsat,
          std::string("feasible ") + (feasible ? "yes" : "no") + ", mu2 >= initial " + (improved ? "yes" : "no") +
              ", mean unsatisfied per seed [" + unsat + "] (with B_i=3: [" + spare + "])"};
}

Outcome optimizer_ordering() {
  int ok = 0;
  std::string per_seed;
  for (const auto& r : synthetic_suite()) {
    const bool in_order = r.greedy_feasible && r.mu2_csa >= r.mu2_greedy && r.mu2_greedy >= r.mu2_input;
    ok += in_order;
    per_seed += (per_seed.empty() ? "" : "; ") + fmt(r.mu2_csa) + " / " + fmt(r.mu2_greedy) + " / " +
                fmt(r.mu2_input);
  }
  return {ok >= 4, std::to_string(ok) + "/5 seeds ordered, csa / greedy / random: " + per_seed};
}

// ---- 8 ----

Outcome budget_sweep_shape() {
  Rng rng(derive_seed(8, {name_tag("population")}));
  const auto population = synthetic_population(1200, 480, 2, rng);
  BudgetSweepOptions o;
  o.seed = 8;
  const auto report = budget_sweep(population, o);
  bool monotone = true;
  std::string curve;
  for (int k : o.task_counts) {
    double prev = -1;
    for (int beta : o.multipliers)
      for (const auto& p : report.curve)
        if (p.beta == beta && p.n_tasks == k) {
          if (p.mean_mu2 < prev) monotone = false;
          prev = p.mean_mu2;
        }
  }
  for (const auto& p : report.curve)
    curve += (curve.empty() ? "" : " ") + std::to_string(p.beta) + "x" + std::to_string(p.n_tasks) + ":" +
             fmt(p.mean_mu2) + "@N" + fmt(p.mean_agents);
  bool slopes_ok = report.slopes.size() == o.multipliers.size();
  std::string slopes;
  for (const auto& s : report.slopes) {
    slopes_ok &= s.fit.exponent >= -1.3 && s.fit.exponent <= -0.7;
    slopes += (slopes.empty() ? "" : " ") + fmt(s.fit.exponent);
  }
  return {monotone && slopes_ok, std::string("monotone in beta ") + (monotone ? "yes" : "no") + ", slopes [" +
                                     slopes + "], curve " + curve};
}

// ---- 9 ----

Outcome resilience_invariants() {
  std::mt19937 gen(99);
  int overdrawn = 0;
  for (int t = 0; t < 500; ++t) {
    const int N = 4 + static_cast<int>(gen() % 20), K = 1 + static_cast<int>(gen() % 8);
    const auto base = fixtures::random_connected(N, K, gen, 3, false, 0.3);
    auto budgets = base.budgets();
    for (auto& b : budgets) b += static_cast<int>(gen() % 4);
    const auto inst = base.with_budgets(budgets);
    std::vector<int> ids(N);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), gen);
    const std::vector<int> gone(ids.begin(), ids.begin() + 1 + static_cast<int>(gen() % (N / 2)));
    const auto attacked = remove_agents(inst, gone);
    const auto r = patch(attacked, gone);
    for (int i = 0; i < N; ++i)
      if (r.patched_assignment.row(i).sum() > attacked.budgets()[i]) ++overdrawn;
    if (r.patched_assignment.minCoeff() < 0) ++overdrawn;
  }

  Rng rng(2);
  const auto inst = fixtures::random_connected(25, 8, gen, 3);
  CsaParams p;
  p.swaps_per_proposal = 1;
  p.pack_size = 1;
  int fired = 0, wrong = 0;
  Assignment a = initialize_assignment(inst, p, rng);
  auto deficiency = task_deficiency(a, inst.energies());
  auto shortfall = [&] {
    std::int64_t s = 0;
    for (auto d : deficiency) s += std::max<std::int64_t>(0, d);
    return s;
  };
  while (fired < 10000) {
    if (shortfall() == 0) {
      a = initialize_assignment(inst, p, rng);
      deficiency = task_deficiency(a, inst.energies());
      continue;
    }
    const auto before = shortfall();
    const auto stats = perturb(a, deficiency, p, rng);
    if (stats.guided == 1) {
      ++fired;
      wrong += before - shortfall() != 1;
    }
  }
  return {overdrawn == 0 && wrong == 0, "500 patch runs, " + std::to_string(overdrawn) + " overdrawn; " +
                                            std::to_string(fired) + " guided moves, " + std::to_string(wrong) +
                                            " not reducing the shortfall by exactly 1"};
}

// ---- 10 ----

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HYPERTEAM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome replay_determinism() {
  const fs::path root = fs::temp_directory_path() / "hyperteam_acceptance_replay";
  fs::remove_all(root);
  const std::string aps = std::string(HYPERTEAM_DATA_DIR) + "/aps_1993_1994.json";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"stats", "stats --input " + aps + " --spectrum --bipartite"},
      {"csa", "optimize --input " + aps + " --method csa --max-iterations 300 --seed 4"},
      {"csa_bipartite", "optimize --input " + aps + " --method csa-bipartite --max-iterations 200 --restarts 3 --jobs 3"},
      {"greedy", "optimize --input " + aps + " --method greedy --seed 2"},
      {"attack", "attack --input " + aps + " --m 5 --n-exp 12 --jobs 4 --seed 9"},
      {"enumerate", "experiment enumerate"},
      {"diffuse", "experiment diffuse"},
      {"scaling", "experiment scaling --reps 3 --sizes 2 3 4 --jobs 4"},
      {"budget", "experiment budget-sweep --reps 2 --sizes 4 6 8 --population 400 160 2 --jobs 4"},
  };
  int compared = 0;
  std::vector<std::string> failures;
  for (const auto& [name, args] : commands) {
    const auto first = root / name / "first", again = root / name / "again";
    if (run_cli(args + " --out " + first.string()) != 0) {
      failures.push_back(name + " (run failed)");
      continue;
    }
    if (run_cli("replay " + (first / "manifest.json").string() + " --out " + again.string()) != 0) {
      failures.push_back(name + " (replay failed)");
      continue;
    }
    for (const auto& entry : fs::directory_iterator(first)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      const auto twin = again / entry.path().filename();
      if (!fs::exists(twin) || read_file(entry.path()) != read_file(twin))
        failures.push_back(name + "/" + entry.path().filename().string());
    }
  }
  std::string detail = std::to_string(compared) + " CSV files compared across " + std::to_string(commands.size()) +
                       " commands";
  for (const auto& f : failures) detail += ", mismatch " + f;
  return {failures.empty() && compared > 0, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"spectral exactness", spectral_exactness},
      {"Laplacian property suite", laplacian_properties},
      {"bipartite block identity", bipartite_blocks},
      {"enumeration oracle", enumeration_oracle},
      {"scaling ordering", scaling_ordering},
      {"CSA feasibility and attack resilience", csa_feasibility_and_gain},
      {"optimizer ordering", optimizer_ordering},
      {"budget sweep", budget_sweep_shape},
      {"resilience invariants", resilience_invariants},
      {"replay determinism", replay_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
