// hyperteam: command-line driver for the team-assignment library.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hyperteam/bipartite.hpp"
#include "hyperteam/csa.hpp"
#include "hyperteam/experiments.hpp"
#include "hyperteam/greedy.hpp"
#include "hyperteam/instance.hpp"
#include "hyperteam/io.hpp"
#include "hyperteam/resilience.hpp"
#include "hyperteam/spectral.hpp"
#include "manifest.hpp"

#ifndef HYPERTEAM_VERSION
#define HYPERTEAM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace hyperteam::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string input;
  std::string format;
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  int jobs = 1;
  bool to_stdout = false;
};

void add_common(CLI::App* sub, Common& c, bool needs_input) {
  auto* in = sub->add_option("--input", c.input, "Instance file");
  if (needs_input) in->required();
  sub->add_option("--format", c.format, "Instance format")->check(CLI::IsMember({"json", "edgelist"}));
  sub->add_option("--config", c.config, "JSON parameter file; flags win");
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--jobs", c.jobs, "Concurrent repetitions")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Output directory");
  sub->add_flag("--stdout", c.to_stdout, "Also print the main CSV on stdout");
}

// Output directory bookkeeping: every file is written atomically and listed in the manifest.
class Outputs {
 public:
  Outputs(const Common& c) : dir_(c.out), to_stdout_(c.to_stdout) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& contents, bool primary = false) {
    write_file_atomic(dir_ / name, contents);
    written_.push_back(name);
    if (primary && to_stdout_) std::cout << contents << std::flush;
    spdlog::info("wrote {}", (dir_ / name).string());
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  bool to_stdout_;
  std::vector<std::string> written_;
};

json load_config(const Common& c) {
  if (c.config.empty()) return json::object();
  try {
    json doc = json::parse(read_file(c.config));
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw UsageError("bad config file: " + std::string(e.what()));
  }
}

template <typename T>
T pick(const std::optional<T>& flag, const json& cfg, const char* key, T fallback) {
  if (flag) return *flag;
  if (cfg.contains(key)) return cfg.at(key).get<T>();
  return fallback;
}

ProblemInstance load(const std::string& path, const std::string& format) {
  return load_instance(path, format.empty() ? guess_format(path) : parse_format(format));
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::string csv_double(double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); }

// ---- parameter blocks ----

struct CsaFlags {
  std::optional<double> t0, cooling, t_stop, penalty, p_guided, coeff_tbar, coeff_ahat;
  std::optional<long> max_iterations;
  std::optional<int> swaps, pack_size, restarts;
};

void add_csa_flags(CLI::App* sub, CsaFlags& f) {
  sub->add_option("--t0", f.t0, "Initial temperature");
  sub->add_option("--cooling", f.cooling, "Geometric cooling factor");
  sub->add_option("--t-stop", f.t_stop, "Stop temperature");
  sub->add_option("--max-iterations", f.max_iterations, "Iteration cap");
  sub->add_option("--swaps", f.swaps, "Moves per proposal (0 = auto)");
  sub->add_option("--penalty", f.penalty, "Constraint penalty weight for every task and agent");
  sub->add_option("--pack-size", f.pack_size, "Energy pack size");
  sub->add_option("--p-guided", f.p_guided, "Probability of the guided move");
  sub->add_option("--coeff-tbar", f.coeff_tbar, "Penalty on mean tasks per agent");
  sub->add_option("--coeff-ahat", f.coeff_ahat, "Penalty on mean teammates per agent");
  sub->add_option("--restarts", f.restarts, "Independent chains, best kept");
}

CsaParams resolve_csa(const CsaFlags& f, const json& cfg, std::uint64_t seed) {
  CsaParams p;
  p.initial_temperature = pick(f.t0, cfg, "initial_temperature", p.initial_temperature);
  p.cooling = pick(f.cooling, cfg, "cooling", p.cooling);
  p.stop_temperature = pick(f.t_stop, cfg, "stop_temperature", p.stop_temperature);
  p.max_iterations = pick(f.max_iterations, cfg, "max_iterations", p.max_iterations);
  p.swaps_per_proposal = pick(f.swaps, cfg, "swaps_per_proposal", p.swaps_per_proposal);
  p.default_penalty = pick(f.penalty, cfg, "default_penalty", p.default_penalty);
  p.task_penalty = cfg.value("task_penalty", std::vector<double>{});
  p.agent_penalty = cfg.value("agent_penalty", std::vector<double>{});
  p.pack_size = pick(f.pack_size, cfg, "pack_size", p.pack_size);
  p.p_guided = pick(f.p_guided, cfg, "p_guided", p.p_guided);
  p.coeff_tasks_per_agent = pick(f.coeff_tbar, cfg, "coeff_tasks_per_agent", p.coeff_tasks_per_agent);
  p.coeff_teammates = pick(f.coeff_ahat, cfg, "coeff_teammates", p.coeff_teammates);
  p.seed = seed;
  try {
    p.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

json csa_json(const CsaParams& p) {
  return {{"initial_temperature", p.initial_temperature},
          {"cooling", p.cooling},
          {"stop_temperature", p.stop_temperature},
          {"max_iterations", p.max_iterations},
          {"swaps_per_proposal", p.swaps_per_proposal},
          {"default_penalty", p.default_penalty},
          {"task_penalty", p.task_penalty},
          {"agent_penalty", p.agent_penalty},
          {"pack_size", p.pack_size},
          {"p_guided", p.p_guided},
          {"coeff_tasks_per_agent", p.coeff_tasks_per_agent},
          {"coeff_teammates", p.coeff_teammates}};
}

struct GreedyFlags {
  std::optional<int> h, random_threshold;
  std::optional<bool> stochastic, exhaust;
  std::optional<double> phase2_temperature;
  std::optional<std::string> phase1_order;
};

void add_greedy_flags(CLI::App* sub, GreedyFlags& f) {
  sub->add_option("--packet", f.h, "Greedy energy packet size h");
  sub->add_option("--stochastic", f.stochastic, "Phase 2 accepts losing moves with probability exp(d/T)");
  sub->add_option("--phase2-temperature", f.phase2_temperature, "Phase 2 temperature");
  sub->add_option("--exhaust-budgets", f.exhaust, "Phase 2 spends every budget even when mu2 drops");
  sub->add_option("--random-threshold", f.random_threshold, "Above this many free agents phase 1 picks at random");
  sub->add_option("--phase1-order", f.phase1_order, "global or per-task")
      ->check(CLI::IsMember({"global", "per-task"}));
}

GreedyParams resolve_greedy(const GreedyFlags& f, const json& cfg, std::uint64_t seed) {
  GreedyParams p;
  p.h = pick(f.h, cfg, "h", p.h);
  p.stochastic_accept = pick(f.stochastic, cfg, "stochastic_accept", p.stochastic_accept);
  p.phase2_temperature = pick(f.phase2_temperature, cfg, "phase2_temperature", p.phase2_temperature);
  p.exhaust_budgets = pick(f.exhaust, cfg, "exhaust_budgets", p.exhaust_budgets);
  p.random_threshold = pick(f.random_threshold, cfg, "random_threshold", p.random_threshold);
  p.phase1_order = parse_phase1_order(pick(f.phase1_order, cfg, "phase1_order", to_string(p.phase1_order)));
  p.seed = seed;
  try {
    p.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

json greedy_json(const GreedyParams& p) {
  return {{"h", p.h},
          {"stochastic_accept", p.stochastic_accept},
          {"phase2_temperature", p.phase2_temperature},
          {"exhaust_budgets", p.exhaust_budgets},
          {"random_threshold", p.random_threshold},
          {"phase1_order", to_string(p.phase1_order)}};
}

std::string trace_csv(const std::vector<TraceRow>& trace, bool with_phase) {
  std::vector<std::string> header = {"iter", "temperature", "penalty", "mu2", "feasible", "accepted"};
  if (with_phase) header.push_back("phase");
  CsvWriter csv(header);
  for (const auto& r : trace) {
    std::vector<std::string> cells = {std::to_string(r.iter), csv_double(r.temperature), csv_double(r.penalty),
                                      csv_double(r.mu2),       r.feasible ? "1" : "0",     r.accepted ? "1" : "0"};
    if (with_phase) cells.push_back(r.phase);
    csv.add_row(cells);
  }
  return csv.str();
}

// ---- commands ----

struct Run {
  json params = json::object();
  std::vector<std::string> inputs;
};

Run cmd_stats(const Common& c, bool spectrum, bool bipartite, Outputs& out) {
  const ProblemInstance inst = load(c.input, c.format);
  const SummaryStats s = summary_stats(inst);
  CsvWriter csv({"name", "N", "K", "mean_budget", "mean_energy", "Tbar", "Abar", "Ahat"});
  csv.row(stem_of(c.input), s.n_agents, s.n_tasks, s.mean_budget, s.mean_energy, s.mean_tasks_per_agent,
          s.mean_agents_per_task, s.mean_teammates_per_agent);
  out.write("stats.csv", csv.str(), true);

  if (spectrum) {
    const SpectralBundle b = analyze(inst, true);
    CsvWriter sp({"index", "eigenvalue"});
    for (Eigen::Index i = 0; i < b.eigenvalues.size(); ++i) sp.row(static_cast<long>(i), b.eigenvalues(i));
    out.write("spectrum.csv", sp.str());
  }
  if (bipartite) {
    const BipartiteBundle b = analyze_bipartite(inst);
    const Eigen::VectorXd ev = hyperteam::spectrum(b.L);
    CsvWriter sp({"index", "eigenvalue"});
    for (Eigen::Index i = 0; i < ev.size(); ++i) sp.row(static_cast<long>(i), ev(i));
    out.write("bipartite_spectrum.csv", sp.str());
    CsvWriter pi({"index", "mode", "id", "pi", "pi_two_step"});
    for (Eigen::Index i = 0; i < b.pi.size(); ++i) {
      const bool agent = i < b.n_agents;
      const auto& id = agent ? inst.agent_ids()[i] : inst.task_ids()[i - b.n_agents];
      pi.row(static_cast<long>(i), agent ? "agent" : "task", id, b.pi(i), b.pi_two_step(i));
    }
    out.write("bipartite_pi.csv", pi.str());
  }
  return {{{"spectrum", spectrum}, {"bipartite", bipartite}}, {c.input}};
}

Run cmd_optimize(const Common& c, const std::string& method, const CsaFlags& cf, const GreedyFlags& gf,
                 Outputs& out) {
  const ProblemInstance inst = load(c.input, c.format);
  const json cfg = load_config(c);
  Run run{json::object(), {c.input}};
  if (!c.config.empty()) run.inputs.push_back(c.config);
  run.params["method"] = method;

  const Objective objective = method == "csa-bipartite" ? bipartite_objective() : hypergraph_objective();
  const auto input_mu2 = objective(inst.assignment(), inst.energies());

  OptimizationResult result;
  if (method == "greedy") {
    const GreedyParams gp = resolve_greedy(gf, cfg, c.seed);
    run.params["greedy"] = greedy_json(gp);
    result = greedy_optimize(inst, gp, objective);
  } else {
    const CsaParams cp = resolve_csa(cf, cfg, c.seed);
    const int restarts = pick(cf.restarts, cfg, "restarts", 1);
    if (restarts < 1) throw UsageError("--restarts must be at least 1");
    run.params["csa"] = csa_json(cp);
    run.params["restarts"] = restarts;
    result = restarts == 1 ? anneal(inst, cp, objective) : anneal_restarts(inst, cp, restarts, c.jobs, objective);
  }
  if (!result.note.empty()) spdlog::warn("{}", result.note);

  const double g = input_mu2 && *input_mu2 > 0.0 && std::isfinite(result.best_mu2)
                       ? gain(result.best_mu2, *input_mu2)
                       : std::numeric_limits<double>::quiet_NaN();

  json doc = instance_to_json(inst.with_assignment(result.best_assignment));
  doc["meta"] = {{"seed", c.seed},
                 {"method", method},
                 {"params", run.params},
                 {"mu2", result.best_mu2},
                 {"feasible", result.feasible},
                 {"note", result.note}};
  out.write("result.json", doc.dump(2) + "\n");
  out.write("trace.csv", trace_csv(result.trace, method == "greedy"), true);

  CsvWriter summary({"metric", "value"});
  summary.row("mu2_input", csv_double(input_mu2 ? *input_mu2 : std::nan("")));
  summary.row("mu2_best", csv_double(result.best_mu2));
  summary.row("mu2_first_feasible",
              csv_double(result.first_feasible_mu2 ? *result.first_feasible_mu2 : std::nan("")));
  summary.row("gain", csv_double(g));
  summary.row("feasible", result.feasible ? "1" : "0");
  summary.row("iterations", std::to_string(result.iterations_run));
  out.write("summary.csv", summary.str());
  return run;
}

Run cmd_attack(const Common& c, const std::string& assignment_path, int m, int n_exp, const std::string& mode,
               Outputs& out) {
  ProblemInstance inst = load(c.input, c.format);
  Run run{json::object(), {c.input}};
  if (!assignment_path.empty()) {
    const ProblemInstance other = load_instance(assignment_path, InstanceFormat::json);
    if (other.agent_ids() != inst.agent_ids() || other.task_ids() != inst.task_ids())
      throw UsageError("assignment file does not match the instance ids");
    inst = inst.with_assignment(other.assignment());
    run.inputs.push_back(assignment_path);
  }
  if (m < 0 || m >= inst.num_agents()) throw UsageError("--m must satisfy 0 <= m < N");
  if (n_exp < 1) throw UsageError("--n-exp must be at least 1");
  const ExperimentSummary s = attack_experiment(inst, m, n_exp, c.seed, parse_attack_mode(mode), c.jobs);

  CsvWriter runs({"run", "removed_ids", "patching_cost", "unsatisfied_sum", "success"});
  for (const auto& r : s.runs) {
    std::string ids;
    for (int i : r.result.removed) ids += (ids.empty() ? "" : " ") + inst.agent_ids()[i];
    runs.row(r.run, ids, r.result.patching_cost, r.result.unsatisfied_sum, r.result.success);
  }
  out.write("attack_runs.csv", runs.str());
  CsvWriter summary({"metric", "mean", "stderr", "n_exp"});
  summary.row("patching_cost", s.patching_cost.mean, s.patching_cost.stderr_, s.n_exp);
  summary.row("unsatisfied_sum", s.unsatisfied_sum.mean, s.unsatisfied_sum.stderr_, s.n_exp);
  out.write("attack_summary.csv", summary.str(), true);
  run.params = {{"m", m}, {"n_exp", n_exp}, {"mode", mode}};
  return run;
}

std::string edges_cell(const std::vector<std::vector<int>>& edges) {
  std::string s;
  for (const auto& e : edges) {
    if (!s.empty()) s += '|';
    for (std::size_t j = 0; j < e.size(); ++j) s += (j ? " " : "") + std::to_string(e[j]);
  }
  return s;
}

struct ExperimentFlags {
  int nodes = 5;
  int edges = 3;
  int reps = -1;
  std::vector<int> sizes;
  std::vector<std::string> schemes;
  bool fixed = false;
  bool dedup = false;
  int community_size = 6;
  std::vector<int> betas = {1, 3, 5};
  double agents_per_task = 4.0;
  std::vector<int> population = {1200, 480, 2};
  double t_max = 10.0;
  int steps = 101;
  std::vector<double> x0;
  double eps = 1e-3;
};

Eigen::VectorXd resolve_x0(const std::vector<double>& given, int n) {
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  if (given.empty()) {
    x0(0) = 1.0;
    return x0;
  }
  if (static_cast<int>(given.size()) != n) throw UsageError("--x0 needs one value per agent");
  for (int i = 0; i < n; ++i) x0(i) = given[i];
  return x0;
}

std::string trajectory_csv(const Eigen::MatrixXd& traj, std::span<const double> times) {
  std::vector<std::string> header = {"t"};
  for (Eigen::Index i = 0; i < traj.cols(); ++i) header.push_back("x_" + std::to_string(i));
  CsvWriter csv(header);
  for (Eigen::Index r = 0; r < traj.rows(); ++r) {
    std::vector<std::string> cells = {format_double(times[r])};
    for (Eigen::Index i = 0; i < traj.cols(); ++i) cells.push_back(format_double(traj(r, i)));
    csv.add_row(cells);
  }
  return csv.str();
}

Run cmd_experiment(const Common& c, const std::string& kind, const ExperimentFlags& f, const GreedyFlags& gf,
                   Outputs& out) {
  Run run;
  run.params["kind"] = kind;
  const json cfg = load_config(c);
  if (!c.config.empty()) run.inputs.push_back(c.config);

  if (kind == "enumerate") {
    auto list = enumerate_small(f.nodes, f.edges, c.jobs);
    if (f.dedup) {
      if (f.nodes > 8) throw UsageError("--dedup supports at most 8 nodes");
      list = unique_up_to_relabelling(list, f.nodes);
    }
    CsvWriter csv({"rank", "mu2", "edges"});
    for (std::size_t r = 0; r < list.size(); ++r) csv.row(static_cast<long>(r), list[r].mu2, edges_cell(list[r].edges));
    out.write("enumeration.csv", csv.str(), true);
    run.params.update({{"nodes", f.nodes}, {"edges", f.edges}, {"dedup", f.dedup}});
    return run;
  }

  if (kind == "diffuse") {
    if (f.steps < 2 || !(f.t_max > 0.0)) throw UsageError("diffuse needs --steps >= 2 and --t-max > 0");
    std::vector<double> times(static_cast<std::size_t>(f.steps));
    for (int s = 0; s < f.steps; ++s) times[s] = f.t_max * s / (f.steps - 1);
    run.params.update({{"t_max", f.t_max}, {"steps", f.steps}, {"x0", f.x0}});
    if (!c.input.empty()) {
      const ProblemInstance inst = load(c.input, c.format);
      run.inputs.push_back(c.input);
      const Eigen::VectorXd x0 = resolve_x0(f.x0, inst.num_agents());
      out.write("diffuse.csv", trajectory_csv(diffuse(analyze(inst).L, x0, times), times), true);
      return run;
    }
    const auto list = enumerate_small(f.nodes, f.edges, c.jobs);
    const auto ranks = representatives(list.size(), 4);
    std::vector<EnumeratedHypergraph> picks;
    for (auto r : ranks) picks.push_back(list[r]);
    const Eigen::VectorXd x0 = resolve_x0(f.x0, f.nodes);
    const auto trajs = diffusion_comparison(picks, f.nodes, x0, times);
    CsvWriter summary({"rank", "mu2", "edges", "consensus_time"});
    for (std::size_t j = 0; j < picks.size(); ++j) {
      out.write("diffuse_rank" + std::to_string(ranks[j]) + ".csv", trajectory_csv(trajs[j], times));
      summary.row(static_cast<long>(ranks[j]), picks[j].mu2, edges_cell(picks[j].edges),
                  csv_double(consensus_time(trajs[j], x0, times, f.eps)));
    }
    out.write("diffuse_summary.csv", summary.str(), true);
    run.params.update({{"nodes", f.nodes}, {"edges", f.edges}, {"eps", f.eps}});
    return run;
  }

  if (kind == "scaling") {
    ScalingOptions opt;
    opt.reps = f.reps > 0 ? f.reps : 30;
    if (!f.sizes.empty()) opt.sizes = f.sizes;
    if (!f.schemes.empty()) {
      opt.schemes.clear();
      for (const auto& s : f.schemes) opt.schemes.push_back(parse_scheme(s));
    }
    opt.coupled = !f.fixed;
    opt.fixed_size = f.community_size;
    opt.seed = c.seed;
    opt.jobs = c.jobs;
    const ScalingReport rep = scaling_experiment(opt);
    CsvWriter samples({"scheme", "N_c", "rep", "mu2"});
    for (const auto& s : rep.samples) samples.row(to_string(s.scheme), s.n_communities, s.rep, s.mu2);
    out.write("scaling.csv", samples.str());
    CsvWriter fit({"scheme", "exponent", "intercept", "R2", "exponent_stderr"});
    for (const auto& ft : rep.fits) fit.row(to_string(ft.scheme), ft.a, ft.intercept, ft.r2, ft.a_stderr);
    out.write("fit.csv", fit.str(), true);
    std::vector<std::string> names;
    for (auto s : opt.schemes) names.push_back(to_string(s));
    run.params.update({{"reps", opt.reps}, {"sizes", opt.sizes}, {"schemes", names}, {"coupled", opt.coupled},
                       {"community_size", opt.fixed_size}});
    return run;
  }

  // budget-sweep
  BudgetSweepOptions opt;
  opt.multipliers = f.betas;
  opt.reps = f.reps > 0 ? f.reps : 10;
  if (!f.sizes.empty()) opt.task_counts = f.sizes;
  opt.agents_per_task = f.agents_per_task;
  opt.greedy = resolve_greedy(gf, cfg, c.seed);
  opt.seed = c.seed;
  opt.jobs = c.jobs;
  ProblemInstance population;
  if (!c.input.empty()) {
    population = load(c.input, c.format);
    run.inputs.push_back(c.input);
  } else {
    if (f.population.size() != 3) throw UsageError("--population takes AGENTS TASKS UNITS");
    Rng rng(derive_seed(c.seed, {name_tag("population")}));
    population = synthetic_population(f.population[0], f.population[1], f.population[2], rng);
    run.params["population"] = f.population;
  }
  const BudgetSweepReport rep = budget_sweep(population, opt);
  CsvWriter samples({"beta", "K", "rep", "N", "mu2"});
  for (const auto& s : rep.samples) samples.row(s.beta, s.n_tasks, s.rep, s.n_agents, csv_double(s.mu2));
  out.write("budget_sweep.csv", samples.str());
  CsvWriter curve({"beta", "K", "mean_N", "mean_mu2", "sd_mu2"});
  for (const auto& p : rep.curve) curve.row(p.beta, p.n_tasks, p.mean_agents, p.mean_mu2, p.sd_mu2);
  out.write("budget_curve.csv", curve.str(), true);
  CsvWriter fit({"beta", "exponent", "intercept", "R2"});
  for (const auto& s : rep.slopes) fit.row(s.beta, s.fit.exponent, s.fit.intercept, s.fit.r2);
  out.write("budget_fit.csv", fit.str());
  run.params.update({{"betas", opt.multipliers},
                     {"sizes", opt.task_counts},
                     {"reps", opt.reps},
                     {"agents_per_task", opt.agents_per_task},
                     {"greedy", greedy_json(opt.greedy)}});
  return run;
}

// ---- driver ----

std::vector<std::string> absolutize_paths(std::vector<std::string> args) {
  static const std::vector<std::string> path_flags = {"--input", "--config", "--assignment"};
  for (std::size_t j = 0; j < args.size(); ++j) {
    for (const auto& flag : path_flags) {
      if (args[j] == flag && j + 1 < args.size()) {
        args[j + 1] = fs::absolute(args[j + 1]).lexically_normal().string();
      } else if (args[j].rfind(flag + "=", 0) == 0) {
        args[j] = flag + "=" + fs::absolute(args[j].substr(flag.size() + 1)).lexically_normal().string();
      }
    }
  }
  return args;
}

int dispatch(const std::vector<std::string>& args);

int replay(const std::string& manifest_path, const std::string& out_override) {
  RunManifest m = load_manifest(manifest_path);
  for (const auto& in : m.inputs) {
    if (!fs::exists(in.path)) throw std::runtime_error("manifest input missing: " + in.path);
    if (file_digest(in.path) != in.fnv1a64) spdlog::warn("input {} changed since the recorded run", in.path);
  }
  if (m.version != HYPERTEAM_VERSION) spdlog::warn("manifest written by version {}", m.version);
  std::vector<std::string> args = m.args;
  if (!out_override.empty()) {
    bool replaced = false;
    for (std::size_t j = 0; j + 1 < args.size(); ++j)
      if (args[j] == "--out") {
        args[j + 1] = out_override;
        replaced = true;
      }
    for (auto& a : args)
      if (a.rfind("--out=", 0) == 0) {
        a = "--out=" + out_override;
        replaced = true;
      }
    if (!replaced) {
      args.push_back("--out");
      args.push_back(out_override);
    }
  }
  return dispatch(args);
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Team assignment on edge-dependent vertex-weighted hypergraphs"};
  app.set_version_flag("--version", HYPERTEAM_VERSION);
  app.require_subcommand(1);

  Common common;
  auto* stats = app.add_subcommand("stats", "Summary statistics of an instance");
  add_common(stats, common, true);
  bool want_spectrum = false, want_bipartite = false;
  stats->add_flag("--spectrum", want_spectrum, "Also dump the Laplacian spectrum");
  stats->add_flag("--bipartite", want_bipartite, "Also dump the bipartite spectrum and stationary distribution");

  auto* optimize = app.add_subcommand("optimize", "Maximize algebraic connectivity under the constraints");
  add_common(optimize, common, true);
  std::string method = "csa";
  optimize->add_option("--method", method, "Optimizer")->check(CLI::IsMember({"csa", "csa-bipartite", "greedy"}));
  CsaFlags csa_flags;
  GreedyFlags greedy_flags;
  add_csa_flags(optimize, csa_flags);
  add_greedy_flags(optimize, greedy_flags);

  auto* attack = app.add_subcommand("attack", "Agent-removal attacks with patching");
  add_common(attack, common, true);
  std::string assignment_path, mode = "random";
  int m = 4, n_exp = 10;
  attack->add_option("--assignment", assignment_path, "instance-json whose allocation is attacked");
  attack->add_option("--m", m, "Agents removed per run");
  attack->add_option("--n-exp", n_exp, "Number of runs");
  attack->add_option("--mode", mode, "Removal rule")->check(CLI::IsMember({"random", "degree"}));

  auto* experiment = app.add_subcommand("experiment", "Structural experiments");
  add_common(experiment, common, false);
  std::string kind;
  experiment->add_option("kind", kind, "Experiment")
      ->required()
      ->check(CLI::IsMember({"enumerate", "scaling", "budget-sweep", "diffuse"}));
  ExperimentFlags ef;
  experiment->add_option("--nodes", ef.nodes, "Nodes for enumeration");
  experiment->add_option("--edges", ef.edges, "Hyperedges for enumeration");
  experiment->add_option("--reps", ef.reps, "Repetitions");
  experiment->add_option("--sizes", ef.sizes, "Community counts (scaling) or sampled task counts (budget-sweep)");
  experiment->add_option("--schemes", ef.schemes, "Rewiring schemes");
  experiment->add_flag("--dedup", ef.dedup, "Enumerate: one hypergraph per relabelling class");
  experiment->add_flag("--fixed", ef.fixed, "Fixed community size instead of n_c = m_c = N_c");
  experiment->add_option("--community-size", ef.community_size, "Community size in fixed mode");
  experiment->add_option("--betas", ef.betas, "Budget multipliers");
  experiment->add_option("--agents-per-task", ef.agents_per_task, "Target agent/task ratio of samples");
  experiment->add_option("--population", ef.population, "Synthetic population AGENTS TASKS UNITS")->expected(3);
  experiment->add_option("--t-max", ef.t_max, "Diffusion horizon");
  experiment->add_option("--steps", ef.steps, "Diffusion time points");
  experiment->add_option("--x0", ef.x0, "Initial condition");
  experiment->add_option("--eps", ef.eps, "Consensus tolerance");
  add_greedy_flags(experiment, greedy_flags);

  auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
  std::string manifest_path, replay_out;
  replay_cmd->add_option("manifest", manifest_path, "manifest.json")->required();
  replay_cmd->add_option("--out", replay_out, "Output directory override");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (replay_cmd->parsed()) return replay(manifest_path, replay_out);

  // Seed from the config file unless given on the command line.
  if (!common.config.empty() && app.get_subcommands().front()->count("--seed") == 0) {
    const json cfg = load_config(common);
    if (cfg.contains("seed")) {
      if (!cfg.at("seed").is_number_unsigned()) throw UsageError("config seed must be a nonnegative integer");
      common.seed = cfg.at("seed").get<std::uint64_t>();
    }
  }

  const auto started = std::chrono::steady_clock::now();
  Outputs out(common);
  Run run;
  std::string command;
  if (stats->parsed()) {
    command = "stats";
    run = cmd_stats(common, want_spectrum, want_bipartite, out);
  } else if (optimize->parsed()) {
    command = "optimize";
    run = cmd_optimize(common, method, csa_flags, greedy_flags, out);
  } else if (attack->parsed()) {
    command = "attack";
    run = cmd_attack(common, assignment_path, m, n_exp, mode, out);
  } else {
    command = "experiment";
    run = cmd_experiment(common, kind, ef, greedy_flags, out);
  }

  RunManifest manifest;
  manifest.command = command;
  manifest.args = absolutize_paths(args);
  manifest.params = run.params;
  manifest.params["jobs"] = common.jobs;
  manifest.seed = common.seed;
  for (const auto& path : run.inputs)
    manifest.inputs.push_back({fs::absolute(path).lexically_normal().string(), file_digest(path)});
  manifest.version = HYPERTEAM_VERSION;
  manifest.outputs = out.written();
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_file_atomic(out.dir() / "manifest.json", to_json(manifest).dump(2) + "\n");
  return kExitOk;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("hyperteam");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("HYPERTEAM_LOG")) {
    const auto parsed = spdlog::level::from_str(level);
    if (parsed != spdlog::level::off || std::string(level) == "off") spdlog::set_level(parsed);
  }
}

}  // namespace
}  // namespace hyperteam::cli

int main(int argc, char** argv) {
  using namespace hyperteam::cli;
  configure_logging();
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
}
