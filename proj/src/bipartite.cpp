#include "hyperteam/bipartite.hpp"

#include "hyperteam/spectral.hpp"

namespace hyperteam {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& M, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = M(idx[a], idx[b]);
  return out;
}

const StationaryOptions kDirect{StationaryMethod::dense};

}  // namespace

Eigen::MatrixXd bipartite_adjacency(const Assignment& assignment, std::span<const int> energies) {
  const EdvwMatrices m = build_matrices(assignment, energies);
  const Eigen::Index n = assignment.rows();
  const Eigen::Index k = assignment.cols();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + k, n + k);
  A.topRightCorner(n, k) = m.W;
  A.bottomLeftCorner(k, n) = m.R.transpose();
  return A;
}

Eigen::MatrixXd bipartite_transition(const Assignment& assignment, std::span<const int> energies) {
  const EdvwMatrices m = build_matrices(assignment, energies);
  const Eigen::Index n = assignment.rows();
  const Eigen::Index k = assignment.cols();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n + k, n + k);
  P.topRightCorner(n, k) = m.vertex_degree.cwiseInverse().asDiagonal() * m.W;
  P.bottomLeftCorner(k, n) = m.edge_degree.cwiseInverse().asDiagonal() * m.R.transpose();
  return P;
}

Eigen::MatrixXd bipartite_transition(const ProblemInstance& inst) {
  return bipartite_transition(inst.assignment(), inst.energies());
}

Eigen::MatrixXd two_step(const Eigen::MatrixXd& P_bipartite) { return P_bipartite * P_bipartite; }

Eigen::MatrixXd bipartite_laplacian(const Eigen::MatrixXd& P_bipartite) {
  return laplacian(P_bipartite, stationary_distribution(P_bipartite, kDirect));
}

Eigen::VectorXd two_step_stationary(const Eigen::MatrixXd& P_two_step, Eigen::Index n_agents) {
  const Eigen::Index total = P_two_step.rows();
  const Eigen::Index n_tasks = total - n_agents;
  Eigen::VectorXd pi(total);
  pi.head(n_agents) = 0.5 * stationary_distribution(P_two_step.topLeftCorner(n_agents, n_agents));
  pi.tail(n_tasks) = 0.5 * stationary_distribution(P_two_step.bottomRightCorner(n_tasks, n_tasks));
  return pi;
}

Eigen::MatrixXd two_step_laplacian(const Eigen::MatrixXd& P_two_step, Eigen::Index n_agents) {
  return laplacian(P_two_step, two_step_stationary(P_two_step, n_agents));
}

BipartiteBundle analyze_bipartite(const ProblemInstance& inst) {
  BipartiteBundle b;
  b.n_agents = inst.num_agents();
  b.adjacency = bipartite_adjacency(inst.assignment(), inst.energies());
  const EdvwMatrices m = build_matrices(inst);
  b.degree.resize(m.vertex_degree.size() + m.edge_degree.size());
  b.degree << m.vertex_degree, m.edge_degree;
  b.P = bipartite_transition(inst);
  b.pi = stationary_distribution(b.P, kDirect);
  b.L = laplacian(b.P, b.pi);
  b.P_two_step = two_step(b.P);
  b.pi_two_step = two_step_stationary(b.P_two_step, b.n_agents);
  b.L_two_step = laplacian(b.P_two_step, b.pi_two_step);
  return b;
}

double bipartite_connectivity(const Assignment& assignment, std::span<const int> energies,
                              bool allow_disconnected) {
  const Eigen::MatrixXd P = bipartite_transition(assignment, energies);
  const Components comp = connected_components(assignment);
  if (comp.count == 1) return algebraic_connectivity(laplacian(P, stationary_distribution(P, kDirect)));
  if (!allow_disconnected)
    throw SpectralError("bipartite graph has " + std::to_string(comp.count) + " connected components");

  const Eigen::Index n = assignment.rows();
  const Eigen::Index total = P.rows();
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(total);
  for (int c = 0; c < comp.count; ++c) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < n; ++i)
      if (comp.agent_label[i] == c) members.push_back(i);
    for (Eigen::Index k = 0; k < assignment.cols(); ++k)
      if (comp.task_label[k] == c) members.push_back(n + k);
    const Eigen::VectorXd local = stationary_distribution(submatrix(P, members), kDirect);
    const double mass = static_cast<double>(members.size()) / static_cast<double>(total);
    for (std::size_t a = 0; a < members.size(); ++a) pi(members[a]) = mass * local(static_cast<Eigen::Index>(a));
  }
  return algebraic_connectivity(laplacian(P, pi));
}

double bipartite_connectivity(const ProblemInstance& inst, bool allow_disconnected) {
  return bipartite_connectivity(inst.assignment(), inst.energies(), allow_disconnected);
}

std::optional<double> active_bipartite_connectivity(const Assignment& assignment,
                                                    std::span<const int> energies) {
  const ActiveSupport support = active_support(assignment);
  if (support.agents.size() < 2) return std::nullopt;
  const Assignment sub = restrict_to(assignment, support);
  if (!is_connected(sub)) return std::nullopt;
  return bipartite_connectivity(sub, restrict_energies(energies, support));
}

}  // namespace hyperteam
