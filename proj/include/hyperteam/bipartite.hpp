#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "hyperteam/instance.hpp"

namespace hyperteam {

/**
 * Agent/task bipartite view of an allocation. Indices 0..N-1 are agents,
 * N..N+K-1 are tasks.
 *
 * The one-step walk alternates agent -> task -> agent and is therefore
 * 2-periodic; its stationary distribution is computed directly as the
 * eigenvalue-1 left null vector rather than by power iteration. The two-step
 * walk keeps the walker inside one mode, and its stationary distribution puts
 * mass 1/2 on each block.
 */
struct BipartiteBundle {
  Eigen::Index n_agents = 0;
  Eigen::MatrixXd adjacency;     // [[0, W o X], [B^T, 0]]
  Eigen::VectorXd degree;        // diag(D_V, D_E)
  Eigen::MatrixXd P;             // one-step walk
  Eigen::VectorXd pi;
  Eigen::MatrixXd L;
  Eigen::MatrixXd P_two_step;    // P^2, block diagonal
  Eigen::VectorXd pi_two_step;
  Eigen::MatrixXd L_two_step;
};

Eigen::MatrixXd bipartite_adjacency(const Assignment& assignment, std::span<const int> energies);

Eigen::MatrixXd bipartite_transition(const ProblemInstance& inst);
Eigen::MatrixXd bipartite_transition(const Assignment& assignment, std::span<const int> energies);

Eigen::MatrixXd two_step(const Eigen::MatrixXd& P_bipartite);

Eigen::MatrixXd bipartite_laplacian(const Eigen::MatrixXd& P_bipartite);
/// Laplacian of the two-step walk with per-block stationary distributions of mass 1/2.
Eigen::MatrixXd two_step_laplacian(const Eigen::MatrixXd& P_two_step, Eigen::Index n_agents);
Eigen::VectorXd two_step_stationary(const Eigen::MatrixXd& P_two_step, Eigen::Index n_agents);

BipartiteBundle analyze_bipartite(const ProblemInstance& inst);

/**
 * mu2 of the bipartite Laplacian. With `allow_disconnected` each connected
 * component gets its own stationary distribution (mass proportional to its
 * node count) so disconnected inputs report mu2 = 0 instead of throwing.
 */
double bipartite_connectivity(const ProblemInstance& inst, bool allow_disconnected = false);
double bipartite_connectivity(const Assignment& assignment, std::span<const int> energies,
                              bool allow_disconnected = false);

/// Bipartite counterpart of active_connectivity(): empty rows/columns dropped.
std::optional<double> active_bipartite_connectivity(const Assignment& assignment,
                                                    std::span<const int> energies);

}  // namespace hyperteam
