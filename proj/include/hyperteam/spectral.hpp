#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hyperteam/instance.hpp"

namespace hyperteam {

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Edge-dependent vertex-weighted hypergraph of an allocation.
 *
 * Hyperedge weight is the task energy, vertex weight inside a hyperedge is
 * the allocated units: W(i,k) = E_k [B_ik > 0], R(i,k) = B_ik.
 */
struct EdvwMatrices {
  Eigen::MatrixXd W;
  Eigen::MatrixXd R;
  Eigen::VectorXd vertex_degree;  // d(v_i) = sum of energies of the agent's tasks
  Eigen::VectorXd edge_degree;    // delta(e_k) = units allocated to the task
};

EdvwMatrices build_matrices(const ProblemInstance& inst);
EdvwMatrices build_matrices(const Assignment& assignment, std::span<const int> energies);

/// Two-step walk: pick a task by weight, then a teammate by allocated units.
Eigen::MatrixXd transition_matrix(const EdvwMatrices& m);

enum class StationaryMethod { automatic, dense, power };

struct StationaryOptions {
  StationaryMethod method = StationaryMethod::automatic;
  /// `automatic` switches from the dense solve to power iteration above this size.
  Eigen::Index dense_limit = 512;
  double power_tolerance = 1e-12;
  long power_max_iterations = 1'000'000;
};

/// Left eigenvector of P for eigenvalue 1, normalised to sum 1.
/// Throws SpectralError if P is not irreducible or power iteration stalls.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P, const StationaryOptions& opts = {});

/// Pi - (Pi P + P^T Pi) / 2, symmetrised to scrub rounding.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi);

/// Ascending eigenvalues with multiplicity.
Eigen::VectorXd spectrum(const Eigen::MatrixXd& L);

/// Second-smallest eigenvalue.
double algebraic_connectivity(const Eigen::MatrixXd& L);

/// x(t) = exp(-L t) x0 for each requested time; row r of the result is x(times[r]).
Eigen::MatrixXd diffuse(const Eigen::MatrixXd& L, const Eigen::VectorXd& x0, std::span<const double> times);

struct SpectralBundle {
  Eigen::MatrixXd P;
  Eigen::VectorXd pi;
  Eigen::MatrixXd L;
  Eigen::VectorXd eigenvalues;
  int components = 1;

  double mu2() const { return eigenvalues.size() > 1 ? eigenvalues(1) : 0.0; }
};

/**
 * Full spectral analysis of an instance. Disconnected instances are rejected
 * unless `allow_disconnected` is set; then each component gets its own
 * stationary distribution weighted by its share of agents, so the zero
 * eigenvalue appears once per component.
 */
SpectralBundle analyze(const ProblemInstance& inst, bool allow_disconnected = false);
SpectralBundle analyze(const Assignment& assignment, std::span<const int> energies,
                       bool allow_disconnected = false);

/**
 * mu2 of the hypergraph spanned by the agents and tasks that hold at least one
 * unit. Empty rows and columns are dropped; nullopt if fewer than two agents
 * remain or the remainder is disconnected.
 */
std::optional<double> active_connectivity(const Assignment& assignment, std::span<const int> energies);

/// Rows and columns with a positive sum, in index order.
struct ActiveSupport {
  std::vector<int> agents;
  std::vector<int> tasks;
};
ActiveSupport active_support(const Assignment& assignment);
Assignment restrict_to(const Assignment& assignment, const ActiveSupport& support);
std::vector<int> restrict_energies(std::span<const int> energies, const ActiveSupport& support);

}  // namespace hyperteam
