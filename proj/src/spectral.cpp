#include "hyperteam/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hyperteam {

namespace {

// Every state reaches state 0 and is reached from it.
bool irreducible(const Eigen::MatrixXd& P) {
  const Eigen::Index n = P.rows();
  if (n == 0) return false;
  for (bool forward : {true, false}) {
    std::vector<char> seen(n, 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index visited = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        const double w = forward ? P(u, v) : P(v, u);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++visited;
          stack.push_back(v);
        }
      }
    }
    if (visited != n) return false;
  }
  return true;
}

Eigen::VectorXd stationary_dense(const Eigen::MatrixXd& P) {
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = A.partialPivLu().solve(b);
  return pi / pi.sum();
}

Eigen::VectorXd stationary_power(const Eigen::MatrixXd& P, const StationaryOptions& opts) {
  const Eigen::Index n = P.rows();
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (long it = 0; it < opts.power_max_iterations; ++it) {
    Eigen::RowVectorXd next = pi * P;
    next /= next.sum();
    const double delta = (next - pi).lpNorm<1>();
    pi = std::move(next);
    if (delta < opts.power_tolerance) return pi.transpose();
  }
  throw SpectralError("stationary distribution did not converge within " +
                      std::to_string(opts.power_max_iterations) + " iterations");
}

}  // namespace

EdvwMatrices build_matrices(const Assignment& assignment, std::span<const int> energies) {
  const Eigen::Index n = assignment.rows();
  const Eigen::Index m = assignment.cols();
  if (static_cast<Eigen::Index>(energies.size()) != m)
    throw SpectralError("energy vector does not match task count");
  EdvwMatrices out;
  out.R = assignment.cast<double>();
  out.W = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      if (assignment(i, k) > 0) out.W(i, k) = static_cast<double>(energies[k]);
  out.vertex_degree = out.W.rowwise().sum();
  out.edge_degree = out.R.colwise().sum().transpose();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(out.vertex_degree(i) > 0.0)) throw SpectralError("isolated agent at index " + std::to_string(i));
  for (Eigen::Index k = 0; k < m; ++k)
    if (!(out.edge_degree(k) > 0.0)) throw SpectralError("empty task at index " + std::to_string(k));
  return out;
}

EdvwMatrices build_matrices(const ProblemInstance& inst) {
  return build_matrices(inst.assignment(), inst.energies());
}

Eigen::MatrixXd transition_matrix(const EdvwMatrices& m) {
  if ((m.vertex_degree.array() <= 0.0).any() || (m.edge_degree.array() <= 0.0).any())
    throw SpectralError("singular degree matrix");
  // D_V^{-1} W D_E^{-1} R^T
  const Eigen::MatrixXd left = m.vertex_degree.cwiseInverse().asDiagonal() * m.W;
  const Eigen::MatrixXd right = m.R * m.edge_degree.cwiseInverse().asDiagonal();
  return left * right.transpose();
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P, const StationaryOptions& opts) {
  if (P.rows() != P.cols() || P.rows() == 0) throw SpectralError("transition matrix must be square");
  if (!irreducible(P)) throw SpectralError("transition matrix is reducible (disconnected input)");
  const bool dense = opts.method == StationaryMethod::dense ||
                     (opts.method == StationaryMethod::automatic && P.rows() <= opts.dense_limit);
  return dense ? stationary_dense(P) : stationary_power(P, opts);
}

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
  const auto Pi = pi.asDiagonal();
  Eigen::MatrixXd PiP = Pi * P;
  Eigen::MatrixXd L = Eigen::MatrixXd(Pi) - 0.5 * (PiP + PiP.transpose());
  return 0.5 * (L + L.transpose());
}

Eigen::VectorXd spectrum(const Eigen::MatrixXd& L) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SpectralError("symmetric eigensolver failed");
  return es.eigenvalues();
}

double algebraic_connectivity(const Eigen::MatrixXd& L) {
  if (L.rows() < 2) throw SpectralError("algebraic connectivity needs at least two agents");
  return spectrum(L)(1);
}

Eigen::MatrixXd diffuse(const Eigen::MatrixXd& L, const Eigen::VectorXd& x0, std::span<const double> times) {
  if (x0.size() != L.rows()) throw SpectralError("initial condition has the wrong length");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  if (es.info() != Eigen::Success) throw SpectralError("symmetric eigensolver failed");
  const Eigen::VectorXd coeffs = es.eigenvectors().transpose() * x0;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(times.size()), L.rows());
  for (std::size_t r = 0; r < times.size(); ++r) {
    if (times[r] < 0.0) throw SpectralError("diffusion times must be nonnegative");
    if (times[r] == 0.0) {
      out.row(static_cast<Eigen::Index>(r)) = x0.transpose();
      continue;
    }
    const Eigen::VectorXd decay = (-es.eigenvalues().array() * times[r]).exp();
    out.row(static_cast<Eigen::Index>(r)) = (es.eigenvectors() * decay.cwiseProduct(coeffs)).transpose();
  }
  return out;
}

SpectralBundle analyze(const Assignment& assignment, std::span<const int> energies, bool allow_disconnected) {
  const EdvwMatrices m = build_matrices(assignment, energies);
  SpectralBundle b;
  b.P = transition_matrix(m);
  const Components comp = connected_components(assignment);
  b.components = comp.count;
  if (comp.count == 1) {
    b.pi = stationary_distribution(b.P);
  } else {
    if (!allow_disconnected)
      throw SpectralError("hypergraph has " + std::to_string(comp.count) + " connected components");
    const Eigen::Index n = assignment.rows();
    b.pi = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < comp.count; ++c) {
      std::vector<Eigen::Index> members;
      for (Eigen::Index i = 0; i < n; ++i)
        if (comp.agent_label[i] == c) members.push_back(i);
      const auto sz = static_cast<Eigen::Index>(members.size());
      Eigen::MatrixXd sub(sz, sz);
      for (Eigen::Index a = 0; a < sz; ++a)
        for (Eigen::Index c2 = 0; c2 < sz; ++c2) sub(a, c2) = b.P(members[a], members[c2]);
      const Eigen::VectorXd local = stationary_distribution(sub);
      const double mass = static_cast<double>(sz) / static_cast<double>(n);
      for (Eigen::Index a = 0; a < sz; ++a) b.pi(members[a]) = mass * local(a);
    }
  }
  b.L = laplacian(b.P, b.pi);
  b.eigenvalues = spectrum(b.L);
  return b;
}

SpectralBundle analyze(const ProblemInstance& inst, bool allow_disconnected) {
  return analyze(inst.assignment(), inst.energies(), allow_disconnected);
}

ActiveSupport active_support(const Assignment& assignment) {
  ActiveSupport s;
  for (Eigen::Index i = 0; i < assignment.rows(); ++i)
    if (assignment.row(i).sum() > 0) s.agents.push_back(static_cast<int>(i));
  for (Eigen::Index k = 0; k < assignment.cols(); ++k)
    if (assignment.col(k).sum() > 0) s.tasks.push_back(static_cast<int>(k));
  return s;
}

Assignment restrict_to(const Assignment& assignment, const ActiveSupport& support) {
  Assignment sub(static_cast<Eigen::Index>(support.agents.size()), static_cast<Eigen::Index>(support.tasks.size()));
  for (std::size_t a = 0; a < support.agents.size(); ++a)
    for (std::size_t t = 0; t < support.tasks.size(); ++t)
      sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = assignment(support.agents[a], support.tasks[t]);
  return sub;
}

std::vector<int> restrict_energies(std::span<const int> energies, const ActiveSupport& support) {
  std::vector<int> out;
  out.reserve(support.tasks.size());
  for (int k : support.tasks) out.push_back(energies[k]);
  return out;
}

std::optional<double> active_connectivity(const Assignment& assignment, std::span<const int> energies) {
  const ActiveSupport support = active_support(assignment);
  if (support.agents.size() < 2) return std::nullopt;
  const bool full = support.agents.size() == static_cast<std::size_t>(assignment.rows()) &&
                    support.tasks.size() == static_cast<std::size_t>(assignment.cols());
  const Assignment sub = full ? assignment : restrict_to(assignment, support);
  if (!is_connected(sub)) return std::nullopt;
  const std::vector<int> sub_energies =
      full ? std::vector<int>(energies.begin(), energies.end()) : restrict_energies(energies, support);
  const EdvwMatrices m = build_matrices(sub, sub_energies);
  const Eigen::MatrixXd P = transition_matrix(m);
  return algebraic_connectivity(laplacian(P, stationary_distribution(P)));
}

}  // namespace hyperteam
