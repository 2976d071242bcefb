#include "fem.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace gmsfem {

Vector2d cell_gradient(const MeshRef& m, const Tri& t, const VectorXd& nodal) {
  const Vector2d &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
  const double det = (b.x() - a.x()) * (c.y() - a.y()) -
                     (c.x() - a.x()) * (b.y() - a.y());
  // gradients of the three barycentric hats
  const Vector2d g0(b.y() - c.y(), c.x() - b.x());
  const Vector2d g1(c.y() - a.y(), a.x() - c.x());
  const Vector2d g2(a.y() - b.y(), b.x() - a.x());
  return (nodal[t[0]] * g0 + nodal[t[1]] * g1 + nodal[t[2]] * g2) / det;
}

SpMat assemble_stiffness(const MeshRef& m, const VectorXd& cell_kappa) {
  if (m.num_tris() == 0) throw NumericError("assemble_stiffness: empty mesh");
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(9) * m.num_tris());
  for (int e = 0; e < m.num_tris(); ++e) {
    const Tri& t = m.tris[e];
    const Vector2d &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
    const double det = (b.x() - a.x()) * (c.y() - a.y()) -
                       (c.x() - a.x()) * (b.y() - a.y());
    const double area = 0.5 * std::abs(det);
    const Vector2d g[3] = {Vector2d(b.y() - c.y(), c.x() - b.x()) / det,
                           Vector2d(c.y() - a.y(), a.x() - c.x()) / det,
                           Vector2d(a.y() - b.y(), b.x() - a.x()) / det};
    const double k = cell_kappa[e];
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        trips.emplace_back(t[r], t[s], k * area * g[r].dot(g[s]));
  }
  SpMat A(m.num_nodes(), m.num_nodes());
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

SpMat assemble_mass(const MeshRef& m, const VectorXd& cell_weight) {
  if (m.num_tris() == 0) throw NumericError("assemble_mass: empty mesh");
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(9) * m.num_tris());
  for (int e = 0; e < m.num_tris(); ++e) {
    const Tri& t = m.tris[e];
    const double area = tri_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
    const double w = cell_weight[e] * area / 12.0;
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        trips.emplace_back(t[r], t[s], w * (r == s ? 2.0 : 1.0));
  }
  SpMat M(m.num_nodes(), m.num_nodes());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

SpMat assemble_boundary_mass(const MeshRef& m,
                             const std::vector<std::array<int, 2>>& edges) {
  std::vector<Triplet> trips;
  trips.reserve(4 * edges.size());
  for (const auto& e : edges) {
    const double len = (m.nodes[e[1]] - m.nodes[e[0]]).norm();
    trips.emplace_back(e[0], e[0], len / 3.0);
    trips.emplace_back(e[1], e[1], len / 3.0);
    trips.emplace_back(e[0], e[1], len / 6.0);
    trips.emplace_back(e[1], e[0], len / 6.0);
  }
  SpMat B(m.num_nodes(), m.num_nodes());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

VectorXd assemble_load(const MeshRef& m, const VectorXd& cell_f) {
  VectorXd b = VectorXd::Zero(m.num_nodes());
  for (int e = 0; e < m.num_tris(); ++e) {
    const Tri& t = m.tris[e];
    const double area = tri_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
    const double v = cell_f[e] * area / 3.0;
    for (int r = 0; r < 3; ++r) b[t[r]] += v;
  }
  return b;
}

VectorXd assemble_boundary_load(const MeshRef& m,
                                const std::vector<std::array<int, 2>>& edges,
                                double flux) {
  VectorXd b = VectorXd::Zero(m.num_nodes());
  for (const auto& e : edges) {
    const double len = (m.nodes[e[1]] - m.nodes[e[0]]).norm();
    b[e[0]] += flux * len / 2.0;
    b[e[1]] += flux * len / 2.0;
  }
  return b;
}

VectorXd p0_from_function(const MeshRef& m,
                          const std::function<double(double, double)>& f) {
  VectorXd out(m.num_tris());
  for (int e = 0; e < m.num_tris(); ++e) {
    const Tri& t = m.tris[e];
    const Vector2d c = (m.nodes[t[0]] + m.nodes[t[1]] + m.nodes[t[2]]) / 3.0;
    out[e] = f(c.x(), c.y());
  }
  return out;
}

VectorXd solve_dirichlet(const SpMat& A, const VectorXd& b,
                         const std::vector<int>& dirichlet_nodes,
                         const VectorXd& dirichlet_values) {
  const int n = static_cast<int>(A.rows());
  std::vector<char> is_dir(n, 0);
  for (int d : dirichlet_nodes) is_dir[d] = 1;
  std::vector<int> free_pos(n, -1);
  std::vector<int> free_nodes;
  for (int i = 0; i < n; ++i)
    if (!is_dir[i]) {
      free_pos[i] = static_cast<int>(free_nodes.size());
      free_nodes.push_back(i);
    }
  VectorXd u = VectorXd::Zero(n);
  for (size_t k = 0; k < dirichlet_nodes.size(); ++k)
    u[dirichlet_nodes[k]] = dirichlet_values[k];
  const int nf = static_cast<int>(free_nodes.size());
  if (nf == 0) return u;

  std::vector<Triplet> trips;
  VectorXd rhs(nf);
  for (int k = 0; k < nf; ++k) rhs[k] = b[free_nodes[k]];
  for (int col = 0; col < A.outerSize(); ++col)
    for (SpMat::InnerIterator it(A, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (free_pos[r] < 0) continue;
      if (free_pos[c] >= 0)
        trips.emplace_back(free_pos[r], free_pos[c], it.value());
      else
        rhs[free_pos[r]] -= it.value() * u[c];
    }
  SpMat Af(nf, nf);
  Af.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<SpMat> ldlt(Af);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("solve_dirichlet: factorization failed");
  VectorXd uf = ldlt.solve(rhs);
  // High-contrast coefficients leave the reduced system ill conditioned; a few
  // refinement sweeps drive the backward error down to roundoff, so the
  // residual is judged against ||A||*||u|| + ||b|| rather than ||b|| alone.
  double anorm = 0.0;
  for (int col = 0; col < Af.outerSize(); ++col)
    for (SpMat::InnerIterator it(Af, col); it; ++it)
      anorm = std::max(anorm, std::abs(it.value()));
  double res = (rhs - Af * uf).norm();
  for (int sweep = 0; sweep < 10; ++sweep) {
    const VectorXd cand = uf + ldlt.solve(rhs - Af * uf);
    const double cres = (rhs - Af * cand).norm();
    if (cres >= res) break; // stagnated at roundoff
    uf = cand;
    res = cres;
  }
  if (res > 1e-10 * (anorm * uf.norm() + rhs.norm()) + 1e-300)
    throw NumericError("solve_dirichlet: residual too large");
  for (int k = 0; k < nf; ++k) u[free_nodes[k]] = uf[k];
  return u;
}

VectorXd solve_neumann_constrained(const SpMat& A, const VectorXd& b,
                                   const VectorXd& constraint_weights,
                                   double data_scale) {
  const int n = static_cast<int>(A.rows());
  const double bscale =
      std::max({b.cwiseAbs().maxCoeff(), data_scale, 1e-300}) * n;
  if (std::abs(b.sum()) > 1e-10 * bscale)
    throw NumericError("solve_neumann_constrained: incompatible data");
  const VectorXd m = constraint_weights;
  if (m.sum() <= 0)
    throw NumericError("solve_neumann_constrained: degenerate mean constraint");

  std::vector<Triplet> trips;
  trips.reserve(A.nonZeros() + static_cast<size_t>(2) * n);
  for (int col = 0; col < A.outerSize(); ++col)
    for (SpMat::InnerIterator it(A, col); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                         it.value());
  for (int i = 0; i < n; ++i) {
    if (m[i] != 0.0) {
      trips.emplace_back(i, n, m[i]);
      trips.emplace_back(n, i, m[i]);
    }
  }
  SpMat K(n + 1, n + 1);
  K.setFromTriplets(trips.begin(), trips.end());
  K.makeCompressed();
  Eigen::SparseLU<SpMat> lu(K);
  if (lu.info() != Eigen::Success)
    throw NumericError("solve_neumann_constrained: factorization failed");
  VectorXd rhs(n + 1);
  rhs.head(n) = b;
  rhs[n] = 0.0;
  VectorXd sol = lu.solve(rhs);
  double knorm = 0.0;
  for (int col = 0; col < K.outerSize(); ++col)
    for (SpMat::InnerIterator it(K, col); it; ++it)
      knorm = std::max(knorm, std::abs(it.value()));
  double rnorm = (rhs - K * sol).norm();
  for (int sweep = 0; sweep < 10; ++sweep) {
    const VectorXd cand = sol + lu.solve(rhs - K * sol);
    const double cres = (rhs - K * cand).norm();
    if (cres >= rnorm) break; // stagnated at roundoff
    sol = cand;
    rnorm = cres;
  }
  if (rnorm > 1e-10 * (knorm * sol.norm() + rhs.norm()) + 1e-300)
    throw NumericError("solve_neumann_constrained: residual too large");
  return sol.head(n);
}

SolutionField solve_fine(const MeshHierarchy& mesh, const CoefficientField& kappa,
                         const VectorXd& cell_f) {
  MeshRef mr(mesh);
  const SpMat A = assemble_stiffness(mr, kappa.cell_kappa);
  const VectorXd b = assemble_load(mr, cell_f);
  std::vector<int> dir;
  for (int i = 0; i < mesh.num_fine_nodes(); ++i)
    if (mesh.fine_node_on_boundary[i]) dir.push_back(i);
  SolutionField s;
  s.values = solve_dirichlet(A, b, dir, VectorXd::Zero(dir.size()));
  s.provenance = Provenance::Fine;
  s.space_dim = mesh.num_fine_nodes() - static_cast<int>(dir.size());
  return s;
}

HarmonicExtender::HarmonicExtender(const LocalMesh& lm, const VectorXd& cell_kappa)
    : lm_(lm) {
  A_ = assemble_stiffness(MeshRef(lm), cell_kappa);
  const int n = lm.num_nodes();
  std::vector<char> is_bnd(n, 0);
  for (int b : lm.boundary_nodes) is_bnd[b] = 1;
  node_pos_.assign(n, -1);
  for (int i = 0; i < n; ++i)
    if (!is_bnd[i]) {
      node_pos_[i] = static_cast<int>(interior_.size());
      interior_.push_back(i);
    }
  const int ni = static_cast<int>(interior_.size());
  const int nb = lm.num_boundary();
  std::vector<int> bpos(n, -1);
  for (int k = 0; k < nb; ++k) bpos[lm.boundary_nodes[k]] = k;

  std::vector<Triplet> tii;
  Aib_dense_ = MatrixXd::Zero(ni, nb);
  for (int col = 0; col < A_.outerSize(); ++col)
    for (SpMat::InnerIterator it(A_, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (node_pos_[r] >= 0 && node_pos_[c] >= 0)
        tii.emplace_back(node_pos_[r], node_pos_[c], it.value());
      else if (node_pos_[r] >= 0 && bpos[c] >= 0)
        Aib_dense_(node_pos_[r], bpos[c]) += it.value();
    }
  SpMat Aii(ni, ni);
  Aii.setFromTriplets(tii.begin(), tii.end());
  ldlt_.compute(Aii);
  if (ldlt_.info() != Eigen::Success)
    throw NumericError("HarmonicExtender: interior factorization failed");
}

VectorXd HarmonicExtender::extend(const VectorXd& boundary_values) const {
  return solve(VectorXd::Zero(lm_.num_nodes()), boundary_values);
}

VectorXd HarmonicExtender::solve(const VectorXd& interior_load_full,
                                 const VectorXd& boundary_values) const {
  const int ni = static_cast<int>(interior_.size());
  VectorXd rhs(ni);
  for (int k = 0; k < ni; ++k) rhs[k] = interior_load_full[interior_[k]];
  rhs -= Aib_dense_ * boundary_values;
  const VectorXd ui = ldlt_.solve(rhs);
  VectorXd u = VectorXd::Zero(lm_.num_nodes());
  for (int k = 0; k < ni; ++k) u[interior_[k]] = ui[k];
  for (int k = 0; k < lm_.num_boundary(); ++k)
    u[lm_.boundary_nodes[k]] = boundary_values[k];
  return u;
}

} // namespace gmsfem
