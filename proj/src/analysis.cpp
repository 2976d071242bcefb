#include "analysis.hpp"

#include "eig.hpp"

#include <cmath>
#include <random>

namespace gmsfem {

double energy_norm_sq(const SpMat& A, const VectorXd& v) {
  return v.dot(A * v);
}

double weighted_l2_sq(const MeshRef& m, const VectorXd& cell_weight,
                      const VectorXd& v) {
  double s = 0.0;
  for (int e = 0; e < m.num_tris(); ++e) {
    const Tri& t = m.tris[e];
    const double area = tri_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
    const double a = v[t[0]], b = v[t[1]], c = v[t[2]];
    s += cell_weight[e] * area / 6.0 *
         (a * a + b * b + c * c + a * b + a * c + b * c);
  }
  return s;
}

double weighted_l2_sq_p0(const MeshRef& m, const VectorXd& cell_weight,
                         const VectorXd& cell_v) {
  double s = 0.0;
  for (int e = 0; e < m.num_tris(); ++e) {
    const Tri& t = m.tris[e];
    const double area = tri_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
    s += cell_weight[e] * area * cell_v[e] * cell_v[e];
  }
  return s;
}

double boundary_l2_sq(const MeshRef& m,
                      const std::vector<std::array<int, 2>>& edges,
                      const VectorXd& v) {
  double s = 0.0;
  for (const auto& e : edges) {
    const double len = (m.nodes[e[1]] - m.nodes[e[0]]).norm();
    const double a = v[e[0]], b = v[e[1]];
    s += len / 6.0 * (2 * a * a + 2 * b * b + 2 * a * b);
  }
  return s;
}

double smallest_dirichlet_eigenvalue(const MeshRef& m, const VectorXd& cell_a,
                                     const VectorXd& cell_m,
                                     const std::vector<int>& boundary,
                                     int dense_threshold) {
  const SpMat A = assemble_stiffness(m, cell_a);
  const SpMat M = assemble_mass(m, cell_m);
  const int n = m.num_nodes();
  std::vector<int> pos(n, -1);
  for (int b : boundary) pos[b] = -2;
  int ni = 0;
  for (int i = 0; i < n; ++i)
    if (pos[i] == -1) pos[i] = ni++;
  if (ni == 0)
    throw NumericError("smallest_dirichlet_eigenvalue: no interior unknowns");

  auto restrict_interior = [&](const SpMat& X) {
    std::vector<Triplet> trips;
    for (int col = 0; col < X.outerSize(); ++col)
      for (SpMat::InnerIterator it(X, col); it; ++it)
        if (pos[it.row()] >= 0 && pos[it.col()] >= 0)
          trips.emplace_back(pos[it.row()], pos[it.col()], it.value());
    SpMat Y(ni, ni);
    Y.setFromTriplets(trips.begin(), trips.end());
    return Y;
  };
  const EigResult eig = smallest_pencil(restrict_interior(A),
                                        restrict_interior(M), 1,
                                        dense_threshold);
  return eig.eigenvalues[0];
}

double friedrichs_constant(const LocalMesh& region, const VectorXd& cell_kappa,
                           double H, int dense_threshold) {
  const double lam =
      smallest_dirichlet_eigenvalue(MeshRef(region), cell_kappa, cell_kappa,
                                    region.boundary_nodes, dense_threshold);
  return 1.0 / (H * H * lam);
}

double poincare_constant(const LocalMesh& region, const VectorXd& cell_kappa,
                         double H, int dense_threshold) {
  const MeshRef mr(region);
  const SpMat A = assemble_stiffness(mr, cell_kappa);
  const SpMat M = assemble_mass(mr, cell_kappa);
  // Eigenvalue 0 (constants) comes first; the Poincare constant is governed
  // by the first nonzero eigenvalue.
  const EigResult eig = smallest_pencil(A, M, 2, dense_threshold);
  if (eig.eigenvalues.size() < 2 || !(eig.eigenvalues[1] > 0))
    throw NumericError("poincare_constant: no positive eigenvalue");
  return 1.0 / (H * H * eig.eigenvalues[1]);
}

double friedrichs_constant_global(const MeshHierarchy& mesh,
                                  const CoefficientField& kappa,
                                  int dense_threshold) {
  std::vector<int> boundary;
  for (int i = 0; i < mesh.num_fine_nodes(); ++i)
    if (mesh.fine_node_on_boundary[i]) boundary.push_back(i);
  const double lam = smallest_dirichlet_eigenvalue(
      MeshRef(mesh), kappa.cell_kappa, kappa.cell_kappa, boundary,
      dense_threshold);
  return 1.0 / (mesh.diam * mesh.diam * lam);
}

LocalDecomposition decompose_local(const LocalOperators& ops,
                                   const VectorXd& u_local,
                                   const VectorXd& cell_f_local,
                                   const VectorXd& corrector) {
  const LocalMesh& lm = ops.mesh();
  const MeshRef mr(lm);
  LocalDecomposition dec;
  double fint = 0.0;
  for (int e = 0; e < lm.num_tris(); ++e) {
    const Tri& t = lm.tris[e];
    fint += cell_f_local[e] * tri_area(lm.nodes[t[0]], lm.nodes[t[1]], lm.nodes[t[2]]);
  }
  dec.f_integral = fint;
  const VectorXd m = ops.Mkt * VectorXd::Ones(lm.num_nodes());
  const VectorXd bf = assemble_load(mr, cell_f_local);

  // Part I: zero-flux Neumann problem with the ktilde-mean of f removed.  The
  // two terms cancel exactly for constant data, so the compatibility check is
  // scaled by their magnitude before cancellation.
  const double scaleI = std::max(bf.cwiseAbs().maxCoeff(),
                                 std::abs(fint / ops.ktilde_total) *
                                     m.cwiseAbs().maxCoeff());
  dec.uI = solve_neumann_constrained(
      ops.A, bf - (fint / ops.ktilde_total) * m, m, scaleI);

  // Part II: kappa-harmonic with the variational boundary flux of u_local,
  // shifted by a constant flux so the Neumann data are compatible.
  const VectorXd res = ops.A * u_local - bf;
  VectorXd bII = VectorXd::Zero(lm.num_nodes());
  const VectorXd edge_int = assemble_boundary_load(mr, lm.boundary_edges, 1.0);
  // The recovered flux sums to -f_integral in exact arithmetic; using the
  // computed sum keeps the shifted Neumann data compatible to roundoff even
  // when the reference solve carries a high-contrast backward error.
  double flux_sum = 0.0;
  for (int k : lm.boundary_nodes) flux_sum += res[k];
  for (int k : lm.boundary_nodes)
    bII[k] = res[k] - (flux_sum / ops.boundary_len) * edge_int[k];
  dec.uII = solve_neumann_constrained(ops.A, bII, m);

  // Part III: the corrector carries the remaining constant flux.
  dec.uIII = fint * corrector;
  return dec;
}

StabilitySample stability_sweep(const LocalOperators& ops, int num_random,
                                unsigned seed) {
  const LocalMesh& lm = ops.mesh();
  const MeshRef mr(lm);
  const int L = lm.num_boundary();
  StabilitySample out;

  Vector2d centroid(0, 0);
  for (int k = 0; k < L; ++k) centroid += lm.nodes[lm.boundary_nodes[k]];
  centroid /= L;

  auto ratio = [&](const VectorXd& g) {
    const double gn = g.dot(ops.Bbb * g);
    if (!(gn > 0)) return 0.0;
    const VectorXd v = ops.ext->extend(g);
    return std::sqrt(weighted_l2_sq(mr, ops.cell_ktilde, v) / gn);
  };

  out.constant_ratio = ratio(VectorXd::Ones(L));
  out.max_ratio = out.constant_ratio;
  for (int k = 0; k < L; ++k)
    out.max_ratio = std::max(out.max_ratio, ratio(VectorXd::Unit(L, k)));
  for (int mfreq = 1; mfreq <= 4; ++mfreq) {
    VectorXd gc(L), gs(L);
    for (int k = 0; k < L; ++k) {
      const Vector2d d = lm.nodes[lm.boundary_nodes[k]] - centroid;
      const double th = std::atan2(d.y(), d.x());
      gc[k] = std::cos(mfreq * th);
      gs[k] = std::sin(mfreq * th);
    }
    out.max_ratio = std::max({out.max_ratio, ratio(gc), ratio(gs)});
  }
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < num_random; ++r) {
    VectorXd g(L);
    for (int k = 0; k < L; ++k) g[k] = gauss(rng);
    out.max_ratio = std::max(out.max_ratio, ratio(g));
  }
  return out;
}

} // namespace gmsfem
