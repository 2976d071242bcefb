#include "pou.hpp"

#include "fem.hpp"

#include <cmath>
#include <map>

namespace gmsfem {

PartitionOfUnity::PartitionOfUnity(const MeshHierarchy& mesh,
                                   const CoefficientField& kappa) {
  const int nct = static_cast<int>(mesh.coarse_tris.size());
  std::vector<std::vector<int>> coarse_fine(nct);
  for (int ft = 0; ft < static_cast<int>(mesh.fine_tris.size()); ++ft)
    coarse_fine[mesh.fine_to_coarse[ft]].push_back(ft);

  cell_grad_sq_ = VectorXd::Zero(mesh.fine_tris.size());
  // Values assigned (not summed): fine nodes on coarse-element interfaces get
  // the same affine trace from both sides.
  std::vector<std::map<int, double>> cols(mesh.num_coarse_nodes());

  for (int ct = 0; ct < nct; ++ct) {
    const LocalMesh lm = extract_submesh(mesh, coarse_fine[ct]);
    const MeshRef mr(lm);
    const SpMat A = assemble_stiffness(mr, restrict_cells(kappa.cell_kappa, lm));
    const Tri& cv = mesh.coarse_tris[ct];
    const Vector2d &a = mesh.coarse_nodes[cv[0]], &b = mesh.coarse_nodes[cv[1]],
                   &c = mesh.coarse_nodes[cv[2]];
    const double det = (b.x() - a.x()) * (c.y() - a.y()) -
                       (c.x() - a.x()) * (b.y() - a.y());

    MatrixXd sol(lm.num_nodes(), 3); // one column per coarse vertex
    for (int k = 0; k < 3; ++k) {
      VectorXd bc(lm.num_boundary());
      for (int m = 0; m < lm.num_boundary(); ++m) {
        const Vector2d& p = lm.nodes[lm.boundary_nodes[m]];
        double lam;
        if (k == 0)
          lam = ((b.x() - p.x()) * (c.y() - p.y()) -
                 (c.x() - p.x()) * (b.y() - p.y())) / det;
        else if (k == 1)
          lam = ((c.x() - p.x()) * (a.y() - p.y()) -
                 (a.x() - p.x()) * (c.y() - p.y())) / det;
        else
          lam = ((a.x() - p.x()) * (b.y() - p.y()) -
                 (b.x() - p.x()) * (a.y() - p.y())) / det;
        bc[m] = lam;
      }
      sol.col(k) = solve_dirichlet(A, VectorXd::Zero(lm.num_nodes()),
                                   lm.boundary_nodes, bc);
    }
    // The three extensions carry boundary data summing to one, so their sum is
    // one up to the solver's roundoff; normalizing per node makes the
    // partition property exact even for badly conditioned coefficients.
    for (int m = 0; m < lm.num_nodes(); ++m) sol.row(m) /= sol.row(m).sum();
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < lm.num_nodes(); ++m)
        cols[cv[k]][lm.node_to_global[m]] = sol(m, k);

    for (int t = 0; t < lm.num_tris(); ++t) {
      const int gt = lm.tri_to_global[t];
      for (int k = 0; k < 3; ++k) {
        const Vector2d g = cell_gradient(mr, lm.tris[t], sol.col(k));
        cell_grad_sq_[gt] += g.squaredNorm();
        max_gradient_ = std::max(max_gradient_, g.norm());
      }
    }
  }

  std::vector<Triplet> trips;
  for (int i = 0; i < mesh.num_coarse_nodes(); ++i)
    for (const auto& [node, v] : cols[i])
      trips.emplace_back(node, i, v);
  chi_.resize(mesh.num_fine_nodes(), mesh.num_coarse_nodes());
  chi_.setFromTriplets(trips.begin(), trips.end());
}

VectorXd PartitionOfUnity::node_values(int coarse_node) const {
  return VectorXd(chi_.col(coarse_node));
}

} // namespace gmsfem
