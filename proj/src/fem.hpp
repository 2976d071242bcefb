#pragma once

#include "coefficient.hpp"
#include "mesh.hpp"

#include <functional>

namespace gmsfem {

/// Lightweight non-owning view of a triangle mesh for assembly.
struct MeshRef {
  const std::vector<Vector2d>& nodes;
  const std::vector<Tri>& tris;

  MeshRef(const std::vector<Vector2d>& n, const std::vector<Tri>& t)
      : nodes(n), tris(t) {}
  MeshRef(const LocalMesh& lm) : nodes(lm.nodes), tris(lm.tris) {}
  MeshRef(const MeshHierarchy& m) : nodes(m.fine_nodes), tris(m.fine_tris) {}

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
};

enum class Provenance { Fine, SpectralGMsFEM, SnapshotGMsFEM, PodGMsFEM, Local };

struct SolutionField {
  VectorXd values;
  Provenance provenance = Provenance::Fine;
  int space_dim = 0;
};

/// P1 stiffness with cellwise-constant coefficient: one-point quadrature is
/// exact since gradients are cellwise constant.
SpMat assemble_stiffness(const MeshRef& m, const VectorXd& cell_kappa);

/// P1 mass with cellwise-constant weight, exact elemental rule
/// w |T|/12 * [[2,1,1],[1,2,1],[1,1,2]].
SpMat assemble_mass(const MeshRef& m, const VectorXd& cell_weight);

/// Consistent 1D P1 mass on the given boundary edges, as an n x n matrix with
/// zero block on non-boundary DOFs.
SpMat assemble_boundary_mass(const MeshRef& m,
                             const std::vector<std::array<int, 2>>& edges);

/// Load vector of a cellwise-constant rhs: b_n = int f phi_n.
VectorXd assemble_load(const MeshRef& m, const VectorXd& cell_f);

/// Boundary load of a constant flux g: b_n = g * int_{edges} phi_n ds.
VectorXd assemble_boundary_load(const MeshRef& m,
                                const std::vector<std::array<int, 2>>& edges,
                                double flux);

/// P1 gradient of a nodal field on one triangle.
Vector2d cell_gradient(const MeshRef& m, const Tri& t, const VectorXd& nodal);

/// Evaluate a nodal function catalogue entry (P0 by centroid) on a mesh.
VectorXd p0_from_function(const MeshRef& m, const std::function<double(double, double)>& f);

/// Solve A u = b with Dirichlet values pinned on the given nodes.  The reduced
/// system is factored with a sparse Cholesky; throws NumericError if the
/// backward error ||r|| / (||A|| ||u|| + ||b||) stays above 1e-10 after
/// iterative refinement.
VectorXd solve_dirichlet(const SpMat& A, const VectorXd& b,
                         const std::vector<int>& dirichlet_nodes,
                         const VectorXd& dirichlet_values);

/// Solve the singular Neumann system A u = b subject to the weighted zero-mean
/// constraint m^T u = 0 (m = M_w * ones) via a Lagrange multiplier.  Checks
/// compatibility |1^T b| <= 1e-10 * n * max(||b||_inf, data_scale) and the
/// constrained residual.  `data_scale` lets callers whose right-hand side is
/// an exact cancellation (so ||b||_inf itself is roundoff) supply the
/// magnitude of the data the cancellation came from.
VectorXd solve_neumann_constrained(const SpMat& A, const VectorXd& b,
                                   const VectorXd& constraint_weights,
                                   double data_scale = 0.0);

/// Reference fine solution: homogeneous Dirichlet on the outer boundary.
SolutionField solve_fine(const MeshHierarchy& mesh, const CoefficientField& kappa,
                         const VectorXd& cell_f);

/// Interior/boundary splitting tools for a local mesh: factorization of the
/// interior block of the Neumann stiffness, reused by harmonic extensions,
/// snapshots and the Steklov solver.
class HarmonicExtender {
public:
  HarmonicExtender(const LocalMesh& lm, const VectorXd& cell_kappa);

  /// kappa-harmonic extension of boundary data (indexed like lm.boundary_nodes).
  VectorXd extend(const VectorXd& boundary_values) const;

  /// Dirichlet solve with interior load: A u = b in the interior, u = g on the
  /// boundary.
  VectorXd solve(const VectorXd& interior_load_full,
                 const VectorXd& boundary_values) const;

  const SpMat& stiffness() const { return A_; }
  const std::vector<int>& interior_nodes() const { return interior_; }

private:
  const LocalMesh& lm_;
  SpMat A_;
  std::vector<int> interior_;
  std::vector<int> node_pos_; // node -> position in interior_ (or -1)
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  MatrixXd Aib_dense_; // interior x boundary coupling
};

} // namespace gmsfem
