#pragma once

#include "mesh.hpp"
#include "pou.hpp"

#include <string>

namespace gmsfem {

enum class SpaceKind { Spectral, Snapshot, Pod };

std::string space_kind_name(SpaceKind k); ///< "S", "SNAP", "H"
SpaceKind space_kind_from_name(const std::string& name);

/// Conforming coarse space: columns are fine nodal vectors chi_i * w for the
/// selected local members w, zeroed on the outer Dirichlet boundary and pruned
/// to a linearly independent set.
struct GlobalSpace {
  SpaceKind kind = SpaceKind::Spectral;
  SpMat basis;               ///< fine nodes x dim
  std::vector<int> col_nbhd; ///< owning coarse node per column
  int pruned = 0;            ///< columns removed by the independence rule

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Multiply each neighborhood's local members by its partition-of-unity
/// function, zero the Dirichlet rows, and prune dependent columns: a column is
/// dropped when its A-orthogonal component against the previously accepted
/// columns (neighborhood-then-index order) falls below 1e-6 relative.
GlobalSpace assemble_global(SpaceKind kind, const MeshHierarchy& mesh,
                            const PartitionOfUnity& pou,
                            const std::vector<CoarseNeighborhood>& nbhds,
                            const std::vector<std::vector<VectorXd>>& members,
                            const SpMat& A_fine);

struct CoarseSolveResult {
  VectorXd u;      ///< fine nodal values of the coarse Galerkin solution
  VectorXd coeffs; ///< coordinates in the pruned basis
};

/// Galerkin solve of the reduced SPD system B^T A B c = B^T b.
CoarseSolveResult solve_coarse(const GlobalSpace& space, const SpMat& A_fine,
                               const VectorXd& b_fine);

} // namespace gmsfem
