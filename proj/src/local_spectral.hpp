#pragma once

#include "coefficient.hpp"
#include "fem.hpp"
#include "mesh.hpp"

#include <memory>

namespace gmsfem {

/// Per-neighborhood assembled operators shared by the eigenproblems, the
/// corrector, snapshots and the error analysis.
struct LocalOperators {
  const CoarseNeighborhood* nb = nullptr;
  VectorXd cell_kappa;   ///< kappa restricted to the local mesh
  VectorXd cell_ktilde;  ///< ktilde restricted to the local mesh
  SpMat A;               ///< kappa-weighted stiffness (Neumann)
  SpMat Mkt;             ///< ktilde-weighted mass
  MatrixXd Bbb;          ///< consistent boundary mass on boundary nodes
  double ktilde_total = 0.0; ///< integral of ktilde over omega_i
  double boundary_len = 0.0;
  std::shared_ptr<HarmonicExtender> ext; ///< interior factorization

  const LocalMesh& mesh() const { return nb->mesh; }
};

LocalOperators make_local_operators(const CoarseNeighborhood& nb,
                                    const CoefficientField& kappa,
                                    const WeightField& weights);

enum class BasisKind { Spectral, Steklov };

/// Truncatable local eigenbasis.  Spectral kind: ktilde-orthonormal,
/// ktilde-mean-zero eigenvectors of the Neumann pencil, with the constant
/// kernel member held separately; `eigenvalues[j]` belongs to `members.col(j)`
/// (the constant's zero eigenvalue is implicit).  Steklov kind: kappa-harmonic
/// eigenfunctions, boundary-L2 orthonormal, eigenvalue 0 / constant first.
struct LocalBasisSet {
  BasisKind kind = BasisKind::Spectral;
  VectorXd eigenvalues;
  MatrixXd members;        ///< local fine nodal vectors, one per column
  VectorXd constant_member; ///< Spectral kind: normalized constant (kernel)
  double c0 = 0.0;          ///< 1 / integral of ktilde
};

/// Smallest `count` nonconstant eigenpairs of (A, M_ktilde).
LocalBasisSet solve_neumann_eig(const LocalOperators& ops, int count,
                                int dense_threshold = 400, unsigned seed = 0);

/// Smallest `count` Steklov eigenpairs of A v = lambda B v via the boundary
/// Schur complement (always dense: the reduced problem lives on the boundary).
LocalBasisSet solve_steklov_eig(const LocalOperators& ops, int count);

/// The extra local basis function: Neumann problem with rhs ktilde/∫ktilde and
/// boundary flux -1/|boundary| under the ktilde-weighted mean constraint.
VectorXd solve_corrector(const LocalOperators& ops);

/// Rank-l spectral projection: constant part + the first l-1 eigenvectors, in
/// the ktilde inner product (l counts the constant member).
VectorXd project_spectral(const LocalOperators& ops, const LocalBasisSet& basis,
                          int l, const VectorXd& v);

/// Rank-l Steklov projection of v's boundary trace, extended kappa-harmonically
/// by the stored eigenfunctions (l counts the constant member).
VectorXd project_steklov(const LocalOperators& ops, const LocalBasisSet& basis,
                         int l, const VectorXd& v);

} // namespace gmsfem
