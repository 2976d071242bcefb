#pragma once

#include "common.hpp"

namespace gmsfem {

/// Eigenpairs of a symmetric pencil A v = lambda M v, ascending, with columns
/// M-orthonormal.
struct EigResult {
  VectorXd eigenvalues;
  MatrixXd eigenvectors;
};

/// Dense solver for the smallest k finite eigenpairs of a symmetric
/// positive-semidefinite pencil.  A singular M is handled exactly by
/// eliminating its null space through a Schur complement of A, so only finite
/// eigenvalues are returned; throws NumericError if the pencil is degenerate
/// (ker A intersects ker M).
EigResult smallest_pencil_dense(const MatrixXd& A, const MatrixXd& M, int k);

/// Sparse solver for the smallest k eigenpairs: shift-invert block subspace
/// iteration with a dense Rayleigh-Ritz step per sweep.  Deterministic for a
/// fixed seed.
EigResult smallest_pencil_sparse(const SpMat& A, const SpMat& M, int k,
                                 unsigned seed = 0);

/// Dispatch: dense below `dense_threshold` unknowns, sparse otherwise.
EigResult smallest_pencil(const SpMat& A, const SpMat& M, int k,
                          int dense_threshold = 400, unsigned seed = 0);

} // namespace gmsfem
