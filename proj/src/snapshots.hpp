#pragma once

#include "local_spectral.hpp"

namespace gmsfem {

/// kappa-harmonic extensions of the boundary fine-node hats; columns sum to
/// the constant 1 and phi_j(boundary node k) = delta_jk.
struct SnapshotSpace {
  MatrixXd phi; ///< local nodes x L

  int count() const { return static_cast<int>(phi.cols()); }
};

SnapshotSpace build_snapshots(const LocalOperators& ops);

/// Reduced basis over the snapshots: generalized eigenpairs of the
/// (kappa-stiffness, ktilde-mass) pencil restricted to the snapshot span,
/// ktilde-orthonormal, energy-diagonal with eigenvalues ascending.
struct PodBasis {
  VectorXd eigenvalues;
  MatrixXd members; ///< local nodes x rank
  MatrixXd coeffs;  ///< snapshot coordinates of each member (L x rank)
};

PodBasis pod_reduce(const LocalOperators& ops, const SnapshotSpace& snap,
                    int rank);

/// Smallest rank whose first excluded eigenvalue satisfies
/// lambda_{rank+1} >= tau / H^2 (all of them if none does).
int pod_rank_from_threshold(const VectorXd& eigenvalues, double H, double tau);

/// Rank-l ktilde-orthogonal projection onto the leading POD members.
VectorXd project_pod(const LocalOperators& ops, const PodBasis& pod, int l,
                     const VectorXd& v);

/// The unique snapshot-space member matching v's trace on the neighborhood
/// boundary (v given on local nodes).
VectorXd snapshot_interpolant(const LocalOperators& ops, const VectorXd& v);

} // namespace gmsfem
