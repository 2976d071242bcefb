#include "snapshots.hpp"

#include "eig.hpp"

namespace gmsfem {

SnapshotSpace build_snapshots(const LocalOperators& ops) {
  const LocalMesh& lm = ops.mesh();
  const int L = lm.num_boundary();
  SnapshotSpace snap;
  snap.phi.resize(lm.num_nodes(), L);
  for (int k = 0; k < L; ++k)
    snap.phi.col(k) = ops.ext->extend(VectorXd::Unit(L, k));
  return snap;
}

PodBasis pod_reduce(const LocalOperators& ops, const SnapshotSpace& snap,
                    int rank) {
  const int L = snap.count();
  if (rank < 1 || rank > L)
    throw NumericError("pod_reduce: rank out of range");
  const MatrixXd Aoff = snap.phi.transpose() * (ops.A * snap.phi);
  const MatrixXd Soff = snap.phi.transpose() * (ops.Mkt * snap.phi);
  const EigResult eig = smallest_pencil_dense(Aoff, Soff, rank);

  PodBasis pod;
  pod.eigenvalues = eig.eigenvalues;
  pod.coeffs = eig.eigenvectors;
  // Deterministic sign: largest-magnitude snapshot coefficient positive.
  for (int j = 0; j < pod.coeffs.cols(); ++j) {
    int imax = 0;
    pod.coeffs.col(j).cwiseAbs().maxCoeff(&imax);
    if (pod.coeffs(imax, j) < 0) pod.coeffs.col(j) = -pod.coeffs.col(j);
  }
  pod.members = snap.phi * pod.coeffs;
  return pod;
}

int pod_rank_from_threshold(const VectorXd& eigenvalues, double H, double tau) {
  const double cut = tau / (H * H);
  const int L = static_cast<int>(eigenvalues.size());
  for (int l = 1; l < L; ++l)
    if (eigenvalues[l] >= cut) return l;
  return L;
}

VectorXd project_pod(const LocalOperators& ops, const PodBasis& pod, int l,
                     const VectorXd& v) {
  if (l < 1 || l > pod.members.cols())
    throw NumericError("project_pod: rank out of range");
  const VectorXd w = ops.Mkt * v;
  VectorXd out = VectorXd::Zero(v.size());
  for (int j = 0; j < l; ++j)
    out += pod.members.col(j).dot(w) * pod.members.col(j);
  return out;
}

VectorXd snapshot_interpolant(const LocalOperators& ops, const VectorXd& v) {
  const LocalMesh& lm = ops.mesh();
  VectorXd g(lm.num_boundary());
  for (int k = 0; k < lm.num_boundary(); ++k) g[k] = v[lm.boundary_nodes[k]];
  return ops.ext->extend(g);
}

} // namespace gmsfem
