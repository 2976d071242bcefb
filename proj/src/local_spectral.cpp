#include "local_spectral.hpp"

#include "eig.hpp"

#include <cmath>

namespace gmsfem {

namespace {

// Deterministic sign convention: the entry of largest magnitude is positive.
void fix_signs(MatrixXd& V) {
  for (int j = 0; j < V.cols(); ++j) {
    int imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0) V.col(j) = -V.col(j);
  }
}

} // namespace

LocalOperators make_local_operators(const CoarseNeighborhood& nb,
                                    const CoefficientField& kappa,
                                    const WeightField& weights) {
  LocalOperators ops;
  ops.nb = &nb;
  const LocalMesh& lm = nb.mesh;
  const MeshRef mr(lm);
  ops.cell_kappa = restrict_cells(kappa.cell_kappa, lm);
  ops.cell_ktilde = restrict_cells(weights.cell_ktilde, lm);
  ops.A = assemble_stiffness(mr, ops.cell_kappa);
  ops.Mkt = assemble_mass(mr, ops.cell_ktilde);
  ops.ktilde_total = ops.Mkt.sum();
  ops.boundary_len = lm.boundary_length();

  const SpMat B = assemble_boundary_mass(mr, lm.boundary_edges);
  const int nbn = lm.num_boundary();
  ops.Bbb = MatrixXd::Zero(nbn, nbn);
  std::vector<int> bpos(lm.num_nodes(), -1);
  for (int k = 0; k < nbn; ++k) bpos[lm.boundary_nodes[k]] = k;
  for (int col = 0; col < B.outerSize(); ++col)
    for (SpMat::InnerIterator it(B, col); it; ++it)
      if (bpos[it.row()] >= 0 && bpos[it.col()] >= 0)
        ops.Bbb(bpos[it.row()], bpos[it.col()]) = it.value();

  ops.ext = std::make_shared<HarmonicExtender>(lm, ops.cell_kappa);
  return ops;
}

LocalBasisSet solve_neumann_eig(const LocalOperators& ops, int count,
                                int dense_threshold, unsigned seed) {
  const int n = static_cast<int>(ops.A.rows());
  if (count < 0 || count > n - 1)
    throw NumericError("solve_neumann_eig: basis count exceeds local space");
  if (!(ops.ktilde_total > 0))
    throw NumericError("solve_neumann_eig: ktilde has zero mass");

  LocalBasisSet out;
  out.kind = BasisKind::Spectral;
  out.c0 = 1.0 / ops.ktilde_total;
  out.constant_member =
      VectorXd::Constant(n, 1.0 / std::sqrt(ops.ktilde_total));

  // The constant kernel member shows up as the zero eigenvalue of the full
  // pencil; compute one extra pair and strip it.
  const EigResult eig =
      smallest_pencil(ops.A, ops.Mkt, count + 1, dense_threshold, seed);
  if (eig.eigenvalues.size() < count + 1)
    throw NumericError("solve_neumann_eig: eigensolver returned too few pairs");
  out.eigenvalues = eig.eigenvalues.tail(count);
  out.members = eig.eigenvectors.rightCols(count);

  // Enforce the mean-zero and normalization contracts exactly.
  const VectorXd m = ops.Mkt * VectorXd::Ones(n);
  for (int j = 0; j < count; ++j) {
    VectorXd v = out.members.col(j);
    v.array() -= m.dot(v) / ops.ktilde_total;
    const double nrm = std::sqrt(v.dot(ops.Mkt * v));
    if (!(nrm > 0))
      throw NumericError("solve_neumann_eig: degenerate eigenvector");
    out.members.col(j) = v / nrm;
  }
  fix_signs(out.members);
  return out;
}

LocalBasisSet solve_steklov_eig(const LocalOperators& ops, int count) {
  const LocalMesh& lm = ops.mesh();
  const int nbn = lm.num_boundary();
  if (count < 1 || count > nbn)
    throw NumericError("solve_steklov_eig: basis count exceeds boundary space");

  // Harmonic extension of each boundary hat; the Schur complement of the
  // stiffness on the boundary block is read off from the boundary residuals.
  MatrixXd V(lm.num_nodes(), nbn);
  for (int k = 0; k < nbn; ++k)
    V.col(k) = ops.ext->extend(VectorXd::Unit(nbn, k));
  const MatrixXd AV = ops.A * V;
  MatrixXd S(nbn, nbn);
  for (int k = 0; k < nbn; ++k)
    for (int j = 0; j < nbn; ++j) S(j, k) = AV(lm.boundary_nodes[j], k);
  S = 0.5 * (S + S.transpose()).eval();

  const EigResult eig = smallest_pencil_dense(S, ops.Bbb, count);
  LocalBasisSet out;
  out.kind = BasisKind::Steklov;
  out.eigenvalues = eig.eigenvalues;
  out.eigenvalues[0] = 0.0; // exact kernel: the constant trace
  MatrixXd Wb = eig.eigenvectors;
  Wb.col(0) = VectorXd::Constant(nbn, 1.0 / std::sqrt(ops.boundary_len));
  fix_signs(Wb);
  out.members = V * Wb;
  return out;
}

VectorXd solve_corrector(const LocalOperators& ops) {
  if (!(ops.ktilde_total > 0))
    throw NumericError("solve_corrector: ktilde has zero mass");
  const int n = static_cast<int>(ops.A.rows());
  const VectorXd m = ops.Mkt * VectorXd::Ones(n);
  VectorXd b = m / ops.ktilde_total;
  b += assemble_boundary_load(MeshRef(ops.mesh()), ops.mesh().boundary_edges,
                              -1.0 / ops.boundary_len);
  return solve_neumann_constrained(ops.A, b, m);
}

VectorXd project_spectral(const LocalOperators& ops, const LocalBasisSet& basis,
                          int l, const VectorXd& v) {
  if (basis.kind != BasisKind::Spectral)
    throw NumericError("project_spectral: wrong basis kind");
  if (l < 1 || l - 1 > basis.members.cols())
    throw NumericError("project_spectral: rank out of range");
  const VectorXd w = ops.Mkt * v;
  VectorXd out = VectorXd::Constant(v.size(), basis.c0 * w.sum());
  for (int j = 0; j + 1 < l; ++j)
    out += basis.members.col(j).dot(w) * basis.members.col(j);
  return out;
}

VectorXd project_steklov(const LocalOperators& ops, const LocalBasisSet& basis,
                         int l, const VectorXd& v) {
  if (basis.kind != BasisKind::Steklov)
    throw NumericError("project_steklov: wrong basis kind");
  if (l < 1 || l > basis.members.cols())
    throw NumericError("project_steklov: rank out of range");
  const LocalMesh& lm = ops.mesh();
  const int nbn = lm.num_boundary();
  VectorXd g(nbn);
  for (int k = 0; k < nbn; ++k) g[k] = v[lm.boundary_nodes[k]];
  const VectorXd Bg = ops.Bbb * g;
  VectorXd out = VectorXd::Zero(v.size());
  for (int j = 0; j < l; ++j) {
    double c = 0.0;
    for (int k = 0; k < nbn; ++k)
      c += basis.members(lm.boundary_nodes[k], j) * Bg[k];
    out += c * basis.members.col(j);
  }
  return out;
}

} // namespace gmsfem
