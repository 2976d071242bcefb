#include "eig.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace gmsfem {

EigResult smallest_pencil_dense(const MatrixXd& A, const MatrixXd& M, int k) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || M.rows() != n || M.cols() != n)
    throw NumericError("smallest_pencil_dense: size mismatch");
  if (k <= 0) return {VectorXd(0), MatrixXd(n, 0)};

  Eigen::SelfAdjointEigenSolver<MatrixXd> em(M);
  if (em.info() != Eigen::Success)
    throw NumericError("smallest_pencil_dense: mass eigendecomposition failed");
  const VectorXd d = em.eigenvalues(); // ascending
  const double dmax = d[n - 1];
  if (!(dmax > 0))
    throw NumericError("smallest_pencil_dense: mass matrix is not PSD");
  const double dtol = 1e-12 * dmax;
  int nn = 0;
  while (nn < n && d[nn] <= dtol) ++nn;
  const int r = n - nn;
  if (r == 0) throw NumericError("smallest_pencil_dense: mass matrix is zero");

  const MatrixXd At = em.eigenvectors().transpose() * A * em.eigenvectors();
  MatrixXd S = At.bottomRightCorner(r, r);
  MatrixXd NtoR; // null-space coefficients per range direction
  if (nn > 0) {
    // Finite eigenvectors satisfy the null-space rows of the pencil exactly:
    // the null block of A must be inverted, not discarded.
    const MatrixXd ANN = At.topLeftCorner(nn, nn);
    const MatrixXd ANR = At.topRightCorner(nn, r);
    Eigen::LDLT<MatrixXd> ldlt(ANN);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0)
      throw NumericError("smallest_pencil_dense: degenerate pencil (shared kernel)");
    NtoR = -ldlt.solve(ANR);
    S -= ANR.transpose() * (-NtoR);
  }
  const VectorXd dinvsq = d.tail(r).cwiseSqrt().cwiseInverse();
  MatrixXd C = dinvsq.asDiagonal() * S * dinvsq.asDiagonal();
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(C);
  if (es.info() != Eigen::Success)
    throw NumericError("smallest_pencil_dense: reduced eigendecomposition failed");

  const int kk = std::min(k, r);
  EigResult out;
  out.eigenvalues = es.eigenvalues().head(kk);
  const MatrixXd vR = dinvsq.asDiagonal() * es.eigenvectors().leftCols(kk);
  out.eigenvectors = em.eigenvectors().rightCols(r) * vR;
  if (nn > 0) out.eigenvectors += em.eigenvectors().leftCols(nn) * (NtoR * vR);
  return out;
}

EigResult smallest_pencil_sparse(const SpMat& A, const SpMat& M, int k,
                                 unsigned seed) {
  const int n = static_cast<int>(A.rows());
  if (k <= 0) return {VectorXd(0), MatrixXd(n, 0)};
  if (k > n) k = n;
  const int p = std::min(n, k + 8);

  const double trA = A.diagonal().sum();
  const double trM = M.diagonal().sum();
  if (!(trM > 0)) throw NumericError("smallest_pencil_sparse: mass is not PSD");
  double shift = std::max(1e-4 * trA / trM, 1e-300);

  Eigen::SimplicialLDLT<SpMat> ldlt;
  for (int attempt = 0;; ++attempt) {
    SpMat K = A + shift * M;
    ldlt.compute(K);
    if (ldlt.info() == Eigen::Success) break;
    if (attempt >= 4)
      throw NumericError("smallest_pencil_sparse: shifted factorization failed");
    shift *= 100.0;
  }

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);

  constexpr double kTol = 1e-8;
  constexpr int kMaxIter = 500;
  // Matrix-scale estimates keep the residual test meaningful for eigenpairs
  // with |lambda| near zero (e.g. the constant mode of a zero-flux pencil),
  // where ||A v|| itself is pure roundoff.
  double anorm = 0.0, mnorm = 0.0;
  for (int col = 0; col < A.outerSize(); ++col)
    for (SpMat::InnerIterator it(A, col); it; ++it)
      anorm = std::max(anorm, std::abs(it.value()));
  for (int col = 0; col < M.outerSize(); ++col)
    for (SpMat::InnerIterator it(M, col); it; ++it)
      mnorm = std::max(mnorm, std::abs(it.value()));
  EigResult ritz;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const MatrixXd Y = ldlt.solve(M * X);
    Eigen::HouseholderQR<MatrixXd> qr(Y);
    const MatrixXd Q =
        qr.householderQ() * MatrixXd::Identity(n, std::min<int>(p, n));
    const MatrixXd Aq = Q.transpose() * (A * Q);
    const MatrixXd Mq = Q.transpose() * (M * Q);
    const EigResult rr = smallest_pencil_dense(Aq, Mq, p);
    ritz.eigenvalues = rr.eigenvalues;
    ritz.eigenvectors = Q * rr.eigenvectors;
    if (static_cast<int>(ritz.eigenvalues.size()) >= k) {
      bool ok = true;
      for (int j = 0; j < k && ok; ++j) {
        const VectorXd av = A * ritz.eigenvectors.col(j);
        const VectorXd mv = M * ritz.eigenvectors.col(j);
        const double lam = ritz.eigenvalues[j];
        const double res = (av - lam * mv).norm();
        const double scale =
            (anorm + std::abs(lam) * mnorm) * ritz.eigenvectors.col(j).norm();
        ok = res <= kTol * std::max(
                        scale, av.norm() + std::abs(lam) * mv.norm() + 1e-30);
      }
      if (ok) {
        ritz.eigenvalues.conservativeResize(k);
        ritz.eigenvectors.conservativeResize(Eigen::NoChange, k);
        return ritz;
      }
    }
    X = ritz.eigenvectors;
    // Keep the block full rank if Rayleigh-Ritz dropped deficient directions.
    while (X.cols() < p) {
      VectorXd extra(n);
      for (int i = 0; i < n; ++i) extra[i] = gauss(rng);
      X.conservativeResize(Eigen::NoChange, X.cols() + 1);
      X.col(X.cols() - 1) = extra;
    }
  }
  throw NumericError("smallest_pencil_sparse: no convergence");
}

EigResult smallest_pencil(const SpMat& A, const SpMat& M, int k,
                          int dense_threshold, unsigned seed) {
  if (A.rows() <= dense_threshold)
    return smallest_pencil_dense(MatrixXd(A), MatrixXd(M), k);
  return smallest_pencil_sparse(A, M, k, seed);
}

} // namespace gmsfem
