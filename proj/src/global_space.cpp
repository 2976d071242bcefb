#include "global_space.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace gmsfem {

std::string space_kind_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::Spectral: return "S";
    case SpaceKind::Snapshot: return "SNAP";
    case SpaceKind::Pod: return "H";
  }
  return "?";
}

SpaceKind space_kind_from_name(const std::string& name) {
  if (name == "S") return SpaceKind::Spectral;
  if (name == "SNAP") return SpaceKind::Snapshot;
  if (name == "H") return SpaceKind::Pod;
  throw ConfigError("unknown space kind '" + name + "' (expected S, SNAP or H)");
}

GlobalSpace assemble_global(SpaceKind kind, const MeshHierarchy& mesh,
                            const PartitionOfUnity& pou,
                            const std::vector<CoarseNeighborhood>& nbhds,
                            const std::vector<std::vector<VectorXd>>& members,
                            const SpMat& A_fine) {
  if (members.size() != nbhds.size())
    throw NumericError("assemble_global: one member list per neighborhood required");
  GlobalSpace gs;
  gs.kind = kind;

  std::vector<Triplet> trips;
  int col = 0;
  for (size_t i = 0; i < nbhds.size(); ++i) {
    const LocalMesh& lm = nbhds[i].mesh;
    const VectorXd chi = pou.node_values(static_cast<int>(i));
    for (const VectorXd& w : members[i]) {
      if (w.size() != lm.num_nodes())
        throw NumericError("assemble_global: member size mismatch");
      for (int m = 0; m < lm.num_nodes(); ++m) {
        const int g = lm.node_to_global[m];
        if (mesh.fine_node_on_boundary[g]) continue;
        const double v = chi[g] * w[m];
        if (v != 0.0) trips.emplace_back(g, col, v);
      }
      gs.col_nbhd.push_back(static_cast<int>(i));
      ++col;
    }
  }
  SpMat B(mesh.num_fine_nodes(), col);
  B.setFromTriplets(trips.begin(), trips.end());

  // Independence pruning on the diagonally equilibrated Gram matrix
  // B^T A B.  Fast path: if an unpermuted sparse factorization succeeds with
  // healthy pivots the columns are independent and nothing is dropped.
  // Otherwise a diagonally pivoted (greedy, deterministic) dense Cholesky
  // reveals the numerical rank: columns whose remaining residual falls below
  // (1e-6)^2 of their own A-norm are dependent and removed.
  constexpr double kTolSq = 1e-6 * 1e-6;
  const SpMat G = SpMat(B.transpose() * (A_fine * B).eval());
  VectorXd d0 = G.diagonal();
  VectorXd s(col);
  std::vector<int> kept;
  for (int k = 0; k < col; ++k) {
    if (d0[k] > 0) {
      s[k] = 1.0 / std::sqrt(d0[k]);
      kept.push_back(k);
    } else {
      s[k] = 0.0; // identically zero column (e.g. fully on the boundary)
    }
  }
  const SpMat Gs = s.asDiagonal() * G * s.asDiagonal();
  bool need_rank_reveal = kept.size() != static_cast<size_t>(col);
  if (!need_rank_reveal) {
    Eigen::SimplicialLDLT<SpMat> probe(Gs);
    need_rank_reveal = probe.info() != Eigen::Success ||
                       probe.vectorD().minCoeff() <= 1e-10;
  }
  if (need_rank_reveal) {
    MatrixXd Gd(Gs);
    VectorXd d = Gd.diagonal();
    std::vector<char> active(col, 1);
    for (int k = 0; k < col; ++k)
      if (s[k] == 0.0) {
        active[k] = 0;
        d[k] = 0.0;
      }
    MatrixXd L = MatrixXd::Zero(col, col);
    std::vector<int> order;
    kept.clear();
    for (int step = 0; step < col; ++step) {
      int p = -1;
      double dmax = kTolSq;
      for (int k = 0; k < col; ++k)
        if (active[k] && d[k] > dmax) {
          dmax = d[k];
          p = k;
        }
      if (p < 0) break;
      const int a = static_cast<int>(order.size());
      VectorXd lcol = Gd.col(p);
      if (a > 0) lcol.noalias() -= L.leftCols(a) * L.row(p).head(a).transpose();
      lcol /= std::sqrt(d[p]);
      L.col(a) = lcol;
      active[p] = 0;
      order.push_back(p);
      kept.push_back(p);
      for (int k = 0; k < col; ++k)
        if (active[k]) d[k] -= lcol[k] * lcol[k];
    }
    std::sort(kept.begin(), kept.end());
  }
  gs.pruned = col - static_cast<int>(kept.size());
  if (kept.empty())
    throw NumericError("assemble_global: all columns pruned");

  std::vector<Triplet> kept_trips;
  kept_trips.reserve(B.nonZeros());
  for (size_t j = 0; j < kept.size(); ++j)
    for (SpMat::InnerIterator it(B, kept[j]); it; ++it)
      kept_trips.emplace_back(static_cast<int>(it.row()),
                              static_cast<int>(j), it.value());
  std::vector<int> kept_nbhd(kept.size());
  for (size_t j = 0; j < kept.size(); ++j) kept_nbhd[j] = gs.col_nbhd[kept[j]];
  gs.col_nbhd = std::move(kept_nbhd);
  gs.basis.resize(mesh.num_fine_nodes(), static_cast<int>(kept.size()));
  gs.basis.setFromTriplets(kept_trips.begin(), kept_trips.end());
  return gs;
}

CoarseSolveResult solve_coarse(const GlobalSpace& space, const SpMat& A_fine,
                               const VectorXd& b_fine) {
  SpMat G = SpMat(space.basis.transpose() * (A_fine * space.basis).eval());
  const VectorXd rhs = space.basis.transpose() * b_fine;

  // Columns of a snapshot-rich basis differ in A-norm by many orders of
  // magnitude; equilibrate symmetrically so the factorization pivots are
  // judged on the right scale.
  VectorXd s = G.diagonal();
  for (int k = 0; k < s.size(); ++k) {
    if (!(s[k] > 0))
      throw NumericError("solve_coarse: reduced system is not SPD");
    s[k] = 1.0 / std::sqrt(s[k]);
  }
  G = s.asDiagonal() * G * s.asDiagonal();
  const VectorXd rhs_s = s.asDiagonal() * rhs;

  Eigen::SimplicialLDLT<SpMat> ldlt(G);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("solve_coarse: reduced system is not SPD");
  VectorXd y = ldlt.solve(rhs_s);
  // Iterative refinement against the remaining ill-conditioning.
  double rnorm = 0.0;
  const double scale = std::max(rhs_s.norm(), 1e-300);
  for (int sweep = 0; sweep < 10; ++sweep) {
    const VectorXd r = rhs_s - G * y;
    rnorm = r.norm();
    if (rnorm <= 1e-9 * scale) break;
    y += ldlt.solve(r);
  }
  if (rnorm > 1e-9 * scale)
    throw NumericError("solve_coarse: reduced solve residual too large");
  CoarseSolveResult res;
  res.coeffs = s.asDiagonal() * y;
  res.u = space.basis * res.coeffs;
  return res;
}

} // namespace gmsfem
