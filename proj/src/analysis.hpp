#pragma once

#include "local_spectral.hpp"

namespace gmsfem {

/// |v|_a^2 through an assembled stiffness matrix.
double energy_norm_sq(const SpMat& A, const VectorXd& v);

/// Weighted L2 norm squared of a P1 nodal field with a cellwise weight,
/// integrated exactly.
double weighted_l2_sq(const MeshRef& m, const VectorXd& cell_weight,
                      const VectorXd& v);

/// Weighted L2 norm squared of a cellwise (P0) field.
double weighted_l2_sq_p0(const MeshRef& m, const VectorXd& cell_weight,
                         const VectorXd& cell_v);

/// Boundary L2 norm squared of a nodal field over the given edges.
double boundary_l2_sq(const MeshRef& m,
                      const std::vector<std::array<int, 2>>& edges,
                      const VectorXd& v);

/// Smallest eigenvalue of the Dirichlet pencil (A_a, M_m) with zero values on
/// `boundary`, where both matrices are weighted by cellwise fields.
double smallest_dirichlet_eigenvalue(const MeshRef& m, const VectorXd& cell_a,
                                     const VectorXd& cell_m,
                                     const std::vector<int>& boundary,
                                     int dense_threshold = 400);

/// Friedrichs constant of a neighborhood: H^{-2} over the smallest
/// kappa-weighted Dirichlet eigenvalue.  Grows with the contrast when a stiff
/// inclusion sits strictly inside the region (a plateau on the inclusion is
/// cheap in energy but heavy in the kappa-weighted mass).
double friedrichs_constant(const LocalMesh& region, const VectorXd& cell_kappa,
                           double H, int dense_threshold = 400);

/// Mean-zero weighted Poincare constant of a neighborhood: H^{-2} over the
/// smallest nonzero eigenvalue of the unconstrained kappa-weighted pencil.
/// For quasi-monotone coefficients (stiff inclusions in a unit background)
/// this constant is bounded independently of the contrast, because the
/// weighted mean absorbs the inclusion plateau.
double poincare_constant(const LocalMesh& region, const VectorXd& cell_kappa,
                         double H, int dense_threshold = 400);

/// Global variant, scaled by diam(D)^{-2}.
double friedrichs_constant_global(const MeshHierarchy& mesh,
                                  const CoefficientField& kappa,
                                  int dense_threshold = 400);

/// Three-way splitting of the reference solution over a neighborhood:
/// a zero-flux Neumann part driven by the mean-corrected load, a
/// kappa-harmonic part driven by the variationally recovered boundary flux,
/// and the corrector scaled by the load integral.  The parts sum to the
/// restriction of the reference solution up to an additive constant.
struct LocalDecomposition {
  VectorXd uI, uII, uIII;
  double f_integral = 0.0;
};

LocalDecomposition decompose_local(const LocalOperators& ops,
                                   const VectorXd& u_local,
                                   const VectorXd& cell_f_local,
                                   const VectorXd& corrector);

/// Stability ratio ||v||_{L2_ktilde} / ||g||_{L2(boundary)} of the
/// kappa-harmonic extension v of boundary data g, maximized over a
/// deterministic sample of boundary data (hats, smooth traces, seeded random
/// traces).
struct StabilitySample {
  double max_ratio = 0.0;
  double constant_ratio = 0.0; ///< g = 1, exact value for cross-checking
};

StabilitySample stability_sweep(const LocalOperators& ops, int num_random,
                                unsigned seed);

} // namespace gmsfem
