#pragma once

#include "coefficient.hpp"
#include "mesh.hpp"

namespace gmsfem {

/// Coefficient-adapted partition of unity: one function chi_i per coarse node,
/// supported on its neighborhood.  Inside each coarse element, chi_i is the
/// kappa-harmonic extension of the affine hat-function trace on the element
/// boundary, so sum_i chi_i = 1 everywhere and each chi_i is a fine-space
/// function.
class PartitionOfUnity {
public:
  PartitionOfUnity(const MeshHierarchy& mesh, const CoefficientField& kappa);

  /// Fine-node values, one column per coarse node.
  const SpMat& chi() const { return chi_; }

  /// Dense fine-node values of chi_i.
  VectorXd node_values(int coarse_node) const;

  /// Per fine cell: sum_i |grad chi_i|^2.
  const VectorXd& cell_grad_sq() const { return cell_grad_sq_; }

  /// max_{i, cells} |grad chi_i|.
  double max_gradient() const { return max_gradient_; }

private:
  SpMat chi_; ///< num_fine_nodes x num_coarse_nodes
  VectorXd cell_grad_sq_;
  double max_gradient_ = 0.0;
};

} // namespace gmsfem
