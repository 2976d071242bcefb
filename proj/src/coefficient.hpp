#pragma once

#include "mesh.hpp"

namespace gmsfem {

struct Inclusion {
  enum class Shape { Disk, Ellipse };
  Shape shape = Shape::Disk;
  Vector2d center{0, 0};
  Vector2d radii{0, 0}; ///< (r, r) for disks
  double value = 1.0;   ///< eta_j >= 1

  bool contains(const Vector2d& p) const;
};

/// Piecewise-constant coefficient on the fine mesh: background 1, value eta_j
/// inside each inclusion (cells assigned by centroid).
struct CoefficientField {
  VectorXd cell_kappa; ///< per fine cell
  std::vector<Inclusion> inclusions;
  double alpha = 1.0, beta = 1.0;

  double contrast() const { return beta / alpha; }
};

/// kappa-tilde = H^2 kappa sum_i |grad chi_i|^2 (cellwise) and its
/// pseudo-inverse with the value-1 convention on the zero set.
struct WeightField {
  VectorXd cell_ktilde;
  VectorXd cell_ktilde_inv;
  double zero_fraction = 0.0; ///< |{ktilde = 0}| / |D|
};

/// Rasterize inclusions onto the fine mesh.  Throws ConfigError if inclusions
/// overlap (geometrically or after rasterization) or if any inclusion covers
/// fewer than 4 fine cells.
CoefficientField make_inclusions(const MeshHierarchy& mesh,
                                 std::vector<Inclusion> inclusions);

class PartitionOfUnity; // pou.hpp

WeightField compute_weights(const MeshHierarchy& mesh,
                            const CoefficientField& kappa,
                            const PartitionOfUnity& pou);

/// Restriction of a global cellwise field to a local mesh.
VectorXd restrict_cells(const VectorXd& global_cells, const LocalMesh& lm);

/// Restriction of a global nodal field to a local mesh.
VectorXd restrict_nodes(const VectorXd& global_nodes, const LocalMesh& lm);

} // namespace gmsfem
