#include "coefficient.hpp"

#include "pou.hpp"

#include <cmath>

namespace gmsfem {

bool Inclusion::contains(const Vector2d& p) const {
  const Vector2d d = p - center;
  const double rx = radii.x(), ry = radii.y();
  return (d.x() / rx) * (d.x() / rx) + (d.y() / ry) * (d.y() / ry) < 1.0;
}

namespace {

// Conservative geometric disjointness test: sampled boundary of one shape must
// stay outside the other, and centers must not be mutually enclosed.
bool shapes_intersect(const Inclusion& a, const Inclusion& b) {
  if (a.shape == Inclusion::Shape::Disk && b.shape == Inclusion::Shape::Disk)
    return (a.center - b.center).norm() < a.radii.x() + b.radii.x();
  if (a.contains(b.center) || b.contains(a.center)) return true;
  constexpr int kSamples = 256;
  for (int k = 0; k < kSamples; ++k) {
    const double t = 2.0 * M_PI * k / kSamples;
    const Vector2d pa = a.center + Vector2d(a.radii.x() * std::cos(t),
                                            a.radii.y() * std::sin(t));
    if (b.contains(pa)) return true;
    const Vector2d pb = b.center + Vector2d(b.radii.x() * std::cos(t),
                                            b.radii.y() * std::sin(t));
    if (a.contains(pb)) return true;
  }
  return false;
}

} // namespace

CoefficientField make_inclusions(const MeshHierarchy& mesh,
                                 std::vector<Inclusion> inclusions) {
  for (const auto& inc : inclusions) {
    if (inc.radii.x() <= 0 || inc.radii.y() <= 0)
      throw ConfigError("inclusion radii must be positive");
    if (inc.value < 1.0)
      throw ConfigError("inclusion values must satisfy eta >= 1");
  }
  for (size_t a = 0; a < inclusions.size(); ++a)
    for (size_t b = a + 1; b < inclusions.size(); ++b)
      if (shapes_intersect(inclusions[a], inclusions[b]))
        throw ConfigError("inclusions must be pairwise disjoint");

  CoefficientField cf;
  cf.inclusions = std::move(inclusions);
  const int nt = static_cast<int>(mesh.fine_tris.size());
  cf.cell_kappa = VectorXd::Ones(nt);
  std::vector<int> cells_per(cf.inclusions.size(), 0);
  for (int t = 0; t < nt; ++t) {
    const Tri& tri = mesh.fine_tris[t];
    const Vector2d c = (mesh.fine_nodes[tri[0]] + mesh.fine_nodes[tri[1]] +
                        mesh.fine_nodes[tri[2]]) / 3.0;
    for (size_t j = 0; j < cf.inclusions.size(); ++j)
      if (cf.inclusions[j].contains(c)) {
        cf.cell_kappa[t] = cf.inclusions[j].value;
        ++cells_per[j];
        break;
      }
  }
  for (size_t j = 0; j < cf.inclusions.size(); ++j)
    if (cells_per[j] < 4)
      throw ConfigError("inclusion " + std::to_string(j) +
                        " is not resolved by the fine mesh (< 4 cells)");
  cf.alpha = nt > 0 ? cf.cell_kappa.minCoeff() : 1.0;
  cf.beta = nt > 0 ? cf.cell_kappa.maxCoeff() : 1.0;
  return cf;
}

WeightField compute_weights(const MeshHierarchy& mesh,
                            const CoefficientField& kappa,
                            const PartitionOfUnity& pou) {
  WeightField w;
  const int nt = static_cast<int>(mesh.fine_tris.size());
  w.cell_ktilde.resize(nt);
  w.cell_ktilde_inv.resize(nt);
  const double H2 = mesh.H * mesh.H;
  for (int t = 0; t < nt; ++t)
    w.cell_ktilde[t] = H2 * kappa.cell_kappa[t] * pou.cell_grad_sq()[t];
  const double zmax = w.cell_ktilde.maxCoeff();
  const double ztol = 1e-14 * std::max(zmax, 1.0);
  double zero_area = 0.0, total = 0.0;
  for (int t = 0; t < nt; ++t) {
    const Tri& tri = mesh.fine_tris[t];
    const double a = tri_area(mesh.fine_nodes[tri[0]], mesh.fine_nodes[tri[1]],
                              mesh.fine_nodes[tri[2]]);
    total += a;
    if (w.cell_ktilde[t] <= ztol) {
      w.cell_ktilde[t] = 0.0;
      w.cell_ktilde_inv[t] = 1.0;
      zero_area += a;
    } else {
      w.cell_ktilde_inv[t] = 1.0 / w.cell_ktilde[t];
    }
  }
  w.zero_fraction = total > 0 ? zero_area / total : 0.0;
  return w;
}

VectorXd restrict_cells(const VectorXd& global_cells, const LocalMesh& lm) {
  VectorXd out(lm.num_tris());
  for (int t = 0; t < lm.num_tris(); ++t) out[t] = global_cells[lm.tri_to_global[t]];
  return out;
}

VectorXd restrict_nodes(const VectorXd& global_nodes, const LocalMesh& lm) {
  VectorXd out(lm.num_nodes());
  for (int n = 0; n < lm.num_nodes(); ++n) out[n] = global_nodes[lm.node_to_global[n]];
  return out;
}

} // namespace gmsfem
