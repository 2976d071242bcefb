#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

namespace gmsfem {

double tri_area(const Vector2d& a, const Vector2d& b, const Vector2d& c) {
  return 0.5 * std::abs((b.x() - a.x()) * (c.y() - a.y()) -
                        (c.x() - a.x()) * (b.y() - a.y()));
}

double LocalMesh::boundary_length() const {
  double len = 0.0;
  for (const auto& e : boundary_edges)
    len += (nodes[e[1]] - nodes[e[0]]).norm();
  return len;
}

double LocalMesh::area() const {
  double a = 0.0;
  for (const auto& t : tris)
    a += tri_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
  return a;
}

namespace {

struct Grid {
  Vector2d lo;
  int nx, ny;
  double s; // spacing

  int node(int i, int j) const { return j * (nx + 1) + i; }

  void build(std::vector<Vector2d>& nodes, std::vector<Tri>& tris) const {
    nodes.resize(static_cast<size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        nodes[node(i, j)] = lo + Vector2d(i * s, j * s);
    tris.clear();
    tris.reserve(static_cast<size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        // diagonal from (i,j) to (i+1,j+1)
        tris.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1)});
        tris.push_back({node(i, j), node(i + 1, j + 1), node(i, j + 1)});
      }
  }
};

} // namespace

MeshHierarchy build_hierarchy(const std::vector<Vector2d>& poly, double H,
                              int refinement_levels) {
  if (poly.size() != 4)
    throw ConfigError("domain polygon must be an axis-aligned rectangle (4 vertices)");
  if (refinement_levels < 1)
    throw ConfigError("refinement_levels must be >= 1");
  // Consecutive corners must differ in exactly one coordinate (simple, closed,
  // axis aligned).
  for (int k = 0; k < 4; ++k) {
    const Vector2d d = poly[(k + 1) % 4] - poly[k];
    const bool dx = std::abs(d.x()) > 1e-14, dy = std::abs(d.y()) > 1e-14;
    if (dx == dy)
      throw ConfigError("domain polygon is not a simple axis-aligned rectangle");
  }
  MeshHierarchy m;
  m.lo = Vector2d(std::min({poly[0].x(), poly[1].x(), poly[2].x(), poly[3].x()}),
                  std::min({poly[0].y(), poly[1].y(), poly[2].y(), poly[3].y()}));
  m.hi = Vector2d(std::max({poly[0].x(), poly[1].x(), poly[2].x(), poly[3].x()}),
                  std::max({poly[0].y(), poly[1].y(), poly[2].y(), poly[3].y()}));
  const double w = m.hi.x() - m.lo.x(), ht = m.hi.y() - m.lo.y();
  if (H <= 0 || H > std::min(w, ht) * (1 + 1e-12))
    throw ConfigError("H must be positive and no larger than the domain sides");
  m.nx = static_cast<int>(std::lround(w / H));
  m.ny = static_cast<int>(std::lround(ht / H));
  if (m.nx < 1 || m.ny < 1 || std::abs(m.nx * H - w) > 1e-9 * std::max(1.0, w) ||
      std::abs(m.ny * H - ht) > 1e-9 * std::max(1.0, ht))
    throw ConfigError("H must tile both rectangle side lengths");
  m.refine_levels = refinement_levels;
  m.H = H;
  m.h = H / static_cast<double>(1 << refinement_levels);
  m.diam = std::hypot(w, ht);

  Grid cg{m.lo, m.nx, m.ny, m.H};
  cg.build(m.coarse_nodes, m.coarse_tris);
  Grid fg{m.lo, m.fnx(), m.fny(), m.h};
  fg.build(m.fine_nodes, m.fine_tris);

  const int F = 1 << refinement_levels;
  m.fine_to_coarse.resize(m.fine_tris.size());
  for (int fj = 0; fj < m.fny(); ++fj)
    for (int fi = 0; fi < m.fnx(); ++fi) {
      const int ci = fi / F, cj = fj / F;
      const int lx = fi % F, ly = fj % F;
      const int ccell = cj * m.nx + ci;
      const int fcell = fj * m.fnx() + fi;
      // lower fine tri lies below the coarse diagonal iff ly <= lx
      m.fine_to_coarse[2 * fcell] = 2 * ccell + (ly <= lx ? 0 : 1);
      m.fine_to_coarse[2 * fcell + 1] = 2 * ccell + (ly >= lx ? 1 : 0);
    }

  m.fine_node_on_boundary.assign(m.fine_nodes.size(), 0);
  for (int j = 0; j <= m.fny(); ++j)
    for (int i = 0; i <= m.fnx(); ++i)
      if (i == 0 || j == 0 || i == m.fnx() || j == m.fny())
        m.fine_node_on_boundary[fg.node(i, j)] = 1;
  return m;
}

int MeshHierarchy::coarse_tri_of_point(const Vector2d& p) const {
  const double x = (p.x() - lo.x()) / H, y = (p.y() - lo.y()) / H;
  int ci = std::clamp(static_cast<int>(std::floor(x)), 0, nx - 1);
  int cj = std::clamp(static_cast<int>(std::floor(y)), 0, ny - 1);
  const double fx = x - ci, fy = y - cj;
  return 2 * (cj * nx + ci) + (fy <= fx ? 0 : 1);
}

void compute_boundary(LocalMesh& m) {
  std::map<std::array<int, 2>, int> edge_count;
  for (const auto& t : m.tris)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  m.boundary_edges.clear();
  std::set<int> bnodes;
  for (const auto& [e, c] : edge_count)
    if (c == 1) {
      m.boundary_edges.push_back(e);
      bnodes.insert(e[0]);
      bnodes.insert(e[1]);
    }
  m.boundary_nodes.assign(bnodes.begin(), bnodes.end());
}

LocalMesh extract_submesh(const MeshHierarchy& mesh,
                          const std::vector<int>& fine_tris) {
  std::map<int, int> g2l;
  for (int ft : fine_tris)
    for (int v : mesh.fine_tris[ft])
      g2l.emplace(v, 0);
  int lid = 0;
  for (auto& [g, l] : g2l) l = lid++;

  LocalMesh lm;
  lm.nodes.resize(g2l.size());
  lm.node_to_global.resize(g2l.size());
  for (const auto& [g, l] : g2l) {
    lm.nodes[l] = mesh.fine_nodes[g];
    lm.node_to_global[l] = g;
  }
  lm.tris.reserve(fine_tris.size());
  lm.tri_to_global = fine_tris;
  for (int ft : fine_tris) {
    const Tri& t = mesh.fine_tris[ft];
    lm.tris.push_back({g2l[t[0]], g2l[t[1]], g2l[t[2]]});
  }
  compute_boundary(lm);
  lm.boundary_on_domain.resize(lm.boundary_nodes.size());
  for (size_t k = 0; k < lm.boundary_nodes.size(); ++k)
    lm.boundary_on_domain[k] =
        mesh.fine_node_on_boundary[lm.node_to_global[lm.boundary_nodes[k]]];
  return lm;
}

std::vector<CoarseNeighborhood> neighborhoods(const MeshHierarchy& mesh) {
  const int N = mesh.num_coarse_nodes();
  std::vector<std::vector<int>> node_tris(N);
  for (int t = 0; t < static_cast<int>(mesh.coarse_tris.size()); ++t)
    for (int v : mesh.coarse_tris[t])
      node_tris[v].push_back(t);

  // fine tris per coarse tri
  std::vector<std::vector<int>> coarse_fine(mesh.coarse_tris.size());
  for (int ft = 0; ft < static_cast<int>(mesh.fine_tris.size()); ++ft)
    coarse_fine[mesh.fine_to_coarse[ft]].push_back(ft);

  std::vector<CoarseNeighborhood> out(N);
  for (int i = 0; i < N; ++i) {
    CoarseNeighborhood& nb = out[i];
    nb.index = i;
    nb.coarse_tris = node_tris[i];
    std::vector<int> ftris;
    for (int ct : nb.coarse_tris)
      ftris.insert(ftris.end(), coarse_fine[ct].begin(), coarse_fine[ct].end());
    std::sort(ftris.begin(), ftris.end());
    nb.mesh = extract_submesh(mesh, ftris);
  }
  return out;
}

int overlap_constant(const MeshHierarchy& mesh,
                     const std::vector<CoarseNeighborhood>& nbhds) {
  std::vector<int> count(mesh.coarse_tris.size(), 0);
  for (const auto& nb : nbhds)
    for (int ct : nb.coarse_tris) ++count[ct];
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

void dump_mesh(std::ostream& os, const std::vector<Vector2d>& nodes,
               const std::vector<Tri>& tris) {
  os << "nodes " << nodes.size() << "\n";
  for (size_t i = 0; i < nodes.size(); ++i)
    os << i << " " << nodes[i].x() << " " << nodes[i].y() << "\n";
  os << "tris " << tris.size() << "\n";
  for (size_t t = 0; t < tris.size(); ++t)
    os << t << " " << tris[t][0] << " " << tris[t][1] << " " << tris[t][2] << "\n";
}

} // namespace gmsfem
