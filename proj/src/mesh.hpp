#pragma once

#include "common.hpp"

#include <iosfwd>

namespace gmsfem {

/// A standalone triangle mesh with boundary information, used for coarse
/// neighborhoods and for auxiliary test domains.  Node and element orderings
/// are deterministic.
struct LocalMesh {
  std::vector<Vector2d> nodes;
  std::vector<Tri> tris;
  std::vector<int> node_to_global; ///< local node -> global fine node (or -1)
  std::vector<int> tri_to_global;  ///< local tri -> global fine tri (or -1)
  std::vector<int> boundary_nodes; ///< local ids on the mesh boundary, ascending
  std::vector<char> boundary_on_domain;       ///< per boundary node: lies on the outer domain boundary
  std::vector<std::array<int, 2>> boundary_edges; ///< local node pairs

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
  int num_boundary() const { return static_cast<int>(boundary_nodes.size()); }
  double boundary_length() const;
  double area() const;
};

/// Nested coarse/fine right-triangle meshes on an axis-aligned rectangle.
/// Each rectangle cell is split along the diagonal from its lower-left to its
/// upper-right corner; red refinement of those triangles coincides with the
/// finer structured grid, which guarantees nestedness.
struct MeshHierarchy {
  Vector2d lo, hi;  ///< rectangle corners
  int nx = 0, ny = 0;      ///< coarse cells per direction
  int refine_levels = 0;
  double H = 0.0;   ///< coarse grid spacing
  double h = 0.0;   ///< fine grid spacing
  double diam = 0.0;

  std::vector<Vector2d> coarse_nodes;
  std::vector<Tri> coarse_tris;
  std::vector<Vector2d> fine_nodes;
  std::vector<Tri> fine_tris;
  std::vector<int> fine_to_coarse;      ///< per fine tri: containing coarse tri
  std::vector<char> fine_node_on_boundary; ///< on the outer rectangle boundary

  int num_coarse_nodes() const { return static_cast<int>(coarse_nodes.size()); }
  int num_fine_nodes() const { return static_cast<int>(fine_nodes.size()); }

  int fnx() const { return nx << refine_levels; } ///< fine cells per direction
  int fny() const { return ny << refine_levels; }

  /// Parent coarse element of a point (structured lookup).
  int coarse_tri_of_point(const Vector2d& p) const;
};

/// Fine submesh over a coarse neighborhood omega_i (union of the coarse
/// elements touching coarse node `index`).
struct CoarseNeighborhood {
  int index = -1;                ///< coarse node id
  std::vector<int> coarse_tris;  ///< coarse elements forming omega_i
  LocalMesh mesh;
};

/// Build the nested hierarchy.  The polygon must be an axis-aligned rectangle
/// (4 distinct corners, any order along the boundary); H must tile both side
/// lengths.  Throws ConfigError on bad input.
MeshHierarchy build_hierarchy(const std::vector<Vector2d>& domain_polygon,
                              double H, int refinement_levels);

/// Extract the fine submesh over a list of fine triangles, with deterministic
/// (ascending global id) node ordering and boundary information filled in.
LocalMesh extract_submesh(const MeshHierarchy& mesh,
                          const std::vector<int>& fine_tris);

/// One neighborhood per coarse node, in coarse-node order.
std::vector<CoarseNeighborhood> neighborhoods(const MeshHierarchy& mesh);

/// Max over coarse elements of the number of neighborhoods containing it.
int overlap_constant(const MeshHierarchy& mesh,
                     const std::vector<CoarseNeighborhood>& nbhds);

/// Boundary extraction for an arbitrary triangle mesh; fills boundary_nodes,
/// boundary_edges (boundary_on_domain is left to the caller).
void compute_boundary(LocalMesh& m);

/// Plain-text node/element dump.
void dump_mesh(std::ostream& os, const std::vector<Vector2d>& nodes,
               const std::vector<Tri>& tris);

double tri_area(const Vector2d& a, const Vector2d& b, const Vector2d& c);

} // namespace gmsfem
