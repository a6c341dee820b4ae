#ifndef FECP_MESH_HPP
#define FECP_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fecp/common.hpp"

namespace fecp {

using Vec3 = Eigen::Vector3d;

/// Per-cell geometric data, precomputed at build time.
struct CellGeometry {
  Eigen::Matrix<double, 3, 4> verts;   // vertex coordinates as columns
  Eigen::Matrix<double, 4, 3> grads;   // rows = gradients of barycentric functions
  double volume = 0.0;                 // positive measure
  double orientation = 1.0;            // sign of det of sorted-tuple edge vectors
  double diam = 0.0;
};

struct FaceGeometry {
  Vec3 normal;          // unit, direction t_{e1} x t_{e2} of the sorted tuple
  double area = 0.0;
  double diam = 0.0;
};

/// Oriented tetrahedral mesh. Simplices of every level are stored with
/// strictly increasing vertex tuples; orientation is implicit in the
/// ordering, so incidence numbers are pure position computations.
/// Immutable after construction; all queries are read-only.
class Mesh {
 public:
  int n_vertices() const { return static_cast<int>(m_vertices.size()); }
  int n_edges() const { return static_cast<int>(m_edges.size()); }
  int n_faces() const { return static_cast<int>(m_faces.size()); }
  int n_cells() const { return static_cast<int>(m_cells.size()); }
  int n_simplices(int level) const;

  const Vec3& vertex(int v) const { return m_vertices[v]; }
  const std::array<int, 2>& edge(int e) const { return m_edges[e]; }
  const std::array<int, 3>& face(int f) const { return m_faces[f]; }
  const std::array<int, 4>& cell(int t) const { return m_cells[t]; }

  /// Vertex tuple of a simplex of any level (size level+1).
  std::vector<int> simplex_vertices(int level, int index) const;

  int edge_index(int a, int b) const;          // -1 if absent
  int face_index(int a, int b, int c) const;   // -1 if absent

  const std::vector<int>& cells_of_vertex(int v) const { return m_vertex_cells[v]; }
  const std::vector<int>& cells_of_edge(int e) const { return m_edge_cells[e]; }
  const std::vector<int>& cells_of_face(int f) const { return m_face_cells[f]; }
  std::vector<int> cells_of(int level, int index) const;  // the star, as cell ids

  const std::array<int, 3>& edges_of_face(int f) const { return m_face_edges[f]; }
  const std::array<int, 6>& edges_of_cell(int t) const { return m_cell_edges[t]; }
  const std::array<int, 4>& faces_of_cell(int t) const { return m_cell_faces[t]; }
  const std::vector<int>& faces_of_edge(int e) const { return m_edge_faces[e]; }
  const std::vector<int>& edges_of_vertex(int v) const { return m_vertex_edges[v]; }

  /// Incidence number between a (level+1)-simplex and a level-simplex:
  /// (-1)^j if the child is obtained by omitting the parent's j-th vertex,
  /// 0 if the child is not a subsimplex.
  int incidence(int parent_level, int parent, int child) const;

  bool is_boundary(int level, int index) const;
  const std::vector<int>& boundary_faces() const { return m_boundary_faces; }
  const std::vector<int>& boundary_edges() const { return m_boundary_edges; }
  const std::vector<int>& boundary_vertices() const { return m_boundary_vertices; }

  /// Unit outward normal of a boundary face.
  Vec3 outward_normal(int f) const;
  /// Sign of the orientation normal against the outward normal (+-1).
  double boundary_sign(int f) const;
  /// The unique cell of a boundary face.
  int boundary_cell(int f) const;

  const CellGeometry& cell_geometry(int t) const { return m_cell_geom[t]; }
  const FaceGeometry& face_geometry(int f) const { return m_face_geom[f]; }
  double edge_length(int e) const { return m_edge_length[e]; }
  Vec3 edge_tangent(int e) const;  // unit, from lower to higher vertex id

  double volume(int t) const { return m_cell_geom[t].volume; }
  double area(int f) const { return m_face_geom[f].area; }

  /// Diameter h_sigma: diam(sigma) for level >= 1, diam(st(sigma)) for vertices.
  double h(int level, int index) const;
  double shape_regularity() const { return m_shape_regularity; }

  /// Barycentric coordinates of x with respect to cell t.
  Eigen::Vector4d barycentric(int t, const Vec3& x) const;
  /// Cell containing x among `candidates` (largest minimum barycentric).
  int locate(const std::vector<int>& candidates, const Vec3& x) const;

  // -- patch queries ---------------------------------------------------

  /// Cells of st(sigma).
  std::vector<int> star_cells(int level, int index) const;
  /// Cells of es^k(sigma), k >= 1.
  std::vector<int> extended_star_cells(int level, int index, int k) const;
  /// Boundary faces of stb(sigma); anchor must be a boundary simplex.
  std::vector<int> boundary_star_faces(int level, int index) const;
  /// Boundary faces of esb(sigma); anchor must be a boundary simplex.
  std::vector<int> extended_boundary_star_faces(int level, int index) const;

  friend Mesh build_mesh(const std::vector<Vec3>& vertices,
                         const std::vector<std::array<int, 4>>& tets);

 private:
  std::vector<Vec3> m_vertices;
  std::vector<std::array<int, 2>> m_edges;
  std::vector<std::array<int, 3>> m_faces;
  std::vector<std::array<int, 4>> m_cells;

  std::vector<std::vector<int>> m_vertex_cells, m_edge_cells, m_face_cells;
  std::vector<std::vector<int>> m_vertex_edges, m_edge_faces;
  std::vector<std::array<int, 3>> m_face_edges;
  std::vector<std::array<int, 6>> m_cell_edges;
  std::vector<std::array<int, 4>> m_cell_faces;

  std::vector<char> m_vertex_boundary, m_edge_boundary, m_face_boundary;
  std::vector<int> m_boundary_faces, m_boundary_edges, m_boundary_vertices;

  std::vector<CellGeometry> m_cell_geom;
  std::vector<FaceGeometry> m_face_geom;
  std::vector<double> m_edge_length;
  std::vector<double> m_vertex_h;  // diam(st(v))
  double m_shape_regularity = 0.0;
};

/// Builds all derived tables and validates the complex. Cell tuples are
/// sorted ascending before use.
Mesh build_mesh(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 4>>& tets);

/// Unit cube split into n^3 subcubes of 6 Kuhn tetrahedra each.
Mesh gen_structured_cube(int n);

/// [0,3]^3 minus the center unit subcube, Kuhn-split per subcube; the
/// boundary has two connected components.
Mesh gen_cube_with_hole();

// -- mesh partitions ---------------------------------------------------

/// Cell partitions attached to the boundary distance structure.
struct MeshPartitions {
  /// in_cells_near_boundary[l][t]: cell t contains a boundary l-simplex.
  std::array<std::vector<char>, 3> in_cells_near_boundary;
  /// in_deep_interior[l][t]: es^2(t) contains no cell of the level-l
  /// near-boundary set.
  std::array<std::vector<char>, 3> in_deep_interior;

  std::vector<int> near_boundary_cells(int l) const;
  std::vector<int> deep_interior_cells(int l) const;
};

MeshPartitions classify(const Mesh& mesh);

/// es^k(tau) restricted to the level-l near-boundary region, as cell ids.
std::vector<int> omega_restricted_extended_star(const Mesh& mesh, const MeshPartitions& parts,
                                                int cell, int k, int l);

// -- patch index -------------------------------------------------------

enum class PatchKind { Star, ExtendedStar, BoundaryStar, ExtendedBoundaryStar, OmegaRestricted };

struct PatchIndex {
  PatchKind kind;
  int anchor_level = 0;
  int anchor = 0;
  int k = 1;  // extension order for ExtendedStar / OmegaRestricted
  int l = 0;  // region level for OmegaRestricted
  std::vector<int> cells;           // bulk kinds
  std::vector<int> boundary_faces;  // surface kinds
};

PatchIndex patch(const Mesh& mesh, int anchor_level, int anchor, PatchKind kind, int k = 1,
                 int l = 0, const MeshPartitions* parts = nullptr);

// -- contractibility ---------------------------------------------------

/// Disc criterion for a connected triangulated surface patch: connected and
/// Euler characteristic V - E + F = 1.
bool surface_patch_is_disc(const std::vector<std::array<int, 3>>& triangles);

/// Applies the disc criterion to clos(esb(sigma)); sigma must be boundary.
bool check_contractibility(const Mesh& mesh, int level, int index);

// -- text format -------------------------------------------------------

Mesh parse_mesh(std::istream& in);
Mesh parse_mesh_file(const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh_file(const Mesh& mesh, const std::string& path);

}  // namespace fecp

#endif
