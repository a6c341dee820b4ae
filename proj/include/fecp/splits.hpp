#ifndef FECP_SPLITS_HPP
#define FECP_SPLITS_HPP

#include <array>
#include <string>
#include <vector>

#include "fecp/mesh.hpp"

namespace fecp {

/// Alfeld split of the boundary surface: every boundary face is subdivided
/// into 3 sub-triangles at its barycenter. The split surface forms its own
/// 2D simplicial complex with sorted vertex tuples; parent boundary vertices
/// keep their mesh ids and barycenters are appended in boundary-face order,
/// so sub-simplex orientations are reproducible.
class AlfeldBoundaryMesh {
 public:
  explicit AlfeldBoundaryMesh(const Mesh& mesh);

  const Mesh& parent() const { return *m_mesh; }

  // split vertices: ids 0..n_parent_vertices-1 are mesh vertex ids (only the
  // boundary ones are used); id n_parent_vertices + b is the barycenter of
  // the b-th boundary face.
  int n_split_vertices() const { return m_mesh->n_vertices() + n_parent_faces(); }
  bool is_barycenter(int sv) const { return sv >= m_mesh->n_vertices(); }
  Vec3 split_vertex(int sv) const;
  /// Boundary-face list index whose barycenter this is.
  int barycenter_owner(int sv) const { return sv - m_mesh->n_vertices(); }
  int barycenter_id(int bface_pos) const { return m_mesh->n_vertices() + bface_pos; }

  int n_parent_faces() const { return static_cast<int>(m_mesh->boundary_faces().size()); }
  int n_sub_faces() const { return 3 * n_parent_faces(); }
  int n_sub_edges() const { return static_cast<int>(m_edges.size()); }

  const std::array<int, 3>& sub_face(int sf) const { return m_sub_faces[sf]; }
  const std::array<int, 2>& sub_edge(int se) const { return m_edges[se]; }
  int sub_edge_index(int a, int b) const;

  /// Parent boundary-face list position of a sub-face.
  int parent_of_sub_face(int sf) const { return sf / 3; }
  /// Mesh face id of the parent of a sub-face.
  int parent_face_id(int sf) const { return m_mesh->boundary_faces()[sf / 3]; }
  const std::array<int, 3>& sub_faces_of_parent(int bface_pos) const {
    return m_parent_subs[bface_pos];
  }

  /// Position of a mesh face id in the boundary-face list (-1 if interior).
  int boundary_position(int mesh_face) const { return m_bface_pos[mesh_face]; }

  const std::array<int, 3>& edges_of_sub_face(int sf) const { return m_sub_face_edges[sf]; }
  const std::vector<int>& sub_faces_of_edge(int se) const { return m_edge_faces[se]; }
  const std::vector<int>& sub_edges_of_vertex(int sv) const { return m_vertex_edges[sv]; }

  /// True if the split edge lies inside a parent boundary edge (i.e. both
  /// endpoints are parent vertices).
  bool is_parent_edge(int se) const { return !is_barycenter(m_edges[se][1]); }
  /// Mesh edge id for parent split edges, -1 otherwise.
  int mesh_edge_id(int se) const { return m_mesh_edge[se]; }

  int incidence_fe(int sf, int se) const;  // sub-face vs sub-edge
  int incidence_ev(int se, int sv) const;  // sub-edge vs split vertex

  double sub_area(int sf) const { return m_area[sf]; }
  /// Unit outward normal (same as the parent face's).
  Vec3 outward_normal(int sf) const { return m_normal[sf / 3]; }
  /// Sign of the sorted-tuple orientation normal against the outward normal.
  double orientation_sign(int sf) const { return m_sign[sf]; }
  double parent_area(int bface_pos) const;

  /// In-plane gradients of the three sub-face barycentric functions
  /// (rows, matching the sorted tuple).
  const Eigen::Matrix<double, 3, 3>& sub_grads(int sf) const { return m_grads[sf]; }

  Vec3 coords(int sv) const { return split_vertex(sv); }

 private:
  const Mesh* m_mesh;
  std::vector<Vec3> m_barycenters;
  std::vector<int> m_bface_pos;                      // mesh face -> boundary position
  std::vector<std::array<int, 3>> m_sub_faces;       // sorted split-vertex tuples
  std::vector<std::array<int, 3>> m_parent_subs;     // boundary position -> 3 sub-faces
  std::vector<std::array<int, 2>> m_edges;           // sorted split-edge tuples
  std::vector<int> m_mesh_edge;                      // split edge -> mesh edge id or -1
  std::vector<std::array<int, 3>> m_sub_face_edges;  // opposite-vertex order
  std::vector<std::vector<int>> m_edge_faces;
  std::vector<std::vector<int>> m_vertex_edges;
  std::vector<double> m_area;
  std::vector<double> m_sign;
  std::vector<Vec3> m_normal;  // per parent boundary face, outward
  std::vector<Eigen::Matrix<double, 3, 3>> m_grads;
};

/// Worsey-Farin split: every cell is subdivided into 12 sub-tetrahedra using
/// the cell barycenter and the face barycenters. The trace of the split on
/// the boundary coincides sub-triangle by sub-triangle with the boundary
/// Alfeld split; the correspondence tables are built here.
class WorseyFarinMesh {
 public:
  WorseyFarinMesh(const Mesh& parent, const AlfeldBoundaryMesh& alfeld);

  const Mesh& mesh() const { return m_mesh; }          // the split mesh
  const Mesh& parent() const { return *m_parent; }
  const AlfeldBoundaryMesh& alfeld() const { return *m_alfeld; }

  int parent_of(int sub_cell) const { return m_parent_cell[sub_cell]; }
  const std::array<int, 12>& sub_cells_of(int parent_cell) const {
    return m_sub_cells[parent_cell];
  }

  /// Split-mesh vertex ids of parent vertices coincide with parent ids;
  /// barycenter ids follow (cells first, then faces, in parent index order).
  int cell_barycenter_vertex(int parent_cell) const {
    return m_parent->n_vertices() + parent_cell;
  }
  int face_barycenter_vertex(int parent_face) const {
    return m_parent->n_vertices() + m_parent->n_cells() + parent_face;
  }

  // boundary restriction: WF boundary sub-simplices <-> Alfeld split objects
  int wf_face_of_sub_triangle(int alfeld_sub_face) const { return m_wf_face[alfeld_sub_face]; }
  int wf_edge_of_sub_edge(int alfeld_sub_edge) const { return m_wf_edge[alfeld_sub_edge]; }
  int wf_vertex_of_split_vertex(int alfeld_vertex) const;

 private:
  const Mesh* m_parent;
  const AlfeldBoundaryMesh* m_alfeld;
  Mesh m_mesh;
  std::vector<int> m_parent_cell;
  std::vector<std::array<int, 12>> m_sub_cells;
  std::vector<int> m_wf_face;  // alfeld sub-face -> wf mesh face id
  std::vector<int> m_wf_edge;  // alfeld sub-edge -> wf mesh edge id
};

/// Writes the split mesh in the mesh text format plus a `sub_id parent_id`
/// sidecar.
void write_worsey_farin(const WorseyFarinMesh& wf, const std::string& mesh_path,
                        const std::string& parent_map_path);

}  // namespace fecp

#endif
