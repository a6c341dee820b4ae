#ifndef FECP_SURFACE_HPP
#define FECP_SURFACE_HPP

#include <map>

#include "fecp/fe_space.hpp"
#include "fecp/splits.hpp"

namespace fecp {

/// Surface finite element machinery on the boundary complex and its Alfeld
/// split. Scalar surface fields are stored as vertex values (P1) or per-face
/// constants (values, not fluxes); tangential fields as Whitney edge
/// coefficients, rotated fields as coefficients against {n x W_E}.
/// Orientation conventions: edge tangents run from lower to higher vertex
/// id; per-face orientation signs are taken against the outward normal.
class SurfaceComplex {
 public:
  SurfaceComplex(const Mesh& mesh, const AlfeldBoundaryMesh& alfeld);

  const Mesh& mesh() const { return *m_mesh; }
  const AlfeldBoundaryMesh& alfeld() const { return *m_alfeld; }

  int n_faces() const { return m_alfeld->n_parent_faces(); }  // boundary positions
  int n_sub_faces() const { return m_alfeld->n_sub_faces(); }

  // parent-face data, indexed by boundary position
  Vec3 normal(int b) const { return m_normal[b]; }
  double sign(int b) const { return m_sign[b]; }  // orientation vs outward normal
  double parent_area(int b) const { return m_area[b]; }
  const Eigen::Matrix<double, 3, 3>& parent_grads(int b) const { return m_grads[b]; }
  Vec3 parent_centroid(int b) const { return m_centroid[b]; }

  // parent surface Whitney forms at x on the face at boundary position b
  double hat(int b, int vertex, const Vec3& x) const;           // W_v restricted
  Vec3 edge_whitney(int b, int edge, const Vec3& x) const;      // tangential W_e
  double face_const(int b) const { return m_sign[b] / m_area[b]; }  // tr2 W_f value

  // split-face evaluation (sub-face ids of the Alfeld split)
  double split_hat(int sf, int split_vertex, const Vec3& x) const;
  Vec3 split_edge_whitney(int sf, int split_edge, const Vec3& x) const;
  Vec3 split_edge_whitney_rotated(int sf, int split_edge, const Vec3& x) const;
  double split_face_const(int sf) const {
    return m_alfeld->orientation_sign(sf) / m_alfeld->sub_area(sf);
  }
  Vec3 split_centroid(int sf) const;
  /// The bubble weight on a sub-face: hat of the barycenter vertex.
  double mu_value(int sf, const Vec3& x) const;
  /// In-plane gradient of the bubble weight on a sub-face (constant).
  Vec3 mu_grad(int sf) const;

  /// Conormal-flux dof of a rotated field along a split edge, evaluated from
  /// an adjacent sub-face: int_E (w x n) . t_E.
  double rotated_edge_dof(int split_edge, const std::function<Vec3(int, const Vec3&)>& w,
                          int quad_points = 4) const;

 private:
  const Mesh* m_mesh;
  const AlfeldBoundaryMesh* m_alfeld;
  std::vector<Vec3> m_normal, m_centroid;
  std::vector<double> m_sign, m_area;
  std::vector<Eigen::Matrix<double, 3, 3>> m_grads;
};

// -- global surface fields ------------------------------------------------

/// Piecewise-constant scalar on the Alfeld split (values per sub-face).
struct SplitConstField {
  Eigen::VectorXd values;  // size n_sub_faces
};

/// Rotated tangential field, coefficients against {n x W_E} per split edge.
struct SplitRotatedField {
  Eigen::VectorXd coeffs;  // size n_sub_edges
  Vec3 value(const SurfaceComplex& sc, int sf, const Vec3& x) const;
};

/// Continuous piecewise-linear scalar on the split (values per split vertex).
struct SplitP1Field {
  Eigen::VectorXd values;  // size n_split_vertices
  double value(const SurfaceComplex& sc, int sf, const Vec3& x) const;
};

/// srot of a split P1 field, as rotated coefficients (incidence map).
SplitRotatedField srot_global(const SurfaceComplex& sc, const SplitP1Field& g);
/// sdiv of a rotated field, as split constants (incidence map).
SplitConstField sdiv_global(const SurfaceComplex& sc, const SplitRotatedField& w);

// -- surface patches --------------------------------------------------------

enum class OperatorTag { Sgrad, Scurl, Srot, Sdiv };
enum class PoincareVariant { Onto0, Onto1, Onto0m, Onto1m };

/// Local spaces and operators on the extended boundary star of an anchor.
/// Parent-level spaces (P1 vertices, Whitney edges, face constants) live on
/// the patch faces; the constrained split spaces live on the Alfeld split
/// with zero boundary conditions on the patch rim.
class SurfacePatch {
 public:
  SurfacePatch(const SurfaceComplex& sc, int anchor_level, int anchor);

  const SurfaceComplex& complex() const { return *m_sc; }
  int anchor_level() const { return m_anchor_level; }
  int anchor() const { return m_anchor; }
  double h_anchor() const { return m_h; }
  double area() const { return m_area; }

  // parent patch (global ids; faces as boundary positions)
  const std::vector<int>& faces() const { return m_faces; }
  const std::vector<int>& verts() const { return m_verts; }
  const std::vector<int>& edges() const { return m_edges; }
  // split patch
  const std::vector<int>& sub_faces() const { return m_sub_faces; }
  const std::vector<int>& split_verts() const { return m_split_verts; }
  const std::vector<int>& split_edges() const { return m_split_edges; }
  const std::vector<int>& interior_split_verts() const { return m_int_verts; }
  const std::vector<int>& interior_split_edges() const { return m_int_edges; }
  bool split_vert_interior(int local) const { return m_vert_interior[local] != 0; }
  bool split_edge_interior(int local) const { return m_edge_interior[local] != 0; }

  int local_vert(int v) const { return at(m_vert_pos, v); }
  int local_edge(int e) const { return at(m_edge_pos, e); }
  int local_face(int b) const { return at(m_face_pos, b); }
  int local_sub_face(int sf) const { return at(m_subface_pos, sf); }
  int local_split_vert(int sv) const { return at(m_splitvert_pos, sv); }
  int local_split_edge(int se) const { return at(m_splitedge_pos, se); }

  // operator matrices in local bases
  const Eigen::MatrixXd& sgrad_parent() const { return m_sgrad_p; }  // edges x verts
  const Eigen::MatrixXd& scurl_parent() const { return m_scurl_p; }  // faces x edges, values
  const Eigen::MatrixXd& srot_split() const { return m_srot_s; }     // sedges x sverts
  const Eigen::MatrixXd& sdiv_split() const { return m_sdiv_s; }     // sfaces x sedges, values

  // mass matrices
  const Eigen::MatrixXd& mass_p0() const { return m_M0p; }
  const Eigen::MatrixXd& mass_p1() const { return m_M1p; }
  const Eigen::MatrixXd& mass_s0() const { return m_M0s; }
  const Eigen::MatrixXd& mass_s1() const { return m_M1s; }
  const Eigen::VectorXd& parent_areas() const { return m_areas_p; }
  const Eigen::VectorXd& sub_areas() const { return m_areas_s; }
  /// Integral of the bubble weight over each patch face (|F|/3).
  const Eigen::VectorXd& mu_integrals() const { return m_mu_int; }

 private:
  static int at(const std::map<int, int>& m, int key);
  const SurfaceComplex* m_sc;
  int m_anchor_level, m_anchor;
  double m_h = 0.0, m_area = 0.0;
  std::vector<int> m_faces, m_verts, m_edges;
  std::vector<int> m_sub_faces, m_split_verts, m_split_edges, m_int_verts, m_int_edges;
  std::vector<char> m_vert_interior, m_edge_interior;
  std::map<int, int> m_vert_pos, m_edge_pos, m_face_pos, m_subface_pos, m_splitvert_pos,
      m_splitedge_pos;
  Eigen::MatrixXd m_sgrad_p, m_scurl_p, m_srot_s, m_sdiv_s;
  Eigen::MatrixXd m_M0p, m_M1p, m_M0s, m_M1s;
  Eigen::VectorXd m_areas_p, m_areas_s, m_mu_int;
};

SurfacePatch build_patch(const SurfaceComplex& sc, int anchor_level, int anchor);

/// Operator matrix with domain/codomain descriptors resolved from the tag:
/// Sgrad/Scurl act on the full parent spaces, Srot/Sdiv on the constrained
/// split spaces (interior split vertices / interior split edges).
struct SurfaceOperatorMatrix {
  OperatorTag tag;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd domain_mass;
  Eigen::VectorXd codomain_weights;  // L2 weights of the value-representation
                                     // codomain (empty when coefficients)
  Eigen::MatrixXd codomain_mass;     // coefficient-representation codomain
};

SurfaceOperatorMatrix operator_matrix(const SurfacePatch& patch, OperatorTag tag);

/// Kernel and L2-orthogonal complement of an operator on its domain space.
struct KernelSplit {
  Eigen::MatrixXd kernel;      // columns span Z
  Eigen::MatrixXd complement;  // columns span Z-perp (mass-orthogonal)
};

KernelSplit kernel_complement(const SurfacePatch& patch, OperatorTag tag);

/// Galerkin solution of (mu_sigma D psi, D u) = rhs(u) over the Z-perp
/// subspace of the parent space of level 0 (D = sgrad) or 1 (D = scurl);
/// `rhs` collects the functional's values on the full local basis. The
/// returned coefficients live in the full local basis.
Eigen::VectorXd weighted_patch_solve(const SurfacePatch& patch, int level,
                                     const Eigen::VectorXd& rhs);

/// Minimum-L2-norm solution of D x = target over the constrained split space
/// of the tag (Srot or Sdiv); fails with NotInRange if the target is not in
/// the range to 1e-10 relative.
Eigen::VectorXd min_norm_preimage(const SurfacePatch& patch, OperatorTag tag,
                                  const Eigen::VectorXd& target);

struct PoincareEstimate {
  int anchor_level = 0;
  int anchor = 0;
  PoincareVariant variant = PoincareVariant::Onto0;
  double constant = 0.0;  // h_sigma^{-1} sqrt(max |u|^2 / |Du|^2 over Z-perp)
};

PoincareEstimate poincare_constant(const SurfacePatch& patch, PoincareVariant variant);

/// Rank tolerance for kernel decisions, relative to the largest singular value.
inline constexpr double kRankTol = 1e-9;

}  // namespace fecp

#endif
