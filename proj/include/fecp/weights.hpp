#ifndef FECP_WEIGHTS_HPP
#define FECP_WEIGHTS_HPP

#include "fecp/surface.hpp"

namespace fecp {

/// Boundary weight attached to a boundary simplex: a surface field on the
/// Alfeld split of its extended boundary star, zero-extended to the rest of
/// the boundary. Level 0 weights are split constants, level 1 weights are
/// rotated tangential fields, level 2 weights are split P1 functions.
struct BoundaryWeight {
  int level = 0;
  int anchor = -1;             // mesh simplex id
  std::vector<int> support;    // boundary positions of the esb faces

  SplitConstField zeta0;       // level 0
  SplitRotatedField zeta1;     // level 1
  SplitP1Field zeta2;          // level 2

  // intermediates kept for diagnostics
  double eta0 = 0.0;           // the constant 1/|esb|
  Eigen::VectorXd psi;         // patch-local solve unknown (levels 0 and 1)
  SplitRotatedField eta1;      // level-1 preimage, global coefficients
};

/// Bulk extension of a boundary weight: the Worsey-Farin host-space field
/// whose boundary dofs realize the weight and whose bulk dofs vanish.
/// Weight level l extends into the host space of level 2-l. Evaluation
/// context is a Worsey-Farin cell id; the coefficient table is sparse.
class BulkExtension : public FieldView {
 public:
  BulkExtension() = default;
  BulkExtension(const WorseyFarinMesh& wf, int weight_level, int anchor,
                std::vector<std::pair<int, double>> dofs);

  int level() const override { return 2 - m_weight_level; }
  int weight_level() const { return m_weight_level; }
  int anchor() const { return m_anchor; }
  const std::vector<int>& support_cells() const { return m_support_cells; }
  /// Parent cells covered by the support (sorted).
  const std::vector<int>& parent_support() const { return m_parent_support; }
  const std::vector<std::pair<int, double>>& dofs() const { return m_dofs; }
  double coeff(int simplex) const;

  double scalar_value(int wf_cell, const Vec3& x) const override;
  Vec3 vector_value(int wf_cell, const Vec3& x) const override;
  Vec3 vector_derivative(int wf_cell, const Vec3& x) const override;
  double scalar_derivative(int wf_cell, const Vec3& x) const override;

  DiscreteField to_discrete_field(const FeSpace& wf_space) const;

 private:
  const WorseyFarinMesh* m_wf = nullptr;
  int m_weight_level = 0;
  int m_anchor = -1;
  std::vector<std::pair<int, double>> m_dofs;  // sorted by simplex id
  std::vector<int> m_support_cells;
  std::vector<int> m_parent_support;
};

/// All lowest-order boundary weights of a mesh, built level by level
/// (vertices, then edges, then faces) with their bulk extensions.
class WeightSet {
 public:
  WeightSet(const Mesh& mesh, const SurfaceComplex& sc, const WorseyFarinMesh& wf);

  const Mesh& mesh() const { return *m_mesh; }
  const SurfaceComplex& complex() const { return *m_sc; }
  const WorseyFarinMesh& worsey_farin() const { return *m_wf; }

  int count(int level) const;
  /// Anchor mesh id of the weight at a list position.
  int anchor_at(int level, int pos) const;
  const BoundaryWeight& weight(int level, int mesh_id) const;
  const BulkExtension& extension(int level, int mesh_id) const;
  const BoundaryWeight& weight_at(int level, int pos) const;
  const BulkExtension& extension_at(int level, int pos) const;

 private:
  void build_vertex_weight(int pos);
  void build_edge_weight(int pos);
  void build_face_weight(int pos);
  void extend_to_bulk(int level, int pos);
  int position(int level, int mesh_id) const;

  const Mesh* m_mesh;
  const SurfaceComplex* m_sc;
  const WorseyFarinMesh* m_wf;
  std::array<std::vector<BoundaryWeight>, 3> m_weights;
  std::array<std::vector<BulkExtension>, 3> m_extensions;
  std::array<std::map<int, int>, 3> m_pos;
};

/// (zeta, tr^l u)_Gamma for the weight's level; u is evaluated from the
/// boundary cells of the parent faces.
double pair_weight_with_trace(const SurfaceComplex& sc, const BoundaryWeight& w,
                              const FieldView& u, int quad_degree = 4);

/// L2(Gamma) norm of the weight.
double weight_l2_norm(const SurfaceComplex& sc, const BoundaryWeight& w, int quad_degree = 4);

/// Surface integral of a level-0 weight.
double weight_integral(const SurfaceComplex& sc, const BoundaryWeight& w);

/// Diagnostics dump: one JSON record per anchor with level, anchor id,
/// support face list, coefficient vector, duality residual and
/// derivative-relation residual.
void dump_weights_json(const WeightSet& ws, std::ostream& out);

}  // namespace fecp

#endif
