#ifndef FECP_ENRICHED_HPP
#define FECP_ENRICHED_HPP

#include "fecp/fe_space.hpp"

namespace fecp {

/// Conforming spaces of the trimmed polynomial family of complex index k on
/// the base mesh: continuous P_{k+1} at level 0, Nedelec/Raviart-Thomas of
/// degree k at levels 1 and 2, discontinuous P_k at level 3. Basis functions
/// are products of barycentric monomials with Whitney forms, attached to
/// mesh subsimplices; functions attached to a subsimplex have vanishing
/// trace on every face not containing it, which makes the glued basis
/// conforming. The index k = 0 reproduces the Whitney spaces.
class EnrichedDeRhamSpace {
 public:
  EnrichedDeRhamSpace(const Mesh& mesh, int level, int k);

  const Mesh& mesh() const { return *m_mesh; }
  int level() const { return m_level; }
  int complex_index() const { return m_k; }
  int dim() const { return static_cast<int>(m_fns.size()); }

  struct BasisFn {
    int attach_level = 0;
    int attach_id = 0;
    std::array<int, 4> alpha_verts{};  // global vertex ids (n_alpha entries)
    std::array<int, 4> alpha_exp{};
    int n_alpha = 0;
    int sigma_count = 0;               // 0 for pure monomials
    std::array<int, 4> sigma_verts{};  // global ids, ascending
  };

  const BasisFn& basis(int j) const { return m_fns[j]; }
  /// Basis functions with support intersecting a cell.
  const std::vector<int>& cell_basis(int cell) const { return m_cell_fns[cell]; }
  /// Basis functions attached to boundary simplices (the only ones with a
  /// nonzero trace).
  const std::vector<int>& boundary_basis() const { return m_boundary_fns; }

  // basis evaluation within a cell (x inside cell `t`)
  double scalar_basis(int j, int t, const Vec3& x) const;        // levels 0, 3
  Vec3 vector_basis(int j, int t, const Vec3& x) const;          // levels 1, 2
  Vec3 vector_basis_d(int j, int t, const Vec3& x) const;        // grad / curl
  double scalar_basis_d(int j, int t, const Vec3& x) const;      // div

 private:
  double monomial(const BasisFn& fn, const CellGeometry& g, const std::array<int, 4>& pos,
                  const Vec3& x) const;
  Vec3 monomial_grad(const BasisFn& fn, const CellGeometry& g, const std::array<int, 4>& pos,
                     const Vec3& x) const;
  std::array<int, 4> alpha_positions(const BasisFn& fn, int cell) const;
  std::array<int, 4> sigma_positions(const BasisFn& fn, int cell) const;

  const Mesh* m_mesh;
  int m_level, m_k;
  std::vector<BasisFn> m_fns;
  std::vector<std::vector<int>> m_cell_fns;
  std::vector<int> m_boundary_fns;
};

/// Coefficient vector over an enriched space, evaluable with parent-mesh
/// cell contexts.
class EnrichedField : public FieldView {
 public:
  EnrichedField(const EnrichedDeRhamSpace& space, Eigen::VectorXd coeffs)
      : m_space(&space), m_coeffs(std::move(coeffs)) {}

  const EnrichedDeRhamSpace& space() const { return *m_space; }
  const Eigen::VectorXd& coeffs() const { return m_coeffs; }

  int level() const override { return m_space->level(); }
  double scalar_value(int cell, const Vec3& x) const override;
  Vec3 vector_value(int cell, const Vec3& x) const override;
  Vec3 vector_derivative(int cell, const Vec3& x) const override;
  double scalar_derivative(int cell, const Vec3& x) const override;

 private:
  const EnrichedDeRhamSpace* m_space;
  Eigen::VectorXd m_coeffs;
};

/// Gram matrices assembled cellwise by quadrature.
Eigen::MatrixXd enriched_mass(const EnrichedDeRhamSpace& space, int quad_degree);
Eigen::MatrixXd enriched_graph_gram(const EnrichedDeRhamSpace& space, int quad_degree);

/// Rows (tr B_i, tr B_j)_Gamma over boundary-attached i and all j, plus the
/// matching right-hand side against a boundary trace field given as a
/// surface evaluator (face id, point) -> scalar (levels 0, 2) or tangential
/// vector (level 1).
struct TraceConstraint {
  Eigen::MatrixXd rows;   // n_boundary_attached x dim
  Eigen::VectorXd rhs;    // n_boundary_attached
};
TraceConstraint enriched_trace_constraint(
    const EnrichedDeRhamSpace& space,
    const std::function<double(int, const Vec3&)>& g_scalar,
    const std::function<Vec3(int, const Vec3&)>& g_tangential, int quad_degree);

}  // namespace fecp

#endif
