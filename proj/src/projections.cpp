#include "fecp/projections.hpp"

#include <algorithm>

namespace fecp {

BoundaryProjector::BoundaryProjector(const WeightSet& weights, const DeRhamComplex& spaces,
                                     int quad_degree)
    : m_weights(&weights), m_spaces(&spaces), m_quad_degree(quad_degree) {
  if (&spaces.v0.mesh() != &weights.mesh())
    fail(ErrorCode::InvalidArgument, "BoundaryProjector: spaces and weights on different meshes");
}

double BoundaryProjector::alpha(int level, int anchor, const FieldView& u) const {
  if (level < 0 || level > 2) fail(ErrorCode::LevelMismatch, "alpha: level must be 0, 1 or 2");
  if (u.level() != level) fail(ErrorCode::LevelMismatch, "alpha: field level mismatch");
  const BulkExtension& Y = m_weights->extension(level, anchor);
  const WorseyFarinMesh& wf = m_weights->worsey_farin();
  const Mesh& wfm = wf.mesh();
  QuadratureRule rule = simplex_rule(3, m_quad_degree);
  double s = 0.0;
  for (int c : Y.support_cells()) {
    int parent = wf.parent_of(c);
    const CellGeometry& g = wfm.cell_geometry(c);
    Eigen::MatrixXd tet(3, 4);
    for (int i = 0; i < 4; ++i) tet.col(i) = g.verts.col(i);
    MappedRule mr = map_rule(rule, tet);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      double term = 0.0;
      switch (level) {
        case 0:
          term = u.scalar_value(parent, x) * Y.scalar_derivative(c, x) +
                 u.vector_derivative(parent, x).dot(Y.vector_value(c, x));
          break;
        case 1:
          term = u.vector_value(parent, x).dot(Y.vector_derivative(c, x)) -
                 u.vector_derivative(parent, x).dot(Y.vector_value(c, x));
          break;
        case 2:
          term = u.vector_value(parent, x).dot(Y.vector_derivative(c, x)) +
                 u.scalar_derivative(parent, x) * Y.scalar_value(c, x);
          break;
      }
      s += mr.weights(q) * term;
    }
  }
  return s;
}

double BoundaryProjector::alpha3(int cell, const FieldView& u) const {
  const Mesh& mesh = m_spaces->v0.mesh();
  const CellGeometry& g = mesh.cell_geometry(cell);
  Eigen::MatrixXd tet(3, 4);
  for (int i = 0; i < 4; ++i) tet.col(i) = g.verts.col(i);
  MappedRule mr = map_rule(simplex_rule(3, m_quad_degree), tet);
  double s = 0.0;
  for (int q = 0; q < mr.weights.size(); ++q)
    s += mr.weights(q) * u.scalar_value(cell, mr.points.col(q));
  return s;
}

namespace {

bool supports_intersect(const std::vector<int>& a, const std::vector<int>& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
  return false;
}

}  // namespace

DiscreteField BoundaryProjector::apply_P0(int level, const FieldView& u,
                                          const std::vector<int>* parent_support) const {
  if (level < 0 || level > 2) fail(ErrorCode::LevelMismatch, "apply_P0: level must be 0, 1 or 2");
  const FeSpace& space = m_spaces->level(level);
  DiscreteField out(space);
  for (int pos = 0; pos < m_weights->count(level); ++pos) {
    int anchor = m_weights->anchor_at(level, pos);
    if (parent_support &&
        !supports_intersect(m_weights->extension_at(level, pos).parent_support(),
                            *parent_support))
      continue;
    out.coeffs()(space.dof_of_simplex(anchor)) = alpha(level, anchor, u);
  }
  return out;
}

DiscreteField BoundaryProjector::apply(int level, const FieldView& u,
                                       const std::vector<int>* parent_support) const {
  if (level == 3) return apply_level3(u);
  return apply_P0(level, u, parent_support);
}

DiscreteField BoundaryProjector::apply_level3(const FieldView& u) const {
  const FeSpace& space = m_spaces->v3;
  const Mesh& mesh = space.mesh();
  DiscreteField out(space);
  for (int t = 0; t < mesh.n_cells(); ++t)
    out.coeffs()(space.dof_of_simplex(t)) = mesh.cell_geometry(t).orientation * alpha3(t, u);
  return out;
}

DiscreteField CanonicalInteriorProjector::project(int level, const FieldView& u) const {
  const FeSpace& space = m_spaces->level(level);
  const Mesh& mesh = space.mesh();
  DiscreteField out(space);
  for (int i = 0; i < space.dim(); ++i) {
    int sigma = space.dof_simplex(i);
    if (level < 3 && mesh.is_boundary(level, sigma)) continue;
    out.coeffs()(i) = canonical_dof(mesh, level, sigma, u, m_quad_degree);
  }
  return out;
}

DiscreteField ComposedProjector::apply(int level, const FieldView& u,
                                       const std::vector<int>* parent_support) const {
  DiscreteField vb = m_boundary->apply(level, u, parent_support);
  DiscreteFieldView vbv(vb);
  SumField residual(u, vbv, 1.0, -1.0);
  DiscreteField vi = m_interior->project(level, residual);
  return DiscreteField(vb.space(), vi.coeffs() + vb.coeffs());
}

DiscreteField ComposedProjector::apply(int level, const DiscreteField& u) const {
  const FeSpace& space = m_boundary->spaces().level(level);
  const Mesh& mesh = space.mesh();
  DiscreteFieldView uv(u);
  if (&u.space() == &space || (&u.space().mesh() == &mesh && u.space().level() == level)) {
    // cells where the field is nonzero, for pruning the alpha quadrature
    std::vector<int> support;
    for (int i = 0; i < u.space().dim(); ++i) {
      if (u.coeffs()(i) == 0.0) continue;
      for (int c : mesh.cells_of(level, u.space().dof_simplex(i))) support.push_back(c);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    DiscreteField vb = m_boundary->apply(level, uv, &support);
    // interior dof readout is exact for same-space fields
    DiscreteField out(space);
    for (int i = 0; i < space.dim(); ++i) {
      int sigma = space.dof_simplex(i);
      bool boundary = level < 3 && mesh.is_boundary(level, sigma);
      out.coeffs()(i) = boundary ? vb.coeffs()(i) : u.coeff_on_simplex(sigma);
    }
    return out;
  }
  return apply(level, uv);
}

}  // namespace fecp
