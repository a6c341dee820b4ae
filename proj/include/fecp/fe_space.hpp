#ifndef FECP_FE_SPACE_HPP
#define FECP_FE_SPACE_HPP

#include <iosfwd>
#include <string>

#include "fecp/fields.hpp"
#include "fecp/quadrature.hpp"
#include "fecp/splits.hpp"

namespace fecp {

// -- Whitney forms per cell ---------------------------------------------

double barycentric_value(const CellGeometry& g, int pos, const Vec3& x);
double whitney0(const CellGeometry& g, int pos, const Vec3& x);
Vec3 whitney1(const CellGeometry& g, int pa, int pb, const Vec3& x);
Vec3 whitney2(const CellGeometry& g, int pa, int pb, int pc, const Vec3& x);
double whitney3(const CellGeometry& g);                      // constant on the cell
Vec3 whitney1_curl(const CellGeometry& g, int pa, int pb);   // constant
double whitney2_div(const CellGeometry& g, int pa, int pb, int pc);  // constant

/// Positions of the (sorted) vertex tuple of simplex (level, index) within
/// the cell's sorted 4-tuple; fails if the simplex is not a subsimplex.
std::array<int, 4> local_positions(const Mesh& mesh, int cell, int level, int index);

/// Whitney expansion of a coefficient accessor (mesh simplex id -> double)
/// within one cell.
namespace whitney_expand {
using Coeff = std::function<double(int)>;
double scalar(const Mesh& mesh, int level, int cell, const Vec3& x, const Coeff& c);
Vec3 vector(const Mesh& mesh, int level, int cell, const Vec3& x, const Coeff& c);
Vec3 vector_d(const Mesh& mesh, int level, int cell, const Coeff& c);   // grad / curl
double scalar_d(const Mesh& mesh, int level, int cell, const Coeff& c); // div
}  // namespace whitney_expand

// -- finite element space ------------------------------------------------

/// Lowest-order space of the de Rham family at a given level: Lagrange P1
/// (l=0), Nedelec edge (l=1), Raviart-Thomas face (l=2), piecewise constants
/// (l=3), realized through Whitney forms. Dofs are the l-simplices of the
/// mesh; with `homogeneous` set, only the interior ones.
class FeSpace {
 public:
  FeSpace(const Mesh& mesh, int level, bool homogeneous = false, std::string tag = "b");

  const Mesh& mesh() const { return *m_mesh; }
  int level() const { return m_level; }
  bool homogeneous() const { return m_homogeneous; }
  const std::string& tag() const { return m_tag; }

  int dim() const { return static_cast<int>(m_dof_simplex.size()); }
  int dof_simplex(int dof) const { return m_dof_simplex[dof]; }
  /// Dof index of a mesh simplex, -1 when the simplex carries no dof.
  int dof_of_simplex(int simplex) const { return m_simplex_dof[simplex]; }

 private:
  const Mesh* m_mesh;
  int m_level;
  bool m_homogeneous;
  std::string m_tag;
  std::vector<int> m_dof_simplex;
  std::vector<int> m_simplex_dof;
};

/// The four lowest-order spaces of one mesh.
struct DeRhamComplex {
  FeSpace v0, v1, v2, v3;
  explicit DeRhamComplex(const Mesh& mesh, std::string tag = "b")
      : v0(mesh, 0, false, tag), v1(mesh, 1, false, tag), v2(mesh, 2, false, tag),
        v3(mesh, 3, false, tag) {}
  const FeSpace& level(int l) const {
    switch (l) {
      case 0: return v0;
      case 1: return v1;
      case 2: return v2;
      case 3: return v3;
      default: fail(ErrorCode::LevelMismatch, "DeRhamComplex: level out of range");
    }
  }
};

/// Coefficient vector over a space.
class DiscreteField {
 public:
  DiscreteField() = default;
  DiscreteField(const FeSpace& space, Eigen::VectorXd coeffs);
  explicit DiscreteField(const FeSpace& space);  // zero field

  const FeSpace& space() const { return *m_space; }
  const Eigen::VectorXd& coeffs() const { return m_coeffs; }
  Eigen::VectorXd& coeffs() { return m_coeffs; }

  double operator[](int dof) const { return m_coeffs(dof); }
  /// Coefficient attached to a mesh simplex (0 for non-dof simplices).
  double coeff_on_simplex(int simplex) const;

 private:
  const FeSpace* m_space = nullptr;
  Eigen::VectorXd m_coeffs;
};

/// Evaluation adapter for a DiscreteField; `cell` is a cell id of the
/// field's own mesh.
class DiscreteFieldView : public FieldView {
 public:
  explicit DiscreteFieldView(const DiscreteField& f) : m_f(&f) {}
  int level() const override { return m_f->space().level(); }
  double scalar_value(int cell, const Vec3& x) const override;
  Vec3 vector_value(int cell, const Vec3& x) const override;
  Vec3 vector_derivative(int cell, const Vec3& x) const override;
  double scalar_derivative(int cell, const Vec3& x) const override;

 private:
  const DiscreteField* m_f;
};

/// Adapts a field hosted on the parent mesh to Worsey-Farin cell contexts.
class ParentFieldOnWf : public FieldView {
 public:
  ParentFieldOnWf(const FieldView& inner, const WorseyFarinMesh& wf) : m_inner(&inner), m_wf(&wf) {}
  int level() const override { return m_inner->level(); }
  double scalar_value(int cell, const Vec3& x) const override {
    return m_inner->scalar_value(m_wf->parent_of(cell), x);
  }
  Vec3 vector_value(int cell, const Vec3& x) const override {
    return m_inner->vector_value(m_wf->parent_of(cell), x);
  }
  Vec3 vector_derivative(int cell, const Vec3& x) const override {
    return m_inner->vector_derivative(m_wf->parent_of(cell), x);
  }
  double scalar_derivative(int cell, const Vec3& x) const override {
    return m_inner->scalar_derivative(m_wf->parent_of(cell), x);
  }

 private:
  const FieldView* m_inner;
  const WorseyFarinMesh* m_wf;
};

/// Adapts a field hosted on the Worsey-Farin mesh to parent cell contexts
/// (sub-cell located by barycentric test).
class WfFieldOnParent : public FieldView {
 public:
  WfFieldOnParent(const FieldView& inner, const WorseyFarinMesh& wf) : m_inner(&inner), m_wf(&wf) {}
  int level() const override { return m_inner->level(); }
  double scalar_value(int cell, const Vec3& x) const override {
    return m_inner->scalar_value(locate(cell, x), x);
  }
  Vec3 vector_value(int cell, const Vec3& x) const override {
    return m_inner->vector_value(locate(cell, x), x);
  }
  Vec3 vector_derivative(int cell, const Vec3& x) const override {
    return m_inner->vector_derivative(locate(cell, x), x);
  }
  double scalar_derivative(int cell, const Vec3& x) const override {
    return m_inner->scalar_derivative(locate(cell, x), x);
  }

 private:
  int locate(int parent_cell, const Vec3& x) const;
  const FieldView* m_inner;
  const WorseyFarinMesh* m_wf;
};

// -- canonical dofs and interpolation -------------------------------------

/// Canonical degree of freedom of a level-l simplex: point value, tangential
/// edge integral, normal face flux, or signed cell integral (the sign is the
/// orientation of the sorted tuple).
double canonical_dof(const Mesh& mesh, int level, int sigma, const FieldView& u,
                     int quad_degree = 6);

DiscreteField interpolate_canonical(const FeSpace& space, const FieldView& u, int quad_degree = 6);
/// Same-space fields interpolate to themselves coefficient-exactly.
DiscreteField interpolate_canonical(const FeSpace& space, const DiscreteField& u,
                                    int quad_degree = 6);

/// Discrete exterior derivative: coefficients map through incidence numbers.
DiscreteField d_apply(const FeSpace& target, const DiscreteField& u);

// -- inner products --------------------------------------------------------

/// L2 inner product of two same-level fields over a set of cells.
double l2_inner(const Mesh& mesh, const FieldView& a, const FieldView& b,
                const std::vector<int>& cells, const QuadratureRule& rule);
double l2_norm(const Mesh& mesh, const FieldView& a, const std::vector<int>& cells,
               const QuadratureRule& rule);
/// Graph norm: (|a|^2 + |d a|^2)^(1/2) over the whole mesh.
double graph_norm(const Mesh& mesh, const FieldView& a, const QuadratureRule& rule);
std::vector<int> all_cells(const Mesh& mesh);

// -- traces ----------------------------------------------------------------

/// Boundary trace of a level-l field, evaluable per boundary face:
/// restriction (l=0), tangential component (l=1), normal component (l=2),
/// plus the twisted tangential trace n x u.
class TraceField {
 public:
  TraceField(const Mesh& mesh, const FieldView& u);

  int level() const { return m_u->level(); }
  double scalar_at(int bface, const Vec3& x) const;   // l=0 or l=2
  Vec3 tangential_at(int bface, const Vec3& x) const; // l=1
  Vec3 twisted_at(int bface, const Vec3& x) const;    // n x u, l=1

 private:
  const Mesh* m_mesh;
  const FieldView* m_u;
};

// -- serialization -----------------------------------------------------------

void write_field(const DiscreteField& f, std::ostream& out);
void write_field_file(const DiscreteField& f, const std::string& path);
DiscreteField read_field(const FeSpace& space, std::istream& in);
DiscreteField read_field_file(const FeSpace& space, const std::string& path);

}  // namespace fecp

#endif
