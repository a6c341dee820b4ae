#include "fecp/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fecp {

// -- FieldView defaults ----------------------------------------------------

double FieldView::scalar_value(int, const Vec3&) const {
  fail(ErrorCode::LevelMismatch, "field is not scalar-valued");
}
Vec3 FieldView::vector_value(int, const Vec3&) const {
  fail(ErrorCode::LevelMismatch, "field is not vector-valued");
}
Vec3 FieldView::vector_derivative(int, const Vec3&) const {
  fail(ErrorCode::LevelMismatch, "field derivative is not vector-valued");
}
double FieldView::scalar_derivative(int, const Vec3&) const {
  fail(ErrorCode::LevelMismatch, "field derivative is not scalar-valued");
}

AnalyticField AnalyticField::gradient_level(ScalarFn value, VectorFn grad) {
  AnalyticField f;
  f.m_level = 0;
  f.m_scalar = std::move(value);
  f.m_vector_d = std::move(grad);
  return f;
}

AnalyticField AnalyticField::curl_level(VectorFn value, VectorFn curl) {
  AnalyticField f;
  f.m_level = 1;
  f.m_vector = std::move(value);
  f.m_vector_d = std::move(curl);
  return f;
}

AnalyticField AnalyticField::divergence_level(VectorFn value, ScalarFn div) {
  AnalyticField f;
  f.m_level = 2;
  f.m_vector = std::move(value);
  f.m_scalar_d = std::move(div);
  return f;
}

AnalyticField AnalyticField::density_level(ScalarFn value) {
  AnalyticField f;
  f.m_level = 3;
  f.m_scalar = std::move(value);
  return f;
}

double AnalyticField::scalar_value(int, const Vec3& x) const {
  if (!m_scalar) fail(ErrorCode::LevelMismatch, "no scalar value callable");
  return m_scalar(x);
}
Vec3 AnalyticField::vector_value(int, const Vec3& x) const {
  if (!m_vector) fail(ErrorCode::LevelMismatch, "no vector value callable");
  return m_vector(x);
}
Vec3 AnalyticField::vector_derivative(int, const Vec3& x) const {
  if (m_level == 3) return Vec3::Zero();
  if (!m_vector_d) fail(ErrorCode::LevelMismatch, "no vector derivative callable");
  return m_vector_d(x);
}
double AnalyticField::scalar_derivative(int, const Vec3& x) const {
  if (m_level == 3) return 0.0;
  if (!m_scalar_d) fail(ErrorCode::LevelMismatch, "no scalar derivative callable");
  return m_scalar_d(x);
}

SumField::SumField(const FieldView& u, const FieldView& v, double a, double b)
    : m_u(&u), m_v(&v), m_a(a), m_b(b) {
  if (u.level() != v.level()) fail(ErrorCode::LevelMismatch, "SumField: mixed levels");
}
double SumField::scalar_value(int cell, const Vec3& x) const {
  return m_a * m_u->scalar_value(cell, x) + m_b * m_v->scalar_value(cell, x);
}
Vec3 SumField::vector_value(int cell, const Vec3& x) const {
  return m_a * m_u->vector_value(cell, x) + m_b * m_v->vector_value(cell, x);
}
Vec3 SumField::vector_derivative(int cell, const Vec3& x) const {
  return m_a * m_u->vector_derivative(cell, x) + m_b * m_v->vector_derivative(cell, x);
}
double SumField::scalar_derivative(int cell, const Vec3& x) const {
  return m_a * m_u->scalar_derivative(cell, x) + m_b * m_v->scalar_derivative(cell, x);
}

// -- Whitney forms ----------------------------------------------------------

double barycentric_value(const CellGeometry& g, int pos, const Vec3& x) {
  return 0.25 + g.grads.row(pos).dot(x - g.verts.rowwise().mean());
}

double whitney0(const CellGeometry& g, int pos, const Vec3& x) {
  return barycentric_value(g, pos, x);
}

Vec3 whitney1(const CellGeometry& g, int pa, int pb, const Vec3& x) {
  double la = barycentric_value(g, pa, x);
  double lb = barycentric_value(g, pb, x);
  return la * g.grads.row(pb).transpose() - lb * g.grads.row(pa).transpose();
}

Vec3 whitney2(const CellGeometry& g, int pa, int pb, int pc, const Vec3& x) {
  double la = barycentric_value(g, pa, x);
  double lb = barycentric_value(g, pb, x);
  double lc = barycentric_value(g, pc, x);
  Vec3 ga = g.grads.row(pa), gb = g.grads.row(pb), gc = g.grads.row(pc);
  return 2.0 * (la * gb.cross(gc) + lb * gc.cross(ga) + lc * ga.cross(gb));
}

double whitney3(const CellGeometry& g) { return g.orientation / g.volume; }

Vec3 whitney1_curl(const CellGeometry& g, int pa, int pb) {
  Vec3 ga = g.grads.row(pa), gb = g.grads.row(pb);
  return 2.0 * ga.cross(gb);
}

double whitney2_div(const CellGeometry& g, int pa, int pb, int pc) {
  Vec3 ga = g.grads.row(pa), gb = g.grads.row(pb), gc = g.grads.row(pc);
  return 6.0 * ga.dot(gb.cross(gc));
}

std::array<int, 4> local_positions(const Mesh& mesh, int cell, int level, int index) {
  const auto& c = mesh.cell(cell);
  std::vector<int> verts = mesh.simplex_vertices(level, index);
  std::array<int, 4> pos = {-1, -1, -1, -1};
  for (size_t i = 0; i < verts.size(); ++i) {
    for (int j = 0; j < 4; ++j)
      if (c[j] == verts[i]) pos[i] = j;
    if (pos[i] < 0) fail(ErrorCode::InvalidArgument, "local_positions: simplex not in cell");
  }
  return pos;
}

// -- FeSpace -----------------------------------------------------------------

FeSpace::FeSpace(const Mesh& mesh, int level, bool homogeneous, std::string tag)
    : m_mesh(&mesh), m_level(level), m_homogeneous(homogeneous), m_tag(std::move(tag)) {
  if (level < 0 || level > 3) fail(ErrorCode::LevelMismatch, "FeSpace: level out of range");
  const int n = mesh.n_simplices(level);
  m_simplex_dof.assign(n, -1);
  for (int s = 0; s < n; ++s) {
    if (homogeneous && level < 3 && mesh.is_boundary(level, s)) continue;
    m_simplex_dof[s] = static_cast<int>(m_dof_simplex.size());
    m_dof_simplex.push_back(s);
  }
}

DiscreteField::DiscreteField(const FeSpace& space, Eigen::VectorXd coeffs)
    : m_space(&space), m_coeffs(std::move(coeffs)) {
  if (m_coeffs.size() != space.dim())
    fail(ErrorCode::InvalidArgument, "DiscreteField: coefficient size mismatch");
}

DiscreteField::DiscreteField(const FeSpace& space)
    : m_space(&space), m_coeffs(Eigen::VectorXd::Zero(space.dim())) {}

double DiscreteField::coeff_on_simplex(int simplex) const {
  int dof = m_space->dof_of_simplex(simplex);
  return dof < 0 ? 0.0 : m_coeffs(dof);
}

namespace whitney_expand {

double scalar(const Mesh& mesh, int level, int cell, const Vec3& x, const Coeff& coeff) {
  const CellGeometry& g = mesh.cell_geometry(cell);
  double out = 0.0;
  if (level == 0) {
    for (int j = 0; j < 4; ++j) {
      double c = coeff(mesh.cell(cell)[j]);
      if (c != 0.0) out += c * whitney0(g, j, x);
    }
    return out;
  }
  if (level == 3) {
    double c = coeff(cell);
    return c * whitney3(g);
  }
  fail(ErrorCode::LevelMismatch, "whitney_expand::scalar: level must be 0 or 3");
}

Vec3 vector(const Mesh& mesh, int level, int cell, const Vec3& x, const Coeff& coeff) {
  const CellGeometry& g = mesh.cell_geometry(cell);
  Vec3 out = Vec3::Zero();
  if (level == 1) {
    for (int e : mesh.edges_of_cell(cell)) {
      double c = coeff(e);
      if (c != 0.0) {
        auto pos = local_positions(mesh, cell, 1, e);
        out += c * whitney1(g, pos[0], pos[1], x);
      }
    }
    return out;
  }
  if (level == 2) {
    for (int f : mesh.faces_of_cell(cell)) {
      double c = coeff(f);
      if (c != 0.0) {
        auto pos = local_positions(mesh, cell, 2, f);
        out += c * whitney2(g, pos[0], pos[1], pos[2], x);
      }
    }
    return out;
  }
  fail(ErrorCode::LevelMismatch, "whitney_expand::vector: level must be 1 or 2");
}

Vec3 vector_d(const Mesh& mesh, int level, int cell, const Coeff& coeff) {
  const CellGeometry& g = mesh.cell_geometry(cell);
  Vec3 out = Vec3::Zero();
  if (level == 0) {
    for (int j = 0; j < 4; ++j) {
      double c = coeff(mesh.cell(cell)[j]);
      if (c != 0.0) out += c * g.grads.row(j).transpose();
    }
    return out;
  }
  if (level == 1) {
    for (int e : mesh.edges_of_cell(cell)) {
      double c = coeff(e);
      if (c != 0.0) {
        auto pos = local_positions(mesh, cell, 1, e);
        out += c * whitney1_curl(g, pos[0], pos[1]);
      }
    }
    return out;
  }
  fail(ErrorCode::LevelMismatch, "whitney_expand::vector_d: level must be 0 or 1");
}

double scalar_d(const Mesh& mesh, int level, int cell, const Coeff& coeff) {
  const CellGeometry& g = mesh.cell_geometry(cell);
  if (level == 2) {
    double out = 0.0;
    for (int f : mesh.faces_of_cell(cell)) {
      double c = coeff(f);
      if (c != 0.0) {
        auto pos = local_positions(mesh, cell, 2, f);
        out += c * whitney2_div(g, pos[0], pos[1], pos[2]);
      }
    }
    return out;
  }
  if (level == 3) return 0.0;
  fail(ErrorCode::LevelMismatch, "whitney_expand::scalar_d: level must be 2 or 3");
}

}  // namespace whitney_expand

double DiscreteFieldView::scalar_value(int cell, const Vec3& x) const {
  return whitney_expand::scalar(m_f->space().mesh(), level(), cell, x,
                                [this](int s) { return m_f->coeff_on_simplex(s); });
}

Vec3 DiscreteFieldView::vector_value(int cell, const Vec3& x) const {
  return whitney_expand::vector(m_f->space().mesh(), level(), cell, x,
                                [this](int s) { return m_f->coeff_on_simplex(s); });
}

Vec3 DiscreteFieldView::vector_derivative(int cell, const Vec3&) const {
  return whitney_expand::vector_d(m_f->space().mesh(), level(), cell,
                                  [this](int s) { return m_f->coeff_on_simplex(s); });
}

double DiscreteFieldView::scalar_derivative(int cell, const Vec3&) const {
  return whitney_expand::scalar_d(m_f->space().mesh(), level(), cell,
                                  [this](int s) { return m_f->coeff_on_simplex(s); });
}

int WfFieldOnParent::locate(int parent_cell, const Vec3& x) const {
  const auto& subs = m_wf->sub_cells_of(parent_cell);
  std::vector<int> candidates(subs.begin(), subs.end());
  return m_wf->mesh().locate(candidates, x);
}

// -- canonical dofs ----------------------------------------------------------

double canonical_dof(const Mesh& mesh, int level, int sigma, const FieldView& u,
                     int quad_degree) {
  if (u.level() != level) fail(ErrorCode::LevelMismatch, "canonical_dof: level mismatch");
  switch (level) {
    case 0: {
      int cell = mesh.cells_of_vertex(sigma).front();
      return u.scalar_value(cell, mesh.vertex(sigma));
    }
    case 1: {
      int cell = mesh.cells_of_edge(sigma).front();
      Vec3 a = mesh.vertex(mesh.edge(sigma)[0]);
      Vec3 b = mesh.vertex(mesh.edge(sigma)[1]);
      Eigen::VectorXd t, w;
      gauss_legendre_01((quad_degree + 2) / 2, t, w);
      double s = 0.0;
      Vec3 tangent = b - a;  // integral of u . t_e ds = int u . (b-a) dt
      for (int q = 0; q < t.size(); ++q)
        s += w(q) * u.vector_value(cell, a + t(q) * (b - a)).dot(tangent);
      return s;
    }
    case 2: {
      int cell = mesh.cells_of_face(sigma).front();
      const auto& fv = mesh.face(sigma);
      Eigen::MatrixXd tri(3, 3);
      for (int i = 0; i < 3; ++i) tri.col(i) = mesh.vertex(fv[i]);
      MappedRule mr = map_rule(simplex_rule(2, quad_degree), tri);
      Vec3 n = mesh.face_geometry(sigma).normal;
      double s = 0.0;
      for (int q = 0; q < mr.weights.size(); ++q)
        s += mr.weights(q) * u.vector_value(cell, mr.points.col(q)).dot(n);
      return s;
    }
    case 3: {
      const CellGeometry& g = mesh.cell_geometry(sigma);
      Eigen::MatrixXd tet(3, 4);
      for (int i = 0; i < 4; ++i) tet.col(i) = g.verts.col(i);
      MappedRule mr = map_rule(simplex_rule(3, quad_degree), tet);
      double s = 0.0;
      for (int q = 0; q < mr.weights.size(); ++q)
        s += mr.weights(q) * u.scalar_value(sigma, mr.points.col(q));
      return g.orientation * s;
    }
    default: fail(ErrorCode::LevelMismatch, "canonical_dof: level out of range");
  }
}

DiscreteField interpolate_canonical(const FeSpace& space, const FieldView& u, int quad_degree) {
  if (u.level() != space.level())
    fail(ErrorCode::LevelMismatch, "interpolate_canonical: level mismatch");
  Eigen::VectorXd c(space.dim());
  for (int i = 0; i < space.dim(); ++i)
    c(i) = canonical_dof(space.mesh(), space.level(), space.dof_simplex(i), u, quad_degree);
  return DiscreteField(space, std::move(c));
}

DiscreteField interpolate_canonical(const FeSpace& space, const DiscreteField& u, int quad_degree) {
  if (&u.space() == &space) return u;
  if (&u.space().mesh() == &space.mesh() && u.space().level() == space.level()) {
    // same mesh and level: dof readout is exact
    Eigen::VectorXd c(space.dim());
    for (int i = 0; i < space.dim(); ++i) c(i) = u.coeff_on_simplex(space.dof_simplex(i));
    return DiscreteField(space, std::move(c));
  }
  DiscreteFieldView view(u);
  return interpolate_canonical(space, view, quad_degree);
}

DiscreteField d_apply(const FeSpace& target, const DiscreteField& u) {
  const FeSpace& src = u.space();
  const Mesh& mesh = src.mesh();
  if (&target.mesh() != &mesh || target.level() != src.level() + 1 || src.level() > 2)
    fail(ErrorCode::LevelMismatch, "d_apply: incompatible spaces");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(target.dim());
  for (int i = 0; i < target.dim(); ++i) {
    int parent = target.dof_simplex(i);
    double s = 0.0;
    switch (src.level()) {
      case 0: {
        const auto& e = mesh.edge(parent);
        s = u.coeff_on_simplex(e[1]) - u.coeff_on_simplex(e[0]);
        break;
      }
      case 1:
        for (int e : mesh.edges_of_face(parent))
          s += mesh.incidence(2, parent, e) * u.coeff_on_simplex(e);
        break;
      case 2:
        for (int f : mesh.faces_of_cell(parent))
          s += mesh.incidence(3, parent, f) * u.coeff_on_simplex(f);
        break;
    }
    out(i) = s;
  }
  return DiscreteField(target, std::move(out));
}

// -- inner products -----------------------------------------------------------

std::vector<int> all_cells(const Mesh& mesh) {
  std::vector<int> out(mesh.n_cells());
  for (int t = 0; t < mesh.n_cells(); ++t) out[t] = t;
  return out;
}

double l2_inner(const Mesh& mesh, const FieldView& a, const FieldView& b,
                const std::vector<int>& cells, const QuadratureRule& rule) {
  if (a.level() != b.level()) fail(ErrorCode::LevelMismatch, "l2_inner: level mismatch");
  const bool scalar = a.scalar_valued();
  double s = 0.0;
  for (int t : cells) {
    const CellGeometry& g = mesh.cell_geometry(t);
    Eigen::MatrixXd tet(3, 4);
    for (int i = 0; i < 4; ++i) tet.col(i) = g.verts.col(i);
    MappedRule mr = map_rule(rule, tet);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      double v = scalar ? a.scalar_value(t, x) * b.scalar_value(t, x)
                        : a.vector_value(t, x).dot(b.vector_value(t, x));
      s += mr.weights(q) * v;
    }
  }
  return s;
}

double l2_norm(const Mesh& mesh, const FieldView& a, const std::vector<int>& cells,
               const QuadratureRule& rule) {
  return std::sqrt(std::max(0.0, l2_inner(mesh, a, a, cells, rule)));
}

double graph_norm(const Mesh& mesh, const FieldView& a, const QuadratureRule& rule) {
  double s = 0.0;
  std::vector<int> cells = all_cells(mesh);
  for (int t : cells) {
    const CellGeometry& g = mesh.cell_geometry(t);
    Eigen::MatrixXd tet(3, 4);
    for (int i = 0; i < 4; ++i) tet.col(i) = g.verts.col(i);
    MappedRule mr = map_rule(rule, tet);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      double v2;
      switch (a.level()) {
        case 0: {
          double u = a.scalar_value(t, x);
          v2 = u * u + a.vector_derivative(t, x).squaredNorm();
          break;
        }
        case 1: {
          v2 = a.vector_value(t, x).squaredNorm() + a.vector_derivative(t, x).squaredNorm();
          break;
        }
        case 2: {
          double d = a.scalar_derivative(t, x);
          v2 = a.vector_value(t, x).squaredNorm() + d * d;
          break;
        }
        default: {
          double u = a.scalar_value(t, x);
          v2 = u * u;
          break;
        }
      }
      s += mr.weights(q) * v2;
    }
  }
  return std::sqrt(std::max(0.0, s));
}

// -- traces ---------------------------------------------------------------------

TraceField::TraceField(const Mesh& mesh, const FieldView& u) : m_mesh(&mesh), m_u(&u) {
  if (u.level() > 2) fail(ErrorCode::LevelMismatch, "TraceField: no trace at level 3");
}

double TraceField::scalar_at(int bface, const Vec3& x) const {
  int cell = m_mesh->boundary_cell(bface);
  if (level() == 0) return m_u->scalar_value(cell, x);
  if (level() == 2) return m_u->vector_value(cell, x).dot(m_mesh->outward_normal(bface));
  fail(ErrorCode::LevelMismatch, "scalar trace only at levels 0 and 2");
}

Vec3 TraceField::tangential_at(int bface, const Vec3& x) const {
  if (level() != 1) fail(ErrorCode::LevelMismatch, "tangential trace only at level 1");
  int cell = m_mesh->boundary_cell(bface);
  Vec3 n = m_mesh->outward_normal(bface);
  Vec3 u = m_u->vector_value(cell, x);
  return u - u.dot(n) * n;
}

Vec3 TraceField::twisted_at(int bface, const Vec3& x) const {
  if (level() != 1) fail(ErrorCode::LevelMismatch, "twisted trace only at level 1");
  int cell = m_mesh->boundary_cell(bface);
  return m_mesh->outward_normal(bface).cross(m_u->vector_value(cell, x));
}

// -- serialization ----------------------------------------------------------------

void write_field(const DiscreteField& f, std::ostream& out) {
  out.precision(17);
  out << f.space().level() << " " << f.space().tag() << " " << f.space().dim() << "\n";
  for (int i = 0; i < f.space().dim(); ++i) out << f.coeffs()(i) << "\n";
}

void write_field_file(const DiscreteField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path);
  write_field(f, out);
}

DiscreteField read_field(const FeSpace& space, std::istream& in) {
  int level = -1, n = -1;
  std::string tag;
  if (!(in >> level >> tag >> n)) fail(ErrorCode::ParseError, "field header");
  if (level != space.level() || n != space.dim())
    fail(ErrorCode::ParseError, "field header does not match the space");
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i)
    if (!(in >> c(i))) fail(ErrorCode::ParseError, "field coefficient " + std::to_string(i));
  return DiscreteField(space, std::move(c));
}

DiscreteField read_field_file(const FeSpace& space, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return read_field(space, in);
}

}  // namespace fecp
