#include "fecp/enriched.hpp"

#include <algorithm>

namespace fecp {

namespace {

// exponent tuples with given total over `n` slots; `positive` forces every
// exponent >= 1
void compositions(int total, int n, bool positive, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(n, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == n - 1) {
      if (!positive || remaining >= 1) {
        cur[pos] = remaining;
        out.push_back(cur);
      }
      return;
    }
    for (int e = positive ? 1 : 0; e <= remaining - (positive ? (n - 1 - pos) : 0); ++e) {
      cur[pos] = e;
      rec(pos + 1, remaining - e);
    }
  };
  if (n == 0) return;
  rec(0, total);
}

// subsets of size m of {0..n-1} containing element 0, ascending
void subsets_with_min(int n, int m, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == m) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  cur.push_back(0);
  rec(1);
}

}  // namespace

EnrichedDeRhamSpace::EnrichedDeRhamSpace(const Mesh& mesh, int level, int k)
    : m_mesh(&mesh), m_level(level), m_k(k) {
  if (level < 0 || level > 3) fail(ErrorCode::LevelMismatch, "EnrichedDeRhamSpace: bad level");
  if (k < 0) fail(ErrorCode::InvalidArgument, "EnrichedDeRhamSpace: bad complex index");
  const int r = k + 1;

  auto add_for_attach = [&](int attach_level, int attach_id) {
    std::vector<int> verts = mesh.simplex_vertices(attach_level, attach_id);
    const int nv = static_cast<int>(verts.size());
    if (m_level == 0) {
      // continuous P_r: Bernstein monomials with full support on the attach
      std::vector<std::vector<int>> alphas;
      compositions(r, nv, true, alphas);
      for (const auto& a : alphas) {
        BasisFn fn;
        fn.attach_level = attach_level;
        fn.attach_id = attach_id;
        fn.n_alpha = nv;
        for (int i = 0; i < nv; ++i) {
          fn.alpha_verts[i] = verts[i];
          fn.alpha_exp[i] = a[i];
        }
        m_fns.push_back(fn);
      }
      return;
    }
    if (m_level == 3) {
      std::vector<std::vector<int>> alphas;
      compositions(r - 1, nv, false, alphas);
      for (const auto& a : alphas) {
        BasisFn fn;
        fn.attach_level = attach_level;
        fn.attach_id = attach_id;
        fn.sigma_count = 4;
        for (int i = 0; i < 4; ++i) fn.sigma_verts[i] = verts[i];
        int na = 0;
        for (int i = 0; i < nv; ++i)
          if (a[i] > 0) {
            fn.alpha_verts[na] = verts[i];
            fn.alpha_exp[na] = a[i];
            ++na;
          }
        fn.n_alpha = na;
        m_fns.push_back(fn);
      }
      return;
    }
    // levels 1 and 2: lambda^alpha W_sigma with supp(alpha) u sigma = attach
    // and min(attach) in sigma
    std::vector<std::vector<int>> sigmas;
    subsets_with_min(nv, m_level + 1, sigmas);
    for (const auto& sig : sigmas) {
      std::vector<char> in_sigma(nv, 0);
      for (int i : sig) in_sigma[i] = 1;
      std::vector<std::vector<int>> alphas;
      compositions(r - 1, nv, false, alphas);
      for (const auto& a : alphas) {
        bool covers = true;
        for (int i = 0; i < nv; ++i)
          if (!in_sigma[i] && a[i] == 0) covers = false;
        if (!covers) continue;
        BasisFn fn;
        fn.attach_level = attach_level;
        fn.attach_id = attach_id;
        fn.sigma_count = m_level + 1;
        for (size_t i = 0; i < sig.size(); ++i) fn.sigma_verts[i] = verts[sig[i]];
        int na = 0;
        for (int i = 0; i < nv; ++i)
          if (a[i] > 0) {
            fn.alpha_verts[na] = verts[i];
            fn.alpha_exp[na] = a[i];
            ++na;
          }
        fn.n_alpha = na;
        m_fns.push_back(fn);
      }
    }
  };

  if (m_level == 3) {
    for (int t = 0; t < mesh.n_cells(); ++t) add_for_attach(3, t);
  } else {
    int lo = (m_level == 0) ? 0 : m_level;
    int hi = (m_level == 0) ? std::min(3, r - 1) : std::min(3, m_level + r - 1);
    for (int al = lo; al <= hi; ++al)
      for (int id = 0; id < mesh.n_simplices(al); ++id) add_for_attach(al, id);
  }

  // per-cell active lists and boundary-attached set
  m_cell_fns.assign(mesh.n_cells(), {});
  for (int j = 0; j < dim(); ++j) {
    const BasisFn& fn = m_fns[j];
    for (int t : mesh.cells_of(fn.attach_level, fn.attach_id)) m_cell_fns[t].push_back(j);
    if (fn.attach_level < 3 && mesh.is_boundary(fn.attach_level, fn.attach_id))
      m_boundary_fns.push_back(j);
  }
}

std::array<int, 4> EnrichedDeRhamSpace::alpha_positions(const BasisFn& fn, int cell) const {
  const auto& c = m_mesh->cell(cell);
  std::array<int, 4> pos{};
  for (int i = 0; i < fn.n_alpha; ++i) {
    pos[i] = -1;
    for (int j = 0; j < 4; ++j)
      if (c[j] == fn.alpha_verts[i]) pos[i] = j;
    if (pos[i] < 0) fail(ErrorCode::InvalidArgument, "enriched basis not active on cell");
  }
  return pos;
}

std::array<int, 4> EnrichedDeRhamSpace::sigma_positions(const BasisFn& fn, int cell) const {
  const auto& c = m_mesh->cell(cell);
  std::array<int, 4> pos{};
  for (int i = 0; i < fn.sigma_count; ++i) {
    pos[i] = -1;
    for (int j = 0; j < 4; ++j)
      if (c[j] == fn.sigma_verts[i]) pos[i] = j;
    if (pos[i] < 0) fail(ErrorCode::InvalidArgument, "enriched basis not active on cell");
  }
  return pos;
}

double EnrichedDeRhamSpace::monomial(const BasisFn& fn, const CellGeometry& g,
                                     const std::array<int, 4>& pos, const Vec3& x) const {
  double v = 1.0;
  for (int i = 0; i < fn.n_alpha; ++i) {
    double l = barycentric_value(g, pos[i], x);
    for (int e = 0; e < fn.alpha_exp[i]; ++e) v *= l;
  }
  return v;
}

Vec3 EnrichedDeRhamSpace::monomial_grad(const BasisFn& fn, const CellGeometry& g,
                                        const std::array<int, 4>& pos, const Vec3& x) const {
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < fn.n_alpha; ++i) {
    double partial = static_cast<double>(fn.alpha_exp[i]);
    for (int j = 0; j < fn.n_alpha; ++j) {
      double l = barycentric_value(g, pos[j], x);
      int e = fn.alpha_exp[j] - (i == j ? 1 : 0);
      for (int q = 0; q < e; ++q) partial *= l;
    }
    out += partial * g.grads.row(pos[i]).transpose();
  }
  return out;
}

double EnrichedDeRhamSpace::scalar_basis(int j, int t, const Vec3& x) const {
  const BasisFn& fn = m_fns[j];
  const CellGeometry& g = m_mesh->cell_geometry(t);
  auto apos = alpha_positions(fn, t);
  if (m_level == 0) return monomial(fn, g, apos, x);
  if (m_level == 3) return monomial(fn, g, apos, x) * whitney3(g);
  fail(ErrorCode::LevelMismatch, "scalar_basis: not a scalar level");
}

Vec3 EnrichedDeRhamSpace::vector_basis(int j, int t, const Vec3& x) const {
  const BasisFn& fn = m_fns[j];
  const CellGeometry& g = m_mesh->cell_geometry(t);
  auto apos = alpha_positions(fn, t);
  auto spos = sigma_positions(fn, t);
  double mono = monomial(fn, g, apos, x);
  if (m_level == 1) return mono * whitney1(g, spos[0], spos[1], x);
  if (m_level == 2) return mono * whitney2(g, spos[0], spos[1], spos[2], x);
  fail(ErrorCode::LevelMismatch, "vector_basis: not a vector level");
}

Vec3 EnrichedDeRhamSpace::vector_basis_d(int j, int t, const Vec3& x) const {
  const BasisFn& fn = m_fns[j];
  const CellGeometry& g = m_mesh->cell_geometry(t);
  auto apos = alpha_positions(fn, t);
  if (m_level == 0) return monomial_grad(fn, g, apos, x);
  if (m_level == 1) {
    auto spos = sigma_positions(fn, t);
    return monomial_grad(fn, g, apos, x).cross(whitney1(g, spos[0], spos[1], x)) +
           monomial(fn, g, apos, x) * whitney1_curl(g, spos[0], spos[1]);
  }
  fail(ErrorCode::LevelMismatch, "vector_basis_d: levels 0 and 1 only");
}

double EnrichedDeRhamSpace::scalar_basis_d(int j, int t, const Vec3& x) const {
  const BasisFn& fn = m_fns[j];
  const CellGeometry& g = m_mesh->cell_geometry(t);
  if (m_level == 2) {
    auto apos = alpha_positions(fn, t);
    auto spos = sigma_positions(fn, t);
    return monomial_grad(fn, g, apos, x).dot(whitney2(g, spos[0], spos[1], spos[2], x)) +
           monomial(fn, g, apos, x) * whitney2_div(g, spos[0], spos[1], spos[2]);
  }
  if (m_level == 3) return 0.0;
  fail(ErrorCode::LevelMismatch, "scalar_basis_d: levels 2 and 3 only");
}

double EnrichedField::scalar_value(int cell, const Vec3& x) const {
  double s = 0.0;
  for (int j : m_space->cell_basis(cell)) {
    double c = m_coeffs(j);
    if (c != 0.0) s += c * m_space->scalar_basis(j, cell, x);
  }
  return s;
}

Vec3 EnrichedField::vector_value(int cell, const Vec3& x) const {
  Vec3 s = Vec3::Zero();
  for (int j : m_space->cell_basis(cell)) {
    double c = m_coeffs(j);
    if (c != 0.0) s += c * m_space->vector_basis(j, cell, x);
  }
  return s;
}

Vec3 EnrichedField::vector_derivative(int cell, const Vec3& x) const {
  Vec3 s = Vec3::Zero();
  for (int j : m_space->cell_basis(cell)) {
    double c = m_coeffs(j);
    if (c != 0.0) s += c * m_space->vector_basis_d(j, cell, x);
  }
  return s;
}

double EnrichedField::scalar_derivative(int cell, const Vec3& x) const {
  if (level() == 3) return 0.0;
  double s = 0.0;
  for (int j : m_space->cell_basis(cell)) {
    double c = m_coeffs(j);
    if (c != 0.0) s += c * m_space->scalar_basis_d(j, cell, x);
  }
  return s;
}

namespace {

template <typename Pair>
Eigen::MatrixXd assemble_cellwise(const EnrichedDeRhamSpace& space, int quad_degree, Pair&& pair) {
  const Mesh& mesh = space.mesh();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(space.dim(), space.dim());
  QuadratureRule rule = simplex_rule(3, quad_degree);
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const auto& active = space.cell_basis(t);
    const CellGeometry& g = mesh.cell_geometry(t);
    Eigen::MatrixXd tet(3, 4);
    for (int i = 0; i < 4; ++i) tet.col(i) = g.verts.col(i);
    MappedRule mr = map_rule(rule, tet);
    const int n = static_cast<int>(active.size());
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          local(a, b) += mr.weights(q) * pair(t, active[a], active[b], x);
    }
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        G(active[a], active[b]) += local(a, b);
        if (a != b) G(active[b], active[a]) += local(a, b);
      }
  }
  return G;
}

}  // namespace

Eigen::MatrixXd enriched_mass(const EnrichedDeRhamSpace& space, int quad_degree) {
  const bool scalar = space.level() == 0 || space.level() == 3;
  return assemble_cellwise(space, quad_degree, [&](int t, int a, int b, const Vec3& x) {
    if (scalar) return space.scalar_basis(a, t, x) * space.scalar_basis(b, t, x);
    return space.vector_basis(a, t, x).dot(space.vector_basis(b, t, x));
  });
}

Eigen::MatrixXd enriched_graph_gram(const EnrichedDeRhamSpace& space, int quad_degree) {
  const int lv = space.level();
  return assemble_cellwise(space, quad_degree, [&](int t, int a, int b, const Vec3& x) {
    double s = 0.0;
    switch (lv) {
      case 0:
        s = space.scalar_basis(a, t, x) * space.scalar_basis(b, t, x) +
            space.vector_basis_d(a, t, x).dot(space.vector_basis_d(b, t, x));
        break;
      case 1:
        s = space.vector_basis(a, t, x).dot(space.vector_basis(b, t, x)) +
            space.vector_basis_d(a, t, x).dot(space.vector_basis_d(b, t, x));
        break;
      case 2:
        s = space.vector_basis(a, t, x).dot(space.vector_basis(b, t, x)) +
            space.scalar_basis_d(a, t, x) * space.scalar_basis_d(b, t, x);
        break;
      default:
        s = space.scalar_basis(a, t, x) * space.scalar_basis(b, t, x);
        break;
    }
    return s;
  });
}

TraceConstraint enriched_trace_constraint(
    const EnrichedDeRhamSpace& space,
    const std::function<double(int, const Vec3&)>& g_scalar,
    const std::function<Vec3(int, const Vec3&)>& g_tangential, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const int lv = space.level();
  const auto& bnd = space.boundary_basis();
  std::vector<int> row_of(space.dim(), -1);
  for (size_t i = 0; i < bnd.size(); ++i) row_of[bnd[i]] = static_cast<int>(i);

  TraceConstraint out;
  out.rows = Eigen::MatrixXd::Zero(bnd.size(), space.dim());
  out.rhs = Eigen::VectorXd::Zero(bnd.size());
  QuadratureRule tri = simplex_rule(2, quad_degree);
  for (int bf : mesh.boundary_faces()) {
    int cell = mesh.boundary_cell(bf);
    Vec3 n = mesh.outward_normal(bf);
    const auto& fv = mesh.face(bf);
    Eigen::MatrixXd verts(3, 3);
    for (int i = 0; i < 3; ++i) verts.col(i) = mesh.vertex(fv[i]);
    MappedRule mr = map_rule(tri, verts);
    // boundary-attached basis functions with a trace on this face
    std::vector<int> active;
    for (int j : space.cell_basis(cell)) {
      if (row_of[j] < 0) continue;
      const auto& fn = space.basis(j);
      std::vector<int> av = mesh.simplex_vertices(fn.attach_level, fn.attach_id);
      bool inside = true;
      for (int v : av)
        inside = inside && (fv[0] == v || fv[1] == v || fv[2] == v);
      if (inside) active.push_back(j);
    }
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      // traces of the active functions
      std::vector<double> ts(active.size(), 0.0);
      std::vector<Vec3> tv(active.size(), Vec3::Zero());
      for (size_t a = 0; a < active.size(); ++a) {
        if (lv == 0)
          ts[a] = space.scalar_basis(active[a], cell, x);
        else if (lv == 2)
          ts[a] = space.vector_basis(active[a], cell, x).dot(n);
        else {
          Vec3 u = space.vector_basis(active[a], cell, x);
          tv[a] = u - u.dot(n) * n;
        }
      }
      double gs = 0.0;
      Vec3 gv = Vec3::Zero();
      if (lv == 1)
        gv = g_tangential(bf, x);
      else
        gs = g_scalar(bf, x);
      for (size_t a = 0; a < active.size(); ++a) {
        int row = row_of[active[a]];
        for (size_t b = 0; b < active.size(); ++b) {
          double v = (lv == 1) ? tv[a].dot(tv[b]) : ts[a] * ts[b];
          out.rows(row, active[b]) += mr.weights(q) * v;
        }
        out.rhs(row) += mr.weights(q) * ((lv == 1) ? tv[a].dot(gv) : ts[a] * gs);
      }
    }
  }
  return out;
}

}  // namespace fecp
