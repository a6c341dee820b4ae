#include "fecp/applications.hpp"

#include <algorithm>
#include <cmath>

namespace fecp {

namespace {

const std::vector<int>& boundary_list(const Mesh& mesh, int level) {
  switch (level) {
    case 0: return mesh.boundary_vertices();
    case 1: return mesh.boundary_edges();
    case 2: return mesh.boundary_faces();
    default: fail(ErrorCode::LevelMismatch, "boundary_list: level out of range");
  }
}

// coefficient accessor of the zero-extension of a discrete trace
struct TraceCoeffs {
  const Mesh* mesh;
  const TraceData* g;
  std::map<int, int> pos;
  TraceCoeffs(const Mesh& m, const TraceData& data) : mesh(&m), g(&data) {
    const auto& list = boundary_list(m, data.level);
    for (size_t i = 0; i < list.size(); ++i) pos[list[i]] = static_cast<int>(i);
  }
  double operator()(int simplex) const {
    auto it = pos.find(simplex);
    return it == pos.end() ? 0.0 : g->coeffs(it->second);
  }
};

}  // namespace

TraceData trace_of_discrete(const DiscreteField& u) {
  const FeSpace& space = u.space();
  const Mesh& mesh = space.mesh();
  if (space.level() > 2) fail(ErrorCode::LevelMismatch, "trace_of_discrete: no trace at level 3");
  const auto& list = boundary_list(mesh, space.level());
  TraceData g;
  g.level = space.level();
  g.coeffs.resize(list.size());
  for (size_t i = 0; i < list.size(); ++i) g.coeffs(i) = u.coeff_on_simplex(list[i]);
  return g;
}

double trace_eval_scalar(const Mesh& mesh, const TraceData& g, int bface, const Vec3& x) {
  TraceCoeffs coeff(mesh, g);
  int cell = mesh.boundary_cell(bface);
  if (g.level == 0) return whitney_expand::scalar(mesh, 0, cell, x, coeff);
  if (g.level == 2)
    return whitney_expand::vector(mesh, 2, cell, x, coeff).dot(mesh.outward_normal(bface));
  fail(ErrorCode::LevelMismatch, "trace_eval_scalar: levels 0 and 2 only");
}

Vec3 trace_eval_tangential(const Mesh& mesh, const TraceData& g, int bface, const Vec3& x) {
  if (g.level != 1) fail(ErrorCode::LevelMismatch, "trace_eval_tangential: level 1 only");
  TraceCoeffs coeff(mesh, g);
  int cell = mesh.boundary_cell(bface);
  Vec3 n = mesh.outward_normal(bface);
  Vec3 u = whitney_expand::vector(mesh, 1, cell, x, coeff);
  return u - u.dot(n) * n;
}

Eigen::VectorXd constrained_min_quadratic(const Eigen::MatrixXd& G, const Eigen::VectorXd& f,
                                          const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                                          ErrorCode infeasible_code) {
  const int n = static_cast<int>(G.rows());
  if (C.rows() == 0) {
    Eigen::VectorXd x = G.ldlt().solve(f);
    return x;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C.transpose());
  const auto& R = qr.matrixR();
  double rmax = std::abs(R(0, 0));
  int rank = 0;
  for (int i = 0; i < std::min(R.rows(), R.cols()); ++i)
    if (std::abs(R(i, i)) > 1e-12 * std::max(rmax, 1e-300)) ++rank;

  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd Q1 = Q.leftCols(rank);
  Eigen::MatrixXd Q2 = Q.rightCols(n - rank);
  Eigen::VectorXd dp = qr.colsPermutation().transpose() * d;
  Eigen::MatrixXd R1 = R.topLeftCorner(rank, rank);
  Eigen::VectorXd y1 =
      R1.triangularView<Eigen::Upper>().transpose().solve(dp.head(rank));
  Eigen::VectorXd x0 = Q1 * y1;

  double dres = (C * x0 - d).norm();
  if (dres > 1e-10 * std::max(1.0, d.norm()))
    fail(infeasible_code, "constrained_min_quadratic: inconsistent constraints");

  if (n == rank) return x0;
  Eigen::MatrixXd A = Q2.transpose() * G * Q2;
  Eigen::VectorXd b = Q2.transpose() * (f - G * x0);
  Eigen::VectorXd y2 = A.ldlt().solve(b);
  return x0 + Q2 * y2;
}

ExtensionOperator::ExtensionOperator(const Mesh& mesh, int level, int k)
    : m_mesh(&mesh),
      m_level(level),
      m_k(k),
      m_quad(2 * (k + 1)),
      m_space(mesh, level, k),
      m_gram(enriched_graph_gram(m_space, m_quad)) {
  if (level > 2) fail(ErrorCode::LevelMismatch, "ExtensionOperator: levels 0..2 only");
}

EnrichedField ExtensionOperator::extend(const TraceData& g) const {
  if (g.level != m_level) fail(ErrorCode::LevelMismatch, "extend: trace level mismatch");
  if (m_level == 1)
    return extend_surface(nullptr,
                          [&](int bf, const Vec3& x) { return trace_eval_tangential(*m_mesh, g, bf, x); });
  return extend_surface([&](int bf, const Vec3& x) { return trace_eval_scalar(*m_mesh, g, bf, x); },
                        nullptr);
}

EnrichedField ExtensionOperator::extend_surface(
    const std::function<double(int, const Vec3&)>& g_scalar,
    const std::function<Vec3(int, const Vec3&)>& g_tangential) const {
  TraceConstraint tc = enriched_trace_constraint(m_space, g_scalar, g_tangential, m_quad);
  Eigen::VectorXd x = constrained_min_quadratic(
      m_gram, Eigen::VectorXd::Zero(m_space.dim()), tc.rows, tc.rhs, ErrorCode::InfeasibleTrace);
  return EnrichedField(m_space, std::move(x));
}

double ExtensionOperator::energy(const EnrichedField& u) const {
  return std::sqrt(std::max(0.0, u.coeffs().dot(m_gram * u.coeffs())));
}

DiscreteField lift(const ComposedProjector& pi, const ExtensionOperator& ext, const TraceData& g) {
  EnrichedField e = ext.extend(g);
  return pi.apply(g.level, e);
}

namespace {

// dense incidence matrix of d: level -> level+1 on the Whitney spaces
Eigen::MatrixXd incidence_matrix(const Mesh& mesh, int level) {
  const int rows = mesh.n_simplices(level + 1);
  const int cols = mesh.n_simplices(level);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, cols);
  for (int p = 0; p < rows; ++p) {
    switch (level) {
      case 0: {
        const auto& e = mesh.edge(p);
        D(p, e[0]) = -1.0;
        D(p, e[1]) = 1.0;
        break;
      }
      case 1:
        for (int e : mesh.edges_of_face(p)) D(p, e) = mesh.incidence(2, p, e);
        break;
      case 2:
        for (int f : mesh.faces_of_cell(p)) D(p, f) = mesh.incidence(3, p, f);
        break;
      default: fail(ErrorCode::LevelMismatch, "incidence_matrix: level out of range");
    }
  }
  return D;
}

Eigen::MatrixXd whitney_mass(const FeSpace& space, int quad_degree) {
  const Mesh& mesh = space.mesh();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(space.dim(), space.dim());
  QuadratureRule rule = simplex_rule(3, quad_degree);
  const bool scalar = space.level() == 0 || space.level() == 3;
  for (int t = 0; t < mesh.n_cells(); ++t) {
    std::vector<int> subs;
    switch (space.level()) {
      case 0: subs.assign(mesh.cell(t).begin(), mesh.cell(t).end()); break;
      case 1: subs.assign(mesh.edges_of_cell(t).begin(), mesh.edges_of_cell(t).end()); break;
      case 2: subs.assign(mesh.faces_of_cell(t).begin(), mesh.faces_of_cell(t).end()); break;
      default: subs = {t}; break;
    }
    const CellGeometry& g = mesh.cell_geometry(t);
    Eigen::MatrixXd tet(3, 4);
    for (int i = 0; i < 4; ++i) tet.col(i) = g.verts.col(i);
    MappedRule mr = map_rule(rule, tet);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      for (size_t a = 0; a < subs.size(); ++a) {
        for (size_t b = a; b < subs.size(); ++b) {
          double val;
          if (scalar) {
            auto ca = [&](int s) { return s == subs[a] ? 1.0 : 0.0; };
            auto cb = [&](int s) { return s == subs[b] ? 1.0 : 0.0; };
            val = whitney_expand::scalar(mesh, space.level(), t, x, ca) *
                  whitney_expand::scalar(mesh, space.level(), t, x, cb);
          } else {
            auto ca = [&](int s) { return s == subs[a] ? 1.0 : 0.0; };
            auto cb = [&](int s) { return s == subs[b] ? 1.0 : 0.0; };
            val = whitney_expand::vector(mesh, space.level(), t, x, ca)
                      .dot(whitney_expand::vector(mesh, space.level(), t, x, cb));
          }
          int ia = space.dof_of_simplex(subs[a]);
          int ib = space.dof_of_simplex(subs[b]);
          M(ia, ib) += mr.weights(q) * val;
          if (ia != ib) M(ib, ia) += mr.weights(q) * val;
        }
      }
    }
  }
  return M;
}

}  // namespace

MinMinReport min_min_compare(const DeRhamComplex& spaces, int level, const TraceData& g,
                             const DiscreteField& f, int k) {
  const Mesh& mesh = spaces.v0.mesh();
  if (level > 2) fail(ErrorCode::LevelMismatch, "min_min_compare: levels 0..2 only");
  if (g.level != level || f.space().level() != level + 1)
    fail(ErrorCode::LevelMismatch, "min_min_compare: data levels inconsistent");

  MinMinReport report;
  report.level = level;

  // discrete minimum over the Whitney space
  {
    const FeSpace& space = spaces.level(level);
    Eigen::MatrixXd M = whitney_mass(space, 4);
    const auto& blist = boundary_list(mesh, level);
    Eigen::MatrixXd D = incidence_matrix(mesh, level);
    Eigen::MatrixXd C(blist.size() + D.rows(), space.dim());
    Eigen::VectorXd d(C.rows());
    C.setZero();
    for (size_t i = 0; i < blist.size(); ++i) {
      C(i, space.dof_of_simplex(blist[i])) = 1.0;
      d(i) = g.coeffs(i);
    }
    for (int p = 0; p < D.rows(); ++p) {
      for (int c = 0; c < D.cols(); ++c)
        if (D(p, c) != 0.0) C(blist.size() + p, space.dof_of_simplex(c)) = D(p, c);
      d(blist.size() + p) = f.coeff_on_simplex(p);
    }
    Eigen::VectorXd v = constrained_min_quadratic(M, Eigen::VectorXd::Zero(space.dim()), C, d);
    report.discrete_min = std::sqrt(std::max(0.0, v.dot(M * v)));
  }

  // proxy minimum over the enriched space
  {
    EnrichedDeRhamSpace es(mesh, level, k);
    EnrichedDeRhamSpace es_next(mesh, level + 1, k);
    const int quad = 2 * (k + 1);
    Eigen::MatrixXd M = enriched_mass(es, quad);
    std::function<double(int, const Vec3&)> gs;
    std::function<Vec3(int, const Vec3&)> gt;
    if (level == 1)
      gt = [&](int bf, const Vec3& x) { return trace_eval_tangential(mesh, g, bf, x); };
    else
      gs = [&](int bf, const Vec3& x) { return trace_eval_scalar(mesh, g, bf, x); };
    TraceConstraint tc = enriched_trace_constraint(es, gs, gt, quad);

    // derivative rows: (d v - f, w) = 0 for every basis w of the next space
    Eigen::MatrixXd Drows = Eigen::MatrixXd::Zero(es_next.dim(), es.dim());
    Eigen::VectorXd drhs = Eigen::VectorXd::Zero(es_next.dim());
    QuadratureRule rule = simplex_rule(3, quad);
    DiscreteFieldView fview(f);
    for (int t = 0; t < mesh.n_cells(); ++t) {
      const CellGeometry& cg = mesh.cell_geometry(t);
      Eigen::MatrixXd tet(3, 4);
      for (int i = 0; i < 4; ++i) tet.col(i) = cg.verts.col(i);
      MappedRule mr = map_rule(rule, tet);
      const auto& trial = es.cell_basis(t);
      const auto& test = es_next.cell_basis(t);
      for (int q = 0; q < mr.weights.size(); ++q) {
        Vec3 x = mr.points.col(q);
        const bool next_scalar = level + 1 == 3;
        for (int m : test) {
          double ws = 0.0;
          Vec3 wv = Vec3::Zero();
          if (next_scalar)
            ws = es_next.scalar_basis(m, t, x);
          else
            wv = es_next.vector_basis(m, t, x);
          for (int j : trial) {
            double val;
            if (level == 0 || level == 1) {
              Vec3 dj = es.vector_basis_d(j, t, x);
              val = dj.dot(wv);
            } else {
              val = es.scalar_basis_d(j, t, x) * ws;
            }
            Drows(m, j) += mr.weights(q) * val;
          }
          double frhs = next_scalar ? fview.scalar_value(t, x) * ws
                                    : fview.vector_value(t, x).dot(wv);
          drhs(m) += mr.weights(q) * frhs;
        }
      }
    }
    Eigen::MatrixXd C(tc.rows.rows() + Drows.rows(), es.dim());
    C << tc.rows, Drows;
    Eigen::VectorXd d(C.rows());
    d << tc.rhs, drhs;
    Eigen::VectorXd v = constrained_min_quadratic(M, Eigen::VectorXd::Zero(es.dim()), C, d);
    report.proxy_min = std::sqrt(std::max(0.0, v.dot(M * v)));
  }

  report.ratio = report.discrete_min / std::max(report.proxy_min, 1e-300);
  return report;
}

BestApproxReport best_approx_demo(const DeRhamComplex& spaces, int level, const FieldView& u,
                                  const TraceData& g, int k, int quad_degree) {
  const Mesh& mesh = spaces.v0.mesh();
  const FeSpace& space = spaces.level(level);
  BestApproxReport report;
  report.level = level;

  // graph Gram, data pairing and data norm over the Whitney space
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(space.dim(), space.dim());
  Eigen::VectorXd fvec = Eigen::VectorXd::Zero(space.dim());
  QuadratureRule rule = simplex_rule(3, quad_degree);
  double unorm2 = 0.0;
  for (int t = 0; t < mesh.n_cells(); ++t) {
    std::vector<int> subs;
    switch (level) {
      case 0: subs.assign(mesh.cell(t).begin(), mesh.cell(t).end()); break;
      case 1: subs.assign(mesh.edges_of_cell(t).begin(), mesh.edges_of_cell(t).end()); break;
      default: subs.assign(mesh.faces_of_cell(t).begin(), mesh.faces_of_cell(t).end()); break;
    }
    const CellGeometry& cg = mesh.cell_geometry(t);
    Eigen::MatrixXd tet(3, 4);
    for (int i = 0; i < 4; ++i) tet.col(i) = cg.verts.col(i);
    MappedRule mr = map_rule(rule, tet);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      // basis values and derivatives
      std::vector<double> bs(subs.size()), bds(subs.size());
      std::vector<Vec3> bv(subs.size()), bdv(subs.size());
      for (size_t a = 0; a < subs.size(); ++a) {
        auto ca = [&](int s) { return s == subs[a] ? 1.0 : 0.0; };
        if (level == 0) {
          bs[a] = whitney_expand::scalar(mesh, 0, t, x, ca);
          bdv[a] = whitney_expand::vector_d(mesh, 0, t, ca);
        } else if (level == 1) {
          bv[a] = whitney_expand::vector(mesh, 1, t, x, ca);
          bdv[a] = whitney_expand::vector_d(mesh, 1, t, ca);
        } else {
          bv[a] = whitney_expand::vector(mesh, 2, t, x, ca);
          bds[a] = whitney_expand::scalar_d(mesh, 2, t, ca);
        }
      }
      double us = 0.0, uds = 0.0;
      Vec3 uv = Vec3::Zero(), udv = Vec3::Zero();
      if (level == 0) {
        us = u.scalar_value(t, x);
        udv = u.vector_derivative(t, x);
        unorm2 += mr.weights(q) * (us * us + udv.squaredNorm());
      } else if (level == 1) {
        uv = u.vector_value(t, x);
        udv = u.vector_derivative(t, x);
        unorm2 += mr.weights(q) * (uv.squaredNorm() + udv.squaredNorm());
      } else {
        uv = u.vector_value(t, x);
        uds = u.scalar_derivative(t, x);
        unorm2 += mr.weights(q) * (uv.squaredNorm() + uds * uds);
      }
      for (size_t a = 0; a < subs.size(); ++a) {
        int ia = space.dof_of_simplex(subs[a]);
        double pa;
        if (level == 0)
          pa = bs[a] * us + bdv[a].dot(udv);
        else if (level == 1)
          pa = bv[a].dot(uv) + bdv[a].dot(udv);
        else
          pa = bv[a].dot(uv) + bds[a] * uds;
        fvec(ia) += mr.weights(q) * pa;
        for (size_t b = a; b < subs.size(); ++b) {
          int ib = space.dof_of_simplex(subs[b]);
          double kab;
          if (level == 0)
            kab = bs[a] * bs[b] + bdv[a].dot(bdv[b]);
          else if (level == 1)
            kab = bv[a].dot(bv[b]) + bdv[a].dot(bdv[b]);
          else
            kab = bv[a].dot(bv[b]) + bds[a] * bds[b];
          K(ia, ib) += mr.weights(q) * kab;
          if (ia != ib) K(ib, ia) += mr.weights(q) * kab;
        }
      }
    }
  }

  // evaluate residual norms by quadrature of the difference field to avoid
  // the cancellation of the expanded quadratic
  (void)unorm2;
  auto objective = [&](const Eigen::VectorXd& v) {
    DiscreteField vd(space, v);
    DiscreteFieldView vv(vd);
    SumField diff(u, vv, 1.0, -1.0);
    return graph_norm(mesh, diff, rule);
  };

  // unconstrained best approximation
  Eigen::VectorXd vstar = K.ldlt().solve(fvec);
  report.unconstrained = objective(vstar);

  // trace-constrained best approximation
  const auto& blist = boundary_list(mesh, level);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(blist.size(), space.dim());
  Eigen::VectorXd d(blist.size());
  for (size_t i = 0; i < blist.size(); ++i) {
    C(i, space.dof_of_simplex(blist[i])) = 1.0;
    d(i) = g.coeffs(i);
  }
  Eigen::VectorXd vcon = constrained_min_quadratic(K, fvec, C, d);
  report.constrained = objective(vcon);

  // surrogate trace-norm of the data mismatch tr(u) - g
  ExtensionOperator ext(mesh, level, k);
  TraceField tr(mesh, u);
  EnrichedField mismatch =
      (level == 1)
          ? ext.extend_surface(nullptr,
                               [&](int bf, const Vec3& x) {
                                 return Vec3(tr.tangential_at(bf, x) -
                                             trace_eval_tangential(mesh, g, bf, x));
                               })
          : ext.extend_surface(
                [&](int bf, const Vec3& x) {
                  return tr.scalar_at(bf, x) - trace_eval_scalar(mesh, g, bf, x);
                },
                nullptr);
  report.mismatch = ext.energy(mismatch);
  report.ratio = report.constrained /
                 std::max(report.unconstrained + report.mismatch, 1e-300);
  return report;
}

}  // namespace fecp
