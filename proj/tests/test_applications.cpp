#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fecp/applications.hpp"
#include "fecp/catalog.hpp"

using namespace fecp;

namespace {

struct Stack {
  Mesh mesh;
  AlfeldBoundaryMesh alfeld;
  SurfaceComplex sc;
  WorseyFarinMesh wf;
  WeightSet weights;
  DeRhamComplex spaces;
  BoundaryProjector pib;
  CanonicalInteriorProjector interior;
  ComposedProjector pi;
  explicit Stack(int n)
      : mesh(gen_structured_cube(n)),
        alfeld(mesh),
        sc(mesh, alfeld),
        wf(mesh, alfeld),
        weights(mesh, sc, wf),
        spaces(mesh),
        pib(weights, spaces),
        interior(spaces),
        pi(pib, interior) {}
};

DiscreteField random_field(const FeSpace& space, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd c(space.dim());
  for (int i = 0; i < c.size(); ++i) c(i) = dist(rng);
  return DiscreteField(space, std::move(c));
}

}  // namespace

TEST_CASE("enriched space dimensions") {
  Mesh m = gen_structured_cube(1);
  const int V = m.n_vertices(), E = m.n_edges(), F = m.n_faces(), T = m.n_cells();
  // complex index 0 reproduces the Whitney dimensions
  CHECK(EnrichedDeRhamSpace(m, 0, 0).dim() == V);
  CHECK(EnrichedDeRhamSpace(m, 1, 0).dim() == E);
  CHECK(EnrichedDeRhamSpace(m, 2, 0).dim() == F);
  CHECK(EnrichedDeRhamSpace(m, 3, 0).dim() == T);
  // index 2: P3 / second-kind-degree Nedelec / Raviart-Thomas counts
  CHECK(EnrichedDeRhamSpace(m, 0, 2).dim() == V + 2 * E + F);
  CHECK(EnrichedDeRhamSpace(m, 1, 2).dim() == 3 * E + 6 * F + 3 * T);
  CHECK(EnrichedDeRhamSpace(m, 2, 2).dim() == 6 * F + 12 * T);
  CHECK(EnrichedDeRhamSpace(m, 3, 2).dim() == 10 * T);
}

TEST_CASE("enriched bases are linearly independent") {
  Mesh m = gen_structured_cube(1);
  for (int level = 0; level <= 3; ++level) {
    EnrichedDeRhamSpace es(m, level, 2);
    Eigen::MatrixXd M = enriched_mass(es, 6);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
    CHECK(svd.singularValues().tail(1)(0) > 0.0);
    CHECK(cond < 1e12);
  }
}

TEST_CASE("index-0 enriched space coincides with the whitney space") {
  Mesh m = gen_structured_cube(1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int level = 0; level <= 3; ++level) {
    EnrichedDeRhamSpace es(m, level, 0);
    FeSpace ws(m, level);
    REQUIRE(es.dim() == ws.dim());
    // attach enumeration order matches the dof order
    Eigen::VectorXd c(es.dim());
    for (int i = 0; i < c.size(); ++i) c(i) = dist(rng);
    Eigen::VectorXd cw = Eigen::VectorXd::Zero(ws.dim());
    for (int j = 0; j < es.dim(); ++j) cw(ws.dof_of_simplex(es.basis(j).attach_id)) = c(j);
    EnrichedField ef(es, c);
    DiscreteField df(ws, cw);
    DiscreteFieldView dfv(df);
    for (int t = 0; t < m.n_cells(); ++t) {
      Vec3 x = m.cell_geometry(t).verts.rowwise().mean();
      if (level == 0 || level == 3)
        CHECK(ef.scalar_value(t, x) == doctest::Approx(dfv.scalar_value(t, x)).epsilon(1e-12));
      else
        CHECK((ef.vector_value(t, x) - dfv.vector_value(t, x)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("enriched fields are conforming across interior faces") {
  Mesh m = gen_structured_cube(1);
  QuadratureRule tri = simplex_rule(2, 3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int level = 0; level <= 2; ++level) {
    EnrichedDeRhamSpace es(m, level, 2);
    Eigen::VectorXd c(es.dim());
    for (int i = 0; i < c.size(); ++i) c(i) = dist(rng);
    EnrichedField u(es, c);
    for (int f = 0; f < m.n_faces(); ++f) {
      if (m.is_boundary(2, f)) continue;
      int t0 = m.cells_of_face(f)[0], t1 = m.cells_of_face(f)[1];
      Vec3 n = m.face_geometry(f).normal;
      const auto& fv = m.face(f);
      Eigen::MatrixXd verts(3, 3);
      for (int i = 0; i < 3; ++i) verts.col(i) = m.vertex(fv[i]);
      MappedRule mr = map_rule(tri, verts);
      for (int q = 0; q < mr.weights.size(); ++q) {
        Vec3 x = mr.points.col(q);
        if (level == 0) {
          CHECK(u.scalar_value(t0, x) == doctest::Approx(u.scalar_value(t1, x)).epsilon(1e-11));
        } else if (level == 1) {
          Vec3 a = u.vector_value(t0, x), b = u.vector_value(t1, x);
          Vec3 ja = a - a.dot(n) * n, jb = b - b.dot(n) * n;
          CHECK((ja - jb).norm() <= 1e-11 * std::max(1.0, a.norm()));
        } else {
          CHECK(std::abs((u.vector_value(t0, x) - u.vector_value(t1, x)).dot(n)) <=
                1e-11 * std::max(1.0, u.vector_value(t0, x).norm()));
        }
      }
    }
  }
}

TEST_CASE("whitney fields belong to the enriched spaces") {
  Mesh m = gen_structured_cube(1);
  QuadratureRule tet = simplex_rule(3, 6);
  for (int level = 0; level <= 2; ++level) {
    EnrichedDeRhamSpace es(m, level, 2);
    FeSpace ws(m, level);
    Eigen::MatrixXd M = enriched_mass(es, 6);
    DiscreteField w = random_field(ws, 11 + level);
    DiscreteFieldView wv(w);
    // L2 projection onto the enriched space reproduces the field
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(es.dim());
    QuadratureRule rule = simplex_rule(3, 6);
    for (int t = 0; t < m.n_cells(); ++t) {
      const CellGeometry& g = m.cell_geometry(t);
      Eigen::MatrixXd tetv(3, 4);
      for (int i = 0; i < 4; ++i) tetv.col(i) = g.verts.col(i);
      MappedRule mr = map_rule(rule, tetv);
      for (int q = 0; q < mr.weights.size(); ++q) {
        Vec3 x = mr.points.col(q);
        for (int j : es.cell_basis(t)) {
          double val = (level == 0)
                           ? es.scalar_basis(j, t, x) * wv.scalar_value(t, x)
                           : es.vector_basis(j, t, x).dot(wv.vector_value(t, x));
          rhs(j) += mr.weights(q) * val;
        }
      }
    }
    Eigen::VectorXd c = M.ldlt().solve(rhs);
    EnrichedField proj(es, c);
    SumField diff(proj, wv, 1.0, -1.0);
    CHECK(l2_norm(m, diff, all_cells(m), tet) <= 1e-10);
  }
}

TEST_CASE("minimal extension honors the trace and decreases with enrichment") {
  Stack s(1);
  const Mesh& m = s.mesh;
  for (int level = 0; level <= 2; ++level) {
    ExtensionOperator ext2(m, level, 2);

    // zero data extends to zero
    TraceData zero;
    zero.level = level;
    int nb = (level == 0)   ? static_cast<int>(m.boundary_vertices().size())
             : (level == 1) ? static_cast<int>(m.boundary_edges().size())
                            : static_cast<int>(m.boundary_faces().size());
    zero.coeffs = Eigen::VectorXd::Zero(nb);
    EnrichedField e0 = ext2.extend(zero);
    CHECK(ext2.energy(e0) <= 1e-12);

    // data from a random discrete field: feasibility gives an energy bound
    DiscreteField vh = random_field(s.spaces.level(level), 21 + level);
    TraceData g = trace_of_discrete(vh);
    EnrichedField e = ext2.extend(g);
    DiscreteFieldView vhv(vh);
    QuadratureRule tet = simplex_rule(3, 6);
    CHECK(ext2.energy(e) <= graph_norm(m, vhv, tet) * (1.0 + 1e-10));

    // trace matching at surface quadrature points
    TraceField tre(m, e);
    QuadratureRule tri = simplex_rule(2, 4);
    double scale = std::max(1.0, ext2.energy(e));
    for (int bf : m.boundary_faces()) {
      const auto& fv = m.face(bf);
      Eigen::MatrixXd verts(3, 3);
      for (int i = 0; i < 3; ++i) verts.col(i) = m.vertex(fv[i]);
      MappedRule mr = map_rule(tri, verts);
      for (int q = 0; q < mr.weights.size(); ++q) {
        Vec3 x = mr.points.col(q);
        double err;
        if (level == 1)
          err = (tre.tangential_at(bf, x) - trace_eval_tangential(m, g, bf, x)).norm();
        else
          err = std::abs(tre.scalar_at(bf, x) - trace_eval_scalar(m, g, bf, x));
        CHECK(err <= 1e-9 * scale);
      }
    }

    // nesting: richer space gives an extension of no larger energy
    ExtensionOperator ext3(m, level, 3);
    EnrichedField e3 = ext3.extend(g);
    CHECK(ext3.energy(e3) <= ext2.energy(e) * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("discrete lifting preserves the trace dofs") {
  Stack s(1);
  for (int level = 0; level <= 2; ++level) {
    ExtensionOperator ext(s.mesh, level, 2);
    DiscreteField vh = random_field(s.spaces.level(level), 31 + level);
    TraceData g = trace_of_discrete(vh);
    DiscreteField L = lift(s.pi, ext, g);
    TraceData gl = trace_of_discrete(L);
    double scale = std::max(1.0, g.coeffs.lpNorm<Eigen::Infinity>());
    CHECK((gl.coeffs - g.coeffs).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);

    // zero data lifts to zero
    TraceData zero = g;
    zero.coeffs.setZero();
    DiscreteField L0 = lift(s.pi, ext, zero);
    CHECK(L0.coeffs().lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("discrete and enriched minimal extensions are ordered") {
  Stack s(1);
  for (int level = 0; level <= 2; ++level) {
    DiscreteField vh = random_field(s.spaces.level(level), 41 + level);
    TraceData g = trace_of_discrete(vh);
    DiscreteField f = d_apply(s.spaces.level(level + 1), vh);
    MinMinReport rep = min_min_compare(s.spaces, level, g, f, 2);
    QuadratureRule tet = simplex_rule(3, 4);
    DiscreteFieldView vhv(vh);
    double vnorm = l2_norm(s.mesh, vhv, all_cells(s.mesh), tet);
    CHECK(rep.discrete_min <= vnorm * (1.0 + 1e-10));
    CHECK(rep.proxy_min <= rep.discrete_min * (1.0 + 1e-10) + 1e-10);
    CHECK(rep.ratio >= 1.0 - 1e-9);

    // zero data
    TraceData zg = g;
    zg.coeffs.setZero();
    DiscreteField zf(s.spaces.level(level + 1));
    MinMinReport zrep = min_min_compare(s.spaces, level, zg, zf, 2);
    CHECK(zrep.discrete_min <= 1e-11);
    CHECK(zrep.proxy_min <= 1e-11);
  }
}

TEST_CASE("best approximation split") {
  Stack s(1);
  TestFieldCatalog catalog;
  for (int level = 0; level <= 2; ++level) {
    // discrete u with matching trace: constrained best approximation is zero
    DiscreteField vh = random_field(s.spaces.level(level), 51 + level);
    DiscreteFieldView vhv(vh);
    TraceData g = trace_of_discrete(vh);
    BestApproxReport r0 = best_approx_demo(s.spaces, level, vhv, g, 2, 6);
    QuadratureRule tet = simplex_rule(3, 4);
    double scale = graph_norm(s.mesh, vhv, tet);
    CHECK(r0.constrained <= 1e-9 * std::max(1.0, scale));
    CHECK(r0.mismatch <= 1e-8 * std::max(1.0, scale));

    // smooth u: the constrained error always dominates the unconstrained one
    const FieldView& u = *catalog.fields(level)[3].field;
    DiscreteField uh = interpolate_canonical(s.spaces.level(level), u, 10);
    TraceData gh = trace_of_discrete(uh);
    BestApproxReport r = best_approx_demo(s.spaces, level, u, gh, 2, 10);
    CHECK(r.constrained >= r.unconstrained - 1e-11 * std::max(1.0, r.unconstrained));
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
  }
}
