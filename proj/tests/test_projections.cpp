#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fecp/catalog.hpp"
#include "fecp/projections.hpp"

using namespace fecp;

namespace {

struct Setup {
  Mesh mesh;
  AlfeldBoundaryMesh alfeld;
  SurfaceComplex sc;
  WorseyFarinMesh wf;
  WeightSet weights;
  DeRhamComplex spaces;
  BoundaryProjector pib;
  CanonicalInteriorProjector interior;
  ComposedProjector pi;
  TestFieldCatalog catalog;
  explicit Setup(int n)
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

DiscreteField basis_field(const FeSpace& space, int simplex) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space.dim());
  c(space.dof_of_simplex(simplex)) = 1.0;
  return DiscreteField(space, std::move(c));
}

// L2(Gamma) norm of the trace difference of two fields
double trace_l2_diff(const Mesh& m, int level, const FieldView& a, const FieldView& b) {
  TraceField ta(m, a), tb(m, b);
  QuadratureRule tri = simplex_rule(2, 4);
  double s = 0.0;
  for (int bf : m.boundary_faces()) {
    const auto& fv = m.face(bf);
    Eigen::MatrixXd verts(3, 3);
    for (int i = 0; i < 3; ++i) verts.col(i) = m.vertex(fv[i]);
    MappedRule mr = map_rule(tri, verts);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      double d2 = 0.0;
      if (level == 0 || level == 2) {
        double da = ta.scalar_at(bf, x) - tb.scalar_at(bf, x);
        d2 = da * da;
      } else {
        d2 = (ta.tangential_at(bf, x) - tb.tangential_at(bf, x)).squaredNorm();
      }
      s += mr.weights(q) * d2;
    }
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("catalog derivatives match finite differences") {
  TestFieldCatalog catalog;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.2, 0.8);
  std::vector<Vec3> pts;
  for (int i = 0; i < 20; ++i) pts.emplace_back(dist(rng), dist(rng), dist(rng));
  for (int level = 0; level <= 3; ++level)
    for (const auto& nf : catalog.fields(level))
      CHECK(max_derivative_fd_error(*nf.field, pts) <= 1e-6);
}

TEST_CASE("alpha duality against whitney basis fields") {
  Setup s(1);
  for (int level = 0; level <= 2; ++level) {
    const FeSpace& space = s.spaces.level(level);
    double max_dev = 0.0;
    for (int i = 0; i < s.weights.count(level); ++i) {
      int r = s.weights.anchor_at(level, i);
      for (int j = 0; j < s.weights.count(level); ++j) {
        int rp = s.weights.anchor_at(level, j);
        DiscreteField w = basis_field(space, rp);
        DiscreteFieldView wv(w);
        double val = s.pib.alpha(level, r, wv);
        max_dev = std::max(max_dev, std::abs(val - (r == rp ? 1.0 : 0.0)));
      }
    }
    CHECK(max_dev <= 2e-11);
  }
}

TEST_CASE("alpha of the constant scalar is one") {
  Setup s(1);
  TestFieldCatalog& cat = s.catalog;
  const FieldView& one = *cat.fields(0)[0].field;
  for (int i = 0; i < s.weights.count(0); ++i)
    CHECK(s.pib.alpha(0, s.weights.anchor_at(0, i), one) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("alpha vanishes on zero-trace bubbles") {
  Setup s(1);
  for (int level = 0; level <= 2; ++level) {
    const FieldView& b = s.catalog.bubble(level);
    double scale = graph_norm(s.mesh, b, simplex_rule(3, 6));
    for (int i = 0; i < s.weights.count(level); ++i)
      CHECK(std::abs(s.pib.alpha(level, s.weights.anchor_at(level, i), b)) <= 1e-9 * scale);
  }
}

TEST_CASE("P0 reproduces boundary whitney forms and kills interior ones") {
  Setup s(1);
  for (int level = 0; level <= 2; ++level) {
    const FeSpace& space = s.spaces.level(level);
    for (int idx = 0; idx < space.dim(); ++idx) {
      int sigma = space.dof_simplex(idx);
      DiscreteField w = basis_field(space, sigma);
      DiscreteFieldView wv(w);
      DiscreteField p = s.pib.apply_P0(level, wv);
      for (int j = 0; j < space.dim(); ++j) {
        double expect = (s.mesh.is_boundary(level, sigma) && j == idx) ? 1.0 : 0.0;
        CHECK(std::abs(p.coeffs()(j) - expect) <= 2e-11);
      }
    }
  }
}

TEST_CASE("boundary projector has no support on interior-cell dofs") {
  Setup s(2);
  MeshPartitions parts = classify(s.mesh);
  for (int level = 0; level <= 2; ++level) {
    const FieldView& u = *s.catalog.fields(level)[3].field;  // trig
    DiscreteField p = s.pib.apply(level, u);
    for (int t = 0; t < s.mesh.n_cells(); ++t) {
      if (parts.in_cells_near_boundary[level][t]) continue;
      std::vector<int> subs;
      if (level == 0)
        subs.assign(s.mesh.cell(t).begin(), s.mesh.cell(t).end());
      else if (level == 1)
        subs.assign(s.mesh.edges_of_cell(t).begin(), s.mesh.edges_of_cell(t).end());
      else
        subs.assign(s.mesh.faces_of_cell(t).begin(), s.mesh.faces_of_cell(t).end());
      for (int sub : subs) CHECK(p.coeff_on_simplex(sub) == 0.0);
    }
  }
}

TEST_CASE("trace commuting of the boundary projector") {
  Setup s(1);
  // transcendental catalog fields need the higher-degree rule for the alphas
  BoundaryProjector pib10(s.weights, s.spaces, 10);
  QuadratureRule tet = simplex_rule(3, 6);
  for (int level = 0; level <= 2; ++level) {
    for (const auto& nf : s.catalog.fields(level)) {
      const FieldView& u = *nf.field;
      double scale =
          graph_norm(s.mesh, u, tet) + graph_norm(s.mesh, DerivativeField(u), tet);
      DiscreteField pu = pib10.apply(level, u);
      DiscreteField dpu = d_apply(s.spaces.level(level + 1), pu);
      DerivativeField du(u);
      DiscreteField pdu = pib10.apply(level + 1, du);
      if (level < 2) {
        DiscreteFieldView a(dpu), b(pdu);
        CHECK(trace_l2_diff(s.mesh, level + 1, a, b) <= 1e-9 * std::max(1.0, scale));
      } else {
        // tr^3 is the domain integral
        double ia = 0.0, ib = 0.0;
        for (int t = 0; t < s.mesh.n_cells(); ++t) {
          ia += dpu.coeff_on_simplex(t) * s.mesh.cell_geometry(t).orientation;
          ib += pdu.coeff_on_simplex(t) * s.mesh.cell_geometry(t).orientation;
        }
        CHECK(std::abs(ia - ib) <= 1e-9 * std::max(1.0, scale));
      }
    }
  }
}

TEST_CASE("trace preservation of the boundary projector on the admissible family") {
  Setup s(1);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int level = 0; level <= 2; ++level) {
    const FeSpace& space = s.spaces.level(level);
    Eigen::VectorXd c(space.dim());
    for (int i = 0; i < c.size(); ++i) c(i) = dist(rng);
    DiscreteField vh(space, c);
    DiscreteFieldView vhv(vh);
    SumField u(vhv, s.catalog.bubble(level));
    DiscreteField pu = s.pib.apply(level, u);
    DiscreteFieldView puv(pu);
    double scale = graph_norm(s.mesh, u, simplex_rule(3, 6));
    CHECK(trace_l2_diff(s.mesh, level, puv, u) <= 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("alpha functionals commute with derivatives through incidence") {
  Setup s(1);
  BoundaryProjector pib10(s.weights, s.spaces, 10);
  const Mesh& m = s.mesh;
  for (int level = 0; level <= 1; ++level) {
    const FieldView& u = *s.catalog.fields(level)[3].field;
    DerivativeField du(u);
    double scale = 0.0;
    std::vector<std::pair<int, double>> lhs;
    for (int i = 0; i < s.weights.count(level + 1); ++i) {
      int rp = s.weights.anchor_at(level + 1, i);
      double a = pib10.alpha(level + 1, rp, du);
      lhs.push_back({rp, a});
      scale = std::max(scale, std::abs(a));
    }
    for (const auto& [rp, a] : lhs) {
      double sum = 0.0;
      std::vector<int> children = m.simplex_vertices(level + 1, rp);
      if (level == 0) {
        for (int v : children) sum += m.incidence(1, rp, v) * pib10.alpha(0, v, u);
      } else {
        for (int e : m.edges_of_face(rp)) sum += m.incidence(2, rp, e) * pib10.alpha(1, e, u);
      }
      CHECK(std::abs(a - sum) <= 1e-9 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("boundary projector equals its lowest-order part") {
  Setup s(1);
  for (int level = 0; level <= 2; ++level) {
    const FieldView& u = *s.catalog.fields(level)[2].field;
    DiscreteField a = s.pib.apply(level, u);
    DiscreteField b = s.pib.apply_P0(level, u);
    CHECK((a.coeffs() - b.coeffs()).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("level-3 canonical projection") {
  Setup s(1);
  const FieldView& one = *s.catalog.fields(3)[0].field;
  DiscreteField p1 = s.pib.apply_level3(one);
  DiscreteFieldView p1v(p1);
  for (int t = 0; t < s.mesh.n_cells(); ++t) {
    Vec3 x = s.mesh.cell_geometry(t).verts.rowwise().mean();
    CHECK(p1v.scalar_value(t, x) == doctest::Approx(1.0).epsilon(1e-12));
  }
  QuadratureRule tet = simplex_rule(3, 6);
  for (const auto& nf : s.catalog.fields(3)) {
    DiscreteField p = s.pib.apply_level3(*nf.field);
    DiscreteFieldView pv(p);
    double iu = 0.0, ip = 0.0;
    for (int t = 0; t < s.mesh.n_cells(); ++t) {
      // cellwise L2 bound
      double nu = l2_norm(s.mesh, *nf.field, {t}, tet);
      double np = l2_norm(s.mesh, pv, {t}, tet);
      CHECK(np <= nu * (1.0 + 1e-11) + 1e-14);
      ip += p.coeff_on_simplex(t) * s.mesh.cell_geometry(t).orientation;
      iu += s.pib.alpha3(t, *nf.field);
    }
    CHECK(ip == doctest::Approx(iu).epsilon(1e-11));
  }
}

TEST_CASE("interior projector contract") {
  Setup s(2);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  QuadratureRule tri = simplex_rule(2, 4);
  for (int level = 0; level <= 3; ++level) {
    // identity on the zero-trace discrete space
    const FeSpace& space = s.spaces.level(level);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(space.dim());
    for (int i = 0; i < space.dim(); ++i)
      if (level == 3 || !s.mesh.is_boundary(level, space.dof_simplex(i))) c(i) = dist(rng);
    DiscreteField u(space, c);
    DiscreteFieldView uv(u);
    DiscreteField p = s.interior.project(level, uv);
    CHECK((p.coeffs() - c).lpNorm<Eigen::Infinity>() <= 1e-11);

    if (level >= 3) continue;
    // output trace vanishes
    DiscreteField pb = s.interior.project(level, *s.catalog.fields(level)[3].field);
    DiscreteFieldView pbv(pb);
    TraceField tr(s.mesh, pbv);
    for (int bf : s.mesh.boundary_faces()) {
      const auto& fv = s.mesh.face(bf);
      Vec3 x = (s.mesh.vertex(fv[0]) + s.mesh.vertex(fv[1]) + s.mesh.vertex(fv[2])) / 3.0;
      double v = (level == 1) ? tr.tangential_at(bf, x).norm() : std::abs(tr.scalar_at(bf, x));
      CHECK(v <= 1e-12);
    }
  }
  // commuting on the zero-trace bubble
  QuadratureRule tet = simplex_rule(3, 6);
  for (int level = 0; level <= 2; ++level) {
    const FieldView& b = s.catalog.bubble(level);
    DiscreteField pb = s.interior.project(level, b);
    DiscreteField dpb = d_apply(s.spaces.level(level + 1), pb);
    DerivativeField db(b);
    DiscreteField pdb = s.interior.project(level + 1, db);
    DiscreteFieldView a(dpb), bb(pdb);
    SumField diff(a, bb, 1.0, -1.0);
    double scale = graph_norm(s.mesh, b, tet);
    CHECK(l2_norm(s.mesh, diff, all_cells(s.mesh), tet) <= 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("composed projector reproduces every basis field") {
  Setup s(1);
  for (int level = 0; level <= 3; ++level) {
    const FeSpace& space = s.spaces.level(level);
    for (int idx = 0; idx < space.dim(); ++idx) {
      DiscreteField w = basis_field(space, space.dof_simplex(idx));
      DiscreteField pw = s.pi.apply(level, w);
      CHECK((pw.coeffs() - w.coeffs()).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
  }
}

TEST_CASE("composed projector: general path matches the readout path") {
  Setup s(1);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int level = 0; level <= 3; ++level) {
    const FeSpace& space = s.spaces.level(level);
    Eigen::VectorXd c(space.dim());
    for (int i = 0; i < c.size(); ++i) c(i) = dist(rng);
    DiscreteField u(space, c);
    DiscreteFieldView uv(u);
    DiscreteField fast = s.pi.apply(level, u);
    DiscreteField slow = s.pi.apply(level, uv);
    CHECK((fast.coeffs() - slow.coeffs()).lpNorm<Eigen::Infinity>() <= 1e-11);
  }
}

TEST_CASE("composed projector: trace preservation and commuting on the admissible family") {
  Setup s(1);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  QuadratureRule tet = simplex_rule(3, 6);
  for (int level = 0; level <= 2; ++level) {
    const FeSpace& space = s.spaces.level(level);
    Eigen::VectorXd c(space.dim());
    for (int i = 0; i < c.size(); ++i) c(i) = dist(rng);
    DiscreteField vh(space, c);
    DiscreteFieldView vhv(vh);
    SumField u(vhv, s.catalog.bubble(level));
    double scale = graph_norm(s.mesh, u, tet);

    DiscreteField pu = s.pi.apply(level, u);
    DiscreteFieldView puv(pu);
    CHECK(trace_l2_diff(s.mesh, level, puv, u) <= 1e-9 * std::max(1.0, scale));

    DiscreteField dpu = d_apply(s.spaces.level(level + 1), pu);
    DerivativeField du(u);
    DiscreteField pdu = s.pi.apply(level + 1, du);
    DiscreteFieldView a(dpu), b(pdu);
    SumField diff(a, b, 1.0, -1.0);
    CHECK(l2_norm(s.mesh, diff, all_cells(s.mesh), tet) <= 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("composed projector on a bubble reduces to the interior projector") {
  Setup s(1);
  for (int level = 0; level <= 2; ++level) {
    const FieldView& b = s.catalog.bubble(level);
    DiscreteField pb = s.pi.apply(level, b);
    DiscreteField ib = s.interior.project(level, b);
    double scale = std::max(1.0, ib.coeffs().lpNorm<Eigen::Infinity>());
    CHECK((pb.coeffs() - ib.coeffs()).lpNorm<Eigen::Infinity>() <= 1e-9 * scale);
  }
}
