#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fecp/surface.hpp"

using namespace fecp;

namespace {

struct Setup {
  Mesh mesh;
  AlfeldBoundaryMesh alfeld;
  SurfaceComplex sc;
  explicit Setup(int n) : mesh(gen_structured_cube(n)), alfeld(mesh), sc(mesh, alfeld) {}
};

// quadrature points on a parent boundary face
MappedRule face_rule(const Mesh& m, int mesh_face, int degree) {
  const auto& fv = m.face(mesh_face);
  Eigen::MatrixXd verts(3, 3);
  for (int i = 0; i < 3; ++i) verts.col(i) = m.vertex(fv[i]);
  return map_rule(simplex_rule(2, degree), verts);
}

MappedRule sub_face_rule(const AlfeldBoundaryMesh& a, int sf, int degree) {
  const auto& t = a.sub_face(sf);
  Eigen::MatrixXd verts(3, 3);
  for (int i = 0; i < 3; ++i) verts.col(i) = a.split_vertex(t[i]);
  return map_rule(simplex_rule(2, degree), verts);
}

}  // namespace

TEST_CASE("surface stokes identities at quadrature points") {
  Setup s(2);
  const Mesh& m = s.mesh;
  // sgrad of a boundary hat equals the incidence combination of edge forms
  for (int v : m.boundary_vertices()) {
    for (int f : m.boundary_star_faces(0, v)) {
      int b = s.alfeld.boundary_position(f);
      MappedRule mr = face_rule(m, f, 2);
      // in-plane gradient of the hat on this face
      const auto& fv = m.face(f);
      int pos = -1;
      for (int i = 0; i < 3; ++i)
        if (fv[i] == v) pos = i;
      Vec3 sg = s.sc.parent_grads(b).row(pos);
      for (int q = 0; q < mr.weights.size(); ++q) {
        Vec3 x = mr.points.col(q);
        Vec3 sum = Vec3::Zero();
        for (int e : m.edges_of_vertex(v))
          if (m.is_boundary(1, e)) sum += m.incidence(1, e, v) * s.sc.edge_whitney(b, e, x);
        CHECK((sg - sum).norm() <= 1e-10);
      }
    }
  }
  // scurl of a boundary edge form equals the incidence combination of face constants
  for (int e : m.boundary_edges()) {
    for (int f : m.faces_of_edge(e)) {
      if (!m.is_boundary(2, f)) continue;
      int b = s.alfeld.boundary_position(f);
      // scurl(W_e)|_f = 2 n . (ga x gb) with the face's in-plane hat gradients
      const auto& fv = m.face(f);
      const auto& ev = m.edge(e);
      int pa = -1, pb = -1;
      for (int i = 0; i < 3; ++i) {
        if (fv[i] == ev[0]) pa = i;
        if (fv[i] == ev[1]) pb = i;
      }
      Vec3 ga = s.sc.parent_grads(b).row(pa), gb = s.sc.parent_grads(b).row(pb);
      double scurl = 2.0 * s.sc.normal(b).dot(ga.cross(gb));
      double expect = m.incidence(2, f, e) * s.sc.face_const(b);
      CHECK(scurl == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("patch construction and dimensions") {
  Setup s(2);
  const Mesh& m = s.mesh;
  int bf = m.boundary_faces()[0];
  SurfacePatch p = build_patch(s.sc, 2, bf);
  CHECK(p.verts().size() > 3);
  CHECK(p.faces().size() > 1);
  CHECK(p.sub_faces().size() == 3 * p.faces().size());
  // dim V^0(Fesb) equals the number of patch vertices by construction
  CHECK(p.sgrad_parent().cols() == static_cast<int>(p.verts().size()));
  CHECK(p.area() == doctest::Approx([&] {
          double a = 0.0;
          for (int b : p.faces()) a += s.sc.parent_area(b);
          return a;
        }()).epsilon(1e-14));

  // interior anchor fails
  int interior_vertex = -1;
  for (int v = 0; v < m.n_vertices(); ++v)
    if (!m.is_boundary(0, v)) interior_vertex = v;
  REQUIRE(interior_vertex >= 0);
  CHECK_THROWS_AS(build_patch(s.sc, 0, interior_vertex), Error);
}

TEST_CASE("bubble weight values") {
  Setup s(2);
  SurfacePatch p = build_patch(s.sc, 0, s.mesh.boundary_vertices()[0]);
  for (int sf : p.sub_faces()) {
    const auto& t = s.alfeld.sub_face(sf);
    // zero at parent vertices, one at the barycenter
    CHECK(s.sc.mu_value(sf, s.alfeld.split_vertex(t[0])) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(s.sc.mu_value(sf, s.alfeld.split_vertex(t[1])) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(s.sc.mu_value(sf, s.alfeld.split_vertex(t[2])) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("operator matrices: compositions vanish and constants are annihilated") {
  Setup s(2);
  for (int anchor : {s.mesh.boundary_vertices()[0], s.mesh.boundary_vertices()[3]}) {
    SurfacePatch p = build_patch(s.sc, 0, anchor);
    // sgrad of the constant function
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(p.verts().size());
    CHECK((p.sgrad_parent() * ones).lpNorm<Eigen::Infinity>() == 0.0);
    // scurl o sgrad = 0 and sdiv o srot = 0 as matrix products
    CHECK((p.scurl_parent() * p.sgrad_parent()).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((p.sdiv_split() * p.srot_split()).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("operator matrices agree with pointwise surface derivatives") {
  Setup s(2);
  SurfacePatch p = build_patch(s.sc, 1, s.mesh.boundary_edges()[5]);
  // srot of a split P1 function:evaluate sgrad pointwise and rotate
  Eigen::VectorXd g(p.split_verts().size());
  for (size_t i = 0; i < p.split_verts().size(); ++i) g(i) = std::sin(1.0 + i);
  Eigen::VectorXd c = p.srot_split() * g;
  for (int sf : p.sub_faces()) {
    MappedRule mr = sub_face_rule(s.alfeld, sf, 2);
    const auto& t = s.alfeld.sub_face(sf);
    Vec3 sgrad = Vec3::Zero();
    for (int i = 0; i < 3; ++i)
      sgrad += g(p.local_split_vert(t[i])) * s.alfeld.sub_grads(sf).row(i).transpose();
    Vec3 srot = sgrad.cross(s.alfeld.outward_normal(sf));
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      Vec3 field = Vec3::Zero();
      for (int se : s.alfeld.edges_of_sub_face(sf))
        field += c(p.local_split_edge(se)) * s.sc.split_edge_whitney_rotated(sf, se, x);
      CHECK((field - srot).norm() <= 1e-10);
    }
  }
}

TEST_CASE("divergence theorem on the constrained split space") {
  Setup s(2);
  SurfacePatch p = build_patch(s.sc, 1, s.mesh.boundary_edges()[2]);
  // any member of the zero-flux space has zero total divergence; check with
  // an edge-quadrature flux oracle as well
  Eigen::VectorXd c = Eigen::VectorXd::Zero(p.split_edges().size());
  int k = 0;
  for (int se : p.interior_split_edges()) c(p.local_split_edge(se)) = std::cos(1.0 + k++);
  Eigen::VectorXd div = p.sdiv_split() * c;
  double total = 0.0;
  for (size_t i = 0; i < p.sub_faces().size(); ++i) total += div(i) * p.sub_areas()(i);
  CHECK(std::abs(total) <= 1e-12 * c.lpNorm<Eigen::Infinity>());

  // rim flux oracle: integrate w . conormal along rim edges
  SplitRotatedField w;
  w.coeffs.setZero(s.alfeld.n_sub_edges());
  for (int se : p.interior_split_edges()) w.coeffs(se) = c(p.local_split_edge(se));
  double flux = 0.0;
  Eigen::VectorXd tq, wq;
  gauss_legendre_01(4, tq, wq);
  for (size_t i = 0; i < p.split_edges().size(); ++i) {
    if (p.split_edge_interior(static_cast<int>(i))) continue;
    int se = p.split_edges()[i];
    // the rim edge's single patch sub-face
    int sf = -1;
    for (int cand : s.alfeld.sub_faces_of_edge(se))
      if (p.local_sub_face(cand) >= 0) sf = cand;
    REQUIRE(sf >= 0);
    const auto& ev = s.alfeld.sub_edge(se);
    Vec3 a = s.alfeld.split_vertex(ev[0]), b = s.alfeld.split_vertex(ev[1]);
    Vec3 n = s.alfeld.outward_normal(sf);
    Vec3 conormal = (b - a).cross(n).normalized();
    // orient outward: away from the sub-face centroid
    Vec3 mid = (a + b) / 2.0;
    if (conormal.dot(mid - s.sc.split_centroid(sf)) < 0.0) conormal = -conormal;
    for (int q = 0; q < tq.size(); ++q) {
      Vec3 x = a + tq(q) * (b - a);
      flux += wq(q) * (b - a).norm() * w.value(s.sc, sf, x).dot(conormal);
    }
  }
  CHECK(std::abs(flux) <= 1e-12 * std::max(1.0, c.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("adjoint identities with vanishing boundary terms") {
  Setup s(2);
  SurfacePatch p = build_patch(s.sc, 1, s.mesh.boundary_edges()[7]);
  // (sdiv v, w) = -(v, sgrad w) for v in the zero-flux split space, w split P1
  Eigen::VectorXd vc = Eigen::VectorXd::Zero(p.split_edges().size());
  int k = 0;
  for (int se : p.interior_split_edges()) vc(p.local_split_edge(se)) = std::sin(2.0 + 3.0 * k++);
  Eigen::VectorXd wc(p.split_verts().size());
  for (size_t i = 0; i < p.split_verts().size(); ++i) wc(i) = std::cos(0.5 + 2.0 * i);

  Eigen::VectorXd div = p.sdiv_split() * vc;
  double lhs = 0.0, rhs = 0.0;
  for (size_t i = 0; i < p.sub_faces().size(); ++i) {
    int sf = p.sub_faces()[i];
    MappedRule mr = sub_face_rule(s.alfeld, sf, 3);
    const auto& t = s.alfeld.sub_face(sf);
    Vec3 sgrad_w = Vec3::Zero();
    for (int j = 0; j < 3; ++j)
      sgrad_w += wc(p.local_split_vert(t[j])) * s.alfeld.sub_grads(sf).row(j).transpose();
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      double wval = 0.0;
      for (int j = 0; j < 3; ++j)
        wval += wc(p.local_split_vert(t[j])) * s.sc.split_hat(sf, t[j], x);
      Vec3 vval = Vec3::Zero();
      for (int se : s.alfeld.edges_of_sub_face(sf))
        vval += vc(p.local_split_edge(se)) * s.sc.split_edge_whitney_rotated(sf, se, x);
      lhs += mr.weights(q) * div(i) * wval;
      rhs -= mr.weights(q) * vval.dot(sgrad_w);
    }
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // (scurl v, w) = (v, srot w) for v parent Whitney, w split P1 vanishing on the rim
  Eigen::VectorXd pc(p.edges().size());
  for (size_t i = 0; i < p.edges().size(); ++i) pc(i) = std::sin(0.2 + 1.7 * i);
  Eigen::VectorXd wz = Eigen::VectorXd::Zero(p.split_verts().size());
  for (int sv : p.interior_split_verts()) wz(p.local_split_vert(sv)) = std::cos(3.0 + sv);
  Eigen::VectorXd curl = p.scurl_parent() * pc;  // per parent face values
  Eigen::VectorXd rot = p.srot_split() * wz;     // rotated coefficients
  double lhs2 = 0.0, rhs2 = 0.0;
  for (size_t i = 0; i < p.sub_faces().size(); ++i) {
    int sf = p.sub_faces()[i];
    int b = s.alfeld.parent_of_sub_face(sf);
    int lb = p.local_face(b);
    MappedRule mr = sub_face_rule(s.alfeld, sf, 3);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      double wval = 0.0;
      for (int sv : s.alfeld.sub_face(sf))
        if (p.local_split_vert(sv) >= 0)
          wval += wz(p.local_split_vert(sv)) * s.sc.split_hat(sf, sv, x);
      Vec3 vval = Vec3::Zero();
      for (int e : p.edges()) {
        double c = pc(p.local_edge(e));
        if (c != 0.0) vval += c * s.sc.edge_whitney(b, e, x);
      }
      Vec3 rval = Vec3::Zero();
      for (int se : s.alfeld.edges_of_sub_face(sf))
        rval += rot(p.local_split_edge(se)) * s.sc.split_edge_whitney_rotated(sf, se, x);
      lhs2 += mr.weights(q) * curl(lb) * wval;
      rhs2 += mr.weights(q) * vval.dot(rval);
    }
  }
  CHECK(lhs2 == doctest::Approx(rhs2).epsilon(1e-10));
}

TEST_CASE("kernels and complements") {
  Setup s(2);
  SurfacePatch p = build_patch(s.sc, 0, s.mesh.boundary_vertices()[0]);
  KernelSplit kg = kernel_complement(p, OperatorTag::Sgrad);
  CHECK(kg.kernel.cols() == 1);  // constants on a connected patch
  CHECK(kg.kernel.cols() + kg.complement.cols() == static_cast<int>(p.verts().size()));
  // kernel is the constant vector
  Eigen::VectorXd k0 = kg.kernel.col(0);
  CHECK((k0.array() - k0(0)).abs().maxCoeff() <= 1e-9 * std::abs(k0(0)));

  KernelSplit kr = kernel_complement(p, OperatorTag::Srot);
  CHECK(kr.kernel.cols() == 0);  // zero boundary values kill the constants
  CHECK(kr.complement.cols() == static_cast<int>(p.interior_split_verts().size()));

  KernelSplit kc = kernel_complement(p, OperatorTag::Scurl);
  CHECK(kc.kernel.cols() + kc.complement.cols() == static_cast<int>(p.edges().size()));
  // local exactness on a disc patch: ker(scurl) = sgrad(V0), dim = nV - 1
  CHECK(kc.kernel.cols() == static_cast<int>(p.verts().size()) - 1);
}

TEST_CASE("weighted patch solve") {
  Setup s(2);
  int v = s.mesh.boundary_vertices()[4];
  SurfacePatch p = build_patch(s.sc, 0, v);

  // zero rhs gives the zero solution
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.verts().size());
  CHECK(weighted_patch_solve(p, 0, zero).lpNorm<Eigen::Infinity>() <= 1e-14);

  // the level-0 weight problem: rhs = phi_v - (eta, .)
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p.verts().size());
  rhs(p.local_vert(v)) += 1.0;
  for (size_t i = 0; i < p.faces().size(); ++i) {
    int f = s.mesh.boundary_faces()[p.faces()[i]];
    for (int u : s.mesh.face(f))
      rhs(p.local_vert(u)) -= s.sc.parent_area(p.faces()[i]) / 3.0 / p.area();
  }
  Eigen::VectorXd psi = weighted_patch_solve(p, 0, rhs);
  // the solve extends from the complement to the whole space: K psi = rhs
  const Mesh& m = s.mesh;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(p.verts().size(), p.verts().size());
  for (size_t i = 0; i < p.faces().size(); ++i) {
    int b = p.faces()[i];
    const auto& fv = m.face(m.boundary_faces()[b]);
    const auto& G = s.sc.parent_grads(b);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        K(p.local_vert(fv[r]), p.local_vert(fv[c])) += p.mu_integrals()(i) * G.row(r).dot(G.row(c));
  }
  CHECK((K * psi - rhs).lpNorm<Eigen::Infinity>() <= 1e-10);

  // reduced matrix is SPD (dense eigensolve oracle)
  KernelSplit ks = kernel_complement(p, OperatorTag::Sgrad);
  Eigen::MatrixXd A = ks.complement.transpose() * K * ks.complement;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("minimum norm preimage") {
  Setup s(2);
  int e = s.mesh.boundary_edges()[0];
  SurfacePatch p = build_patch(s.sc, 1, e);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.sub_faces().size());
  CHECK(min_norm_preimage(p, OperatorTag::Sdiv, zero).lpNorm<Eigen::Infinity>() <= 1e-14);

  // a feasible target: divergence of a zero-flux field
  Eigen::VectorXd c = Eigen::VectorXd::Zero(p.split_edges().size());
  int k = 0;
  for (int se : p.interior_split_edges()) c(p.local_split_edge(se)) = std::sin(1.0 + 2.0 * k++);
  Eigen::VectorXd target = p.sdiv_split() * c;
  Eigen::VectorXd x = min_norm_preimage(p, OperatorTag::Sdiv, target);
  CHECK((p.sdiv_split() * x - target).lpNorm<Eigen::Infinity>() <=
        1e-10 * target.lpNorm<Eigen::Infinity>());
  // minimality: |x|_M <= |c|_M
  double xn = x.dot(p.mass_s1() * x), cn = c.dot(p.mass_s1() * c);
  CHECK(xn <= cn * (1.0 + 1e-12));

  // infeasible target: nonzero mean
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(p.sub_faces().size());
  CHECK_THROWS_AS(min_norm_preimage(p, OperatorTag::Sdiv, bad), Error);
}

TEST_CASE("poincare constants are finite and stable under refinement") {
  std::map<std::tuple<int, int, int>, std::array<double, 3>> by_type;  // signature -> per n
  for (int n : {1, 2, 3}) {
    Setup s(n);
    const Mesh& m = s.mesh;
    for (int v : m.boundary_vertices()) {
      SurfacePatch p = build_patch(s.sc, 0, v);
      for (auto variant : {PoincareVariant::Onto0, PoincareVariant::Onto1,
                           PoincareVariant::Onto0m, PoincareVariant::Onto1m}) {
        PoincareEstimate est = poincare_constant(p, variant);
        CHECK(std::isfinite(est.constant));
        CHECK(est.constant > 0.0);
        auto key = std::make_tuple(static_cast<int>(variant),
                                   static_cast<int>(p.faces().size()),
                                   static_cast<int>(p.verts().size()));
        auto& slot = by_type[key];
        slot[n - 1] = std::max(slot[n - 1], est.constant);
      }
    }
  }
  for (const auto& [key, vals] : by_type) {
    for (int i = 0; i + 1 < 3; ++i) {
      if (vals[i] <= 0.0 || vals[i + 1] <= 0.0) continue;  // type absent at this n
      CHECK(vals[i + 1] / vals[i] <= 1.25);
      CHECK(vals[i] / vals[i + 1] <= 1.25);
    }
  }
}
