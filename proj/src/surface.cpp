#include "fecp/surface.hpp"

#include <algorithm>
#include <cmath>

namespace fecp {

namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

Eigen::MatrixXd nullspace_of(const Eigen::MatrixXd& A) {
  if (A.rows() == 0 || A.cols() == 0)
    return Eigen::MatrixXd::Identity(A.cols(), A.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kRankTol * std::max(smax, 1e-300)) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

}  // namespace

SurfaceComplex::SurfaceComplex(const Mesh& mesh, const AlfeldBoundaryMesh& alfeld)
    : m_mesh(&mesh), m_alfeld(&alfeld) {
  const int nb = alfeld.n_parent_faces();
  m_normal.resize(nb);
  m_centroid.resize(nb);
  m_sign.resize(nb);
  m_area.resize(nb);
  m_grads.resize(nb);
  for (int b = 0; b < nb; ++b) {
    int f = mesh.boundary_faces()[b];
    m_normal[b] = mesh.outward_normal(f);
    m_sign[b] = mesh.boundary_sign(f);
    m_area[b] = mesh.area(f);
    const auto& fv = mesh.face(f);
    Vec3 p0 = mesh.vertex(fv[0]), p1 = mesh.vertex(fv[1]), p2 = mesh.vertex(fv[2]);
    m_centroid[b] = (p0 + p1 + p2) / 3.0;
    Eigen::Matrix<double, 3, 2> E;
    E.col(0) = p1 - p0;
    E.col(1) = p2 - p0;
    Eigen::Matrix<double, 3, 2> Einv = E * (E.transpose() * E).inverse();
    m_grads[b].row(1) = Einv.col(0).transpose();
    m_grads[b].row(2) = Einv.col(1).transpose();
    m_grads[b].row(0) = -(m_grads[b].row(1) + m_grads[b].row(2));
  }
}

double SurfaceComplex::hat(int b, int vertex, const Vec3& x) const {
  int f = m_mesh->boundary_faces()[b];
  const auto& fv = m_mesh->face(f);
  for (int i = 0; i < 3; ++i)
    if (fv[i] == vertex) return 1.0 / 3.0 + m_grads[b].row(i).dot(x - m_centroid[b]);
  return 0.0;
}

Vec3 SurfaceComplex::edge_whitney(int b, int edge, const Vec3& x) const {
  int f = m_mesh->boundary_faces()[b];
  const auto& fv = m_mesh->face(f);
  const auto& ev = m_mesh->edge(edge);
  int pa = -1, pb = -1;
  for (int i = 0; i < 3; ++i) {
    if (fv[i] == ev[0]) pa = i;
    if (fv[i] == ev[1]) pb = i;
  }
  if (pa < 0 || pb < 0) return Vec3::Zero();
  double la = 1.0 / 3.0 + m_grads[b].row(pa).dot(x - m_centroid[b]);
  double lb = 1.0 / 3.0 + m_grads[b].row(pb).dot(x - m_centroid[b]);
  return la * m_grads[b].row(pb).transpose() - lb * m_grads[b].row(pa).transpose();
}

Vec3 SurfaceComplex::split_centroid(int sf) const {
  const auto& t = m_alfeld->sub_face(sf);
  return (m_alfeld->split_vertex(t[0]) + m_alfeld->split_vertex(t[1]) +
          m_alfeld->split_vertex(t[2])) /
         3.0;
}

double SurfaceComplex::split_hat(int sf, int split_vertex, const Vec3& x) const {
  const auto& t = m_alfeld->sub_face(sf);
  for (int i = 0; i < 3; ++i)
    if (t[i] == split_vertex)
      return 1.0 / 3.0 + m_alfeld->sub_grads(sf).row(i).dot(x - split_centroid(sf));
  return 0.0;
}

Vec3 SurfaceComplex::split_edge_whitney(int sf, int split_edge, const Vec3& x) const {
  const auto& t = m_alfeld->sub_face(sf);
  const auto& ev = m_alfeld->sub_edge(split_edge);
  int pa = -1, pb = -1;
  for (int i = 0; i < 3; ++i) {
    if (t[i] == ev[0]) pa = i;
    if (t[i] == ev[1]) pb = i;
  }
  if (pa < 0 || pb < 0) return Vec3::Zero();
  Vec3 c = split_centroid(sf);
  double la = 1.0 / 3.0 + m_alfeld->sub_grads(sf).row(pa).dot(x - c);
  double lb = 1.0 / 3.0 + m_alfeld->sub_grads(sf).row(pb).dot(x - c);
  return la * m_alfeld->sub_grads(sf).row(pb).transpose() -
         lb * m_alfeld->sub_grads(sf).row(pa).transpose();
}

Vec3 SurfaceComplex::split_edge_whitney_rotated(int sf, int split_edge, const Vec3& x) const {
  return m_alfeld->outward_normal(sf).cross(split_edge_whitney(sf, split_edge, x));
}

double SurfaceComplex::mu_value(int sf, const Vec3& x) const {
  // the barycenter occupies the last tuple position (largest id)
  return 1.0 / 3.0 + m_alfeld->sub_grads(sf).row(2).dot(x - split_centroid(sf));
}

Vec3 SurfaceComplex::mu_grad(int sf) const { return m_alfeld->sub_grads(sf).row(2).transpose(); }

double SurfaceComplex::rotated_edge_dof(int split_edge,
                                        const std::function<Vec3(int, const Vec3&)>& w,
                                        int quad_points) const {
  int sf = m_alfeld->sub_faces_of_edge(split_edge).front();
  const auto& ev = m_alfeld->sub_edge(split_edge);
  Vec3 a = m_alfeld->split_vertex(ev[0]);
  Vec3 b = m_alfeld->split_vertex(ev[1]);
  Vec3 n = m_alfeld->outward_normal(sf);
  Eigen::VectorXd t, wq;
  gauss_legendre_01(quad_points, t, wq);
  double s = 0.0;
  for (int q = 0; q < t.size(); ++q) {
    Vec3 x = a + t(q) * (b - a);
    s += wq(q) * (w(sf, x).cross(n)).dot(b - a);
  }
  return s;
}

Vec3 SplitRotatedField::value(const SurfaceComplex& sc, int sf, const Vec3& x) const {
  Vec3 out = Vec3::Zero();
  for (int se : sc.alfeld().edges_of_sub_face(sf)) {
    double c = coeffs(se);
    if (c != 0.0) out += c * sc.split_edge_whitney_rotated(sf, se, x);
  }
  return out;
}

double SplitP1Field::value(const SurfaceComplex& sc, int sf, const Vec3& x) const {
  double out = 0.0;
  for (int sv : sc.alfeld().sub_face(sf)) {
    double c = values(sv);
    if (c != 0.0) out += c * sc.split_hat(sf, sv, x);
  }
  return out;
}

SplitRotatedField srot_global(const SurfaceComplex& sc, const SplitP1Field& g) {
  // srot = sgrad x n, so the rotated-basis coefficients carry a sign flip
  // against the plain incidence map
  SplitRotatedField out;
  out.coeffs.resize(sc.alfeld().n_sub_edges());
  for (int se = 0; se < sc.alfeld().n_sub_edges(); ++se) {
    const auto& ev = sc.alfeld().sub_edge(se);
    out.coeffs(se) = g.values(ev[0]) - g.values(ev[1]);
  }
  return out;
}

SplitConstField sdiv_global(const SurfaceComplex& sc, const SplitRotatedField& w) {
  SplitConstField out;
  out.values.setZero(sc.n_sub_faces());
  for (int sf = 0; sf < sc.n_sub_faces(); ++sf) {
    double s = 0.0;
    for (int se : sc.alfeld().edges_of_sub_face(sf))
      s += sc.alfeld().incidence_fe(sf, se) * w.coeffs(se);
    out.values(sf) = -s * sc.split_face_const(sf);
  }
  return out;
}

// -- SurfacePatch -----------------------------------------------------------

int SurfacePatch::at(const std::map<int, int>& m, int key) {
  auto it = m.find(key);
  return it == m.end() ? -1 : it->second;
}

SurfacePatch::SurfacePatch(const SurfaceComplex& sc, int anchor_level, int anchor)
    : m_sc(&sc), m_anchor_level(anchor_level), m_anchor(anchor) {
  const Mesh& mesh = sc.mesh();
  const AlfeldBoundaryMesh& alfeld = sc.alfeld();
  if (anchor_level > 2 || !mesh.is_boundary(anchor_level, anchor))
    fail(ErrorCode::NotBoundarySimplex, "build_patch: anchor not on the boundary");
  if (!check_contractibility(mesh, anchor_level, anchor))
    fail(ErrorCode::NotContractible, "build_patch: extended boundary star is not a disc");

  m_h = mesh.h(anchor_level, anchor);
  std::vector<int> mesh_faces = mesh.extended_boundary_star_faces(anchor_level, anchor);
  for (int f : mesh_faces) m_faces.push_back(alfeld.boundary_position(f));
  sort_unique(m_faces);

  for (int b : m_faces) {
    int f = mesh.boundary_faces()[b];
    for (int v : mesh.face(f)) m_verts.push_back(v);
    for (int e : mesh.edges_of_face(f)) m_edges.push_back(e);
    for (int sf : alfeld.sub_faces_of_parent(b)) {
      m_sub_faces.push_back(sf);
      for (int sv : alfeld.sub_face(sf)) m_split_verts.push_back(sv);
      for (int se : alfeld.edges_of_sub_face(sf)) m_split_edges.push_back(se);
    }
    m_area += sc.parent_area(b);
  }
  sort_unique(m_verts);
  sort_unique(m_edges);
  sort_unique(m_sub_faces);
  sort_unique(m_split_verts);
  sort_unique(m_split_edges);

  for (size_t i = 0; i < m_verts.size(); ++i) m_vert_pos[m_verts[i]] = static_cast<int>(i);
  for (size_t i = 0; i < m_edges.size(); ++i) m_edge_pos[m_edges[i]] = static_cast<int>(i);
  for (size_t i = 0; i < m_faces.size(); ++i) m_face_pos[m_faces[i]] = static_cast<int>(i);
  for (size_t i = 0; i < m_sub_faces.size(); ++i)
    m_subface_pos[m_sub_faces[i]] = static_cast<int>(i);
  for (size_t i = 0; i < m_split_verts.size(); ++i)
    m_splitvert_pos[m_split_verts[i]] = static_cast<int>(i);
  for (size_t i = 0; i < m_split_edges.size(); ++i)
    m_splitedge_pos[m_split_edges[i]] = static_cast<int>(i);

  // rim detection: split edges with a single adjacent sub-face inside the patch
  m_edge_interior.assign(m_split_edges.size(), 1);
  m_vert_interior.assign(m_split_verts.size(), 1);
  for (size_t i = 0; i < m_split_edges.size(); ++i) {
    int inside = 0;
    for (int sf : alfeld.sub_faces_of_edge(m_split_edges[i]))
      if (m_subface_pos.count(sf)) ++inside;
    if (inside == 1) {
      m_edge_interior[i] = 0;
      for (int sv : alfeld.sub_edge(m_split_edges[i]))
        m_vert_interior[local_split_vert(sv)] = 0;
    }
  }
  for (size_t i = 0; i < m_split_edges.size(); ++i)
    if (m_edge_interior[i]) m_int_edges.push_back(m_split_edges[i]);
  for (size_t i = 0; i < m_split_verts.size(); ++i)
    if (m_vert_interior[i]) m_int_verts.push_back(m_split_verts[i]);

  const int nV = static_cast<int>(m_verts.size());
  const int nE = static_cast<int>(m_edges.size());
  const int nF = static_cast<int>(m_faces.size());
  const int nsV = static_cast<int>(m_split_verts.size());
  const int nsE = static_cast<int>(m_split_edges.size());
  const int nsF = static_cast<int>(m_sub_faces.size());

  m_sgrad_p.setZero(nE, nV);
  for (int i = 0; i < nE; ++i) {
    const auto& ev = mesh.edge(m_edges[i]);
    m_sgrad_p(i, m_vert_pos[ev[0]]) = -1.0;
    m_sgrad_p(i, m_vert_pos[ev[1]]) = 1.0;
  }
  m_scurl_p.setZero(nF, nE);
  for (int i = 0; i < nF; ++i) {
    int f = mesh.boundary_faces()[m_faces[i]];
    for (int e : mesh.edges_of_face(f))
      m_scurl_p(i, m_edge_pos[e]) =
          mesh.incidence(2, f, e) * sc.sign(m_faces[i]) / sc.parent_area(m_faces[i]);
  }
  // srot = sgrad x n: rotated-basis coefficients are the negated incidence map
  m_srot_s.setZero(nsE, nsV);
  for (int i = 0; i < nsE; ++i) {
    const auto& ev = alfeld.sub_edge(m_split_edges[i]);
    m_srot_s(i, m_splitvert_pos[ev[0]]) = 1.0;
    m_srot_s(i, m_splitvert_pos[ev[1]]) = -1.0;
  }
  m_sdiv_s.setZero(nsF, nsE);
  for (int i = 0; i < nsF; ++i) {
    int sf = m_sub_faces[i];
    for (int se : alfeld.edges_of_sub_face(sf))
      m_sdiv_s(i, m_splitedge_pos[se]) = -alfeld.incidence_fe(sf, se) * sc.split_face_const(sf);
  }

  // masses
  m_areas_p.resize(nF);
  m_mu_int.resize(nF);
  m_M0p.setZero(nV, nV);
  m_M1p.setZero(nE, nE);
  QuadratureRule tri2 = simplex_rule(2, 2);
  for (int i = 0; i < nF; ++i) {
    int b = m_faces[i];
    int f = mesh.boundary_faces()[b];
    double A = sc.parent_area(b);
    m_areas_p(i) = A;
    m_mu_int(i) = A / 3.0;
    const auto& fv = mesh.face(f);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        m_M0p(m_vert_pos[fv[r]], m_vert_pos[fv[c]]) += A / 12.0 * (r == c ? 2.0 : 1.0);
    // Whitney edge mass by quadrature
    Eigen::MatrixXd verts(3, 3);
    for (int k = 0; k < 3; ++k) verts.col(k) = mesh.vertex(fv[k]);
    MappedRule mr = map_rule(tri2, verts);
    const auto& fe = mesh.edges_of_face(f);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      std::array<Vec3, 3> w;
      for (int k = 0; k < 3; ++k) w[k] = sc.edge_whitney(b, fe[k], x);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          m_M1p(m_edge_pos[fe[r]], m_edge_pos[fe[c]]) += mr.weights(q) * w[r].dot(w[c]);
    }
  }
  m_areas_s.resize(nsF);
  m_M0s.setZero(nsV, nsV);
  m_M1s.setZero(nsE, nsE);
  for (int i = 0; i < nsF; ++i) {
    int sf = m_sub_faces[i];
    double A = alfeld.sub_area(sf);
    m_areas_s(i) = A;
    const auto& t = alfeld.sub_face(sf);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        m_M0s(m_splitvert_pos[t[r]], m_splitvert_pos[t[c]]) += A / 12.0 * (r == c ? 2.0 : 1.0);
    Eigen::MatrixXd verts(3, 3);
    for (int k = 0; k < 3; ++k) verts.col(k) = alfeld.split_vertex(t[k]);
    MappedRule mr = map_rule(tri2, verts);
    const auto& se = alfeld.edges_of_sub_face(sf);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      std::array<Vec3, 3> w;
      for (int k = 0; k < 3; ++k) w[k] = sc.split_edge_whitney(sf, se[k], x);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          m_M1s(m_splitedge_pos[se[r]], m_splitedge_pos[se[c]]) += mr.weights(q) * w[r].dot(w[c]);
    }
  }
}

SurfacePatch build_patch(const SurfaceComplex& sc, int anchor_level, int anchor) {
  return SurfacePatch(sc, anchor_level, anchor);
}

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& A, const std::vector<int>& keep) {
  Eigen::MatrixXd out(A.rows(), keep.size());
  for (size_t i = 0; i < keep.size(); ++i) out.col(i) = A.col(keep[i]);
  return out;
}

Eigen::MatrixXd select_block(const Eigen::MatrixXd& A, const std::vector<int>& keep) {
  Eigen::MatrixXd out(keep.size(), keep.size());
  for (size_t i = 0; i < keep.size(); ++i)
    for (size_t j = 0; j < keep.size(); ++j) out(i, j) = A(keep[i], keep[j]);
  return out;
}

std::vector<int> interior_vert_locals(const SurfacePatch& p) {
  std::vector<int> keep;
  for (int sv : p.interior_split_verts()) keep.push_back(p.local_split_vert(sv));
  return keep;
}

std::vector<int> interior_edge_locals(const SurfacePatch& p) {
  std::vector<int> keep;
  for (int se : p.interior_split_edges()) keep.push_back(p.local_split_edge(se));
  return keep;
}

}  // namespace

SurfaceOperatorMatrix operator_matrix(const SurfacePatch& patch, OperatorTag tag) {
  SurfaceOperatorMatrix out;
  out.tag = tag;
  switch (tag) {
    case OperatorTag::Sgrad:
      out.matrix = patch.sgrad_parent();
      out.domain_mass = patch.mass_p0();
      out.codomain_mass = patch.mass_p1();
      return out;
    case OperatorTag::Scurl:
      out.matrix = patch.scurl_parent();
      out.domain_mass = patch.mass_p1();
      out.codomain_weights = patch.parent_areas();
      return out;
    case OperatorTag::Srot: {
      auto keep = interior_vert_locals(patch);
      out.matrix = select_columns(patch.srot_split(), keep);
      out.domain_mass = select_block(patch.mass_s0(), keep);
      out.codomain_mass = patch.mass_s1();
      return out;
    }
    case OperatorTag::Sdiv: {
      auto keep = interior_edge_locals(patch);
      out.matrix = select_columns(patch.sdiv_split(), keep);
      out.domain_mass = select_block(patch.mass_s1(), keep);
      out.codomain_weights = patch.sub_areas();
      return out;
    }
  }
  fail(ErrorCode::UnsupportedPair, "operator_matrix: unknown tag");
}

KernelSplit kernel_complement(const SurfacePatch& patch, OperatorTag tag) {
  SurfaceOperatorMatrix op = operator_matrix(patch, tag);
  KernelSplit ks;
  ks.kernel = nullspace_of(op.matrix);
  if (ks.kernel.cols() == 0) {
    ks.complement = Eigen::MatrixXd::Identity(op.matrix.cols(), op.matrix.cols());
    return ks;
  }
  ks.complement = nullspace_of(Eigen::MatrixXd(ks.kernel.transpose() * op.domain_mass));
  return ks;
}

Eigen::VectorXd weighted_patch_solve(const SurfacePatch& patch, int level,
                                     const Eigen::VectorXd& rhs) {
  const SurfaceComplex& sc = patch.complex();
  const Mesh& mesh = sc.mesh();
  Eigen::MatrixXd K;
  OperatorTag tag;
  if (level == 0) {
    tag = OperatorTag::Sgrad;
    const int nV = static_cast<int>(patch.verts().size());
    K.setZero(nV, nV);
    for (size_t i = 0; i < patch.faces().size(); ++i) {
      int b = patch.faces()[i];
      int f = mesh.boundary_faces()[b];
      const auto& fv = mesh.face(f);
      double w = patch.mu_integrals()(i);
      const auto& G = sc.parent_grads(b);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          K(patch.local_vert(fv[r]), patch.local_vert(fv[c])) += w * G.row(r).dot(G.row(c));
    }
  } else if (level == 1) {
    tag = OperatorTag::Scurl;
    K = patch.scurl_parent().transpose() * patch.mu_integrals().asDiagonal() *
        patch.scurl_parent();
  } else {
    fail(ErrorCode::UnsupportedPair, "weighted_patch_solve: level must be 0 or 1");
  }
  if (rhs.size() != K.rows())
    fail(ErrorCode::InvalidArgument, "weighted_patch_solve: rhs size mismatch");
  KernelSplit ks = kernel_complement(patch, tag);
  const Eigen::MatrixXd& Q = ks.complement;
  Eigen::MatrixXd A = Q.transpose() * K * Q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() <= kRankTol * lmax)
    fail(ErrorCode::SingularSystem, "weighted_patch_solve: reduced matrix not positive definite");
  Eigen::VectorXd y = A.ldlt().solve(Q.transpose() * rhs);
  return Q * y;
}

Eigen::VectorXd min_norm_preimage(const SurfacePatch& patch, OperatorTag tag,
                                  const Eigen::VectorXd& target) {
  if (tag != OperatorTag::Srot && tag != OperatorTag::Sdiv)
    fail(ErrorCode::UnsupportedPair, "min_norm_preimage: only split operators supported");
  SurfaceOperatorMatrix op = operator_matrix(patch, tag);
  if (target.size() != op.matrix.rows())
    fail(ErrorCode::InvalidArgument, "min_norm_preimage: target size mismatch");

  Eigen::LLT<Eigen::MatrixXd> llt(op.domain_mass);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::SingularSystem, "min_norm_preimage: domain mass not positive definite");
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd B =
      L.triangularView<Eigen::Lower>().transpose().solve<Eigen::OnTheRight>(op.matrix);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::VectorXd ut = svd.matrixU().transpose() * target;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(B.cols());
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kRankTol * std::max(smax, 1e-300))
      y += ut(i) / svd.singularValues()(i) * svd.matrixV().col(i);
  Eigen::VectorXd x = L.triangularView<Eigen::Lower>().transpose().solve(y);

  // residual in the codomain metric
  Eigen::VectorXd r = op.matrix * x - target;
  double rn, tn;
  if (op.codomain_weights.size() > 0) {
    rn = std::sqrt((r.array().square() * op.codomain_weights.array()).sum());
    tn = std::sqrt((target.array().square() * op.codomain_weights.array()).sum());
  } else {
    rn = std::sqrt(r.dot(op.codomain_mass * r));
    tn = std::sqrt(target.dot(op.codomain_mass * target));
  }
  if (rn > 1e-10 * std::max(tn, 1.0))
    fail(ErrorCode::NotInRange, "min_norm_preimage: target not in the operator range");

  // scatter back to the full local space
  std::vector<int> keep = (tag == OperatorTag::Srot) ? interior_vert_locals(patch)
                                                     : interior_edge_locals(patch);
  int full = (tag == OperatorTag::Srot) ? static_cast<int>(patch.split_verts().size())
                                        : static_cast<int>(patch.split_edges().size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(full);
  for (size_t i = 0; i < keep.size(); ++i) out(keep[i]) = x(i);
  return out;
}

PoincareEstimate poincare_constant(const SurfacePatch& patch, PoincareVariant variant) {
  const SurfaceComplex& sc = patch.complex();
  const Mesh& mesh = sc.mesh();
  Eigen::MatrixXd K, M, D;
  switch (variant) {
    case PoincareVariant::Onto0: {
      const int nV = static_cast<int>(patch.verts().size());
      K.setZero(nV, nV);
      for (size_t i = 0; i < patch.faces().size(); ++i) {
        int b = patch.faces()[i];
        const auto& fv = mesh.face(mesh.boundary_faces()[b]);
        const auto& G = sc.parent_grads(b);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            K(patch.local_vert(fv[r]), patch.local_vert(fv[c])) +=
                patch.parent_areas()(i) * G.row(r).dot(G.row(c));
      }
      M = patch.mass_p0();
      D = patch.sgrad_parent();
      break;
    }
    case PoincareVariant::Onto1:
      K = patch.scurl_parent().transpose() * patch.parent_areas().asDiagonal() *
          patch.scurl_parent();
      M = patch.mass_p1();
      D = patch.scurl_parent();
      break;
    case PoincareVariant::Onto0m: {
      auto keep = interior_vert_locals(patch);
      const AlfeldBoundaryMesh& alfeld = sc.alfeld();
      const int nsV = static_cast<int>(patch.split_verts().size());
      Eigen::MatrixXd Kfull = Eigen::MatrixXd::Zero(nsV, nsV);
      for (size_t i = 0; i < patch.sub_faces().size(); ++i) {
        int sf = patch.sub_faces()[i];
        const auto& t = alfeld.sub_face(sf);
        const auto& G = alfeld.sub_grads(sf);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            Kfull(patch.local_split_vert(t[r]), patch.local_split_vert(t[c])) +=
                patch.sub_areas()(i) * G.row(r).dot(G.row(c));
      }
      K = select_block(Kfull, keep);
      M = select_block(patch.mass_s0(), keep);
      D = select_columns(patch.srot_split(), keep);
      break;
    }
    case PoincareVariant::Onto1m: {
      auto keep = interior_edge_locals(patch);
      D = select_columns(patch.sdiv_split(), keep);
      K = D.transpose() * patch.sub_areas().asDiagonal() * D;
      M = select_block(patch.mass_s1(), keep);
      break;
    }
  }
  Eigen::MatrixXd Z = nullspace_of(D);
  Eigen::MatrixXd Q;
  if (Z.cols() == 0) {
    Q = Eigen::MatrixXd::Identity(D.cols(), D.cols());
  } else {
    Q = nullspace_of(Eigen::MatrixXd(Z.transpose() * M));
  }
  if (Q.cols() == 0) fail(ErrorCode::SingularSystem, "poincare_constant: empty complement");
  Eigen::MatrixXd A = Q.transpose() * M * Q;
  Eigen::MatrixXd B = Q.transpose() * K * Q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(B);
  if (check.eigenvalues().minCoeff() <= kRankTol * check.eigenvalues().cwiseAbs().maxCoeff())
    fail(ErrorCode::SingularSystem, "poincare_constant: operator not coercive on the complement");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
  PoincareEstimate est;
  est.anchor_level = patch.anchor_level();
  est.anchor = patch.anchor();
  est.variant = variant;
  est.constant = std::sqrt(ges.eigenvalues().maxCoeff()) / patch.h_anchor();
  return est;
}

}  // namespace fecp
