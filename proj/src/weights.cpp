#include "fecp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace fecp {

namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

MappedRule sub_face_rule(const AlfeldBoundaryMesh& a, int sf, int degree) {
  const auto& t = a.sub_face(sf);
  Eigen::MatrixXd verts(3, 3);
  for (int i = 0; i < 3; ++i) verts.col(i) = a.split_vertex(t[i]);
  return map_rule(simplex_rule(2, degree), verts);
}

}  // namespace

BulkExtension::BulkExtension(const WorseyFarinMesh& wf, int weight_level, int anchor,
                             std::vector<std::pair<int, double>> dofs)
    : m_wf(&wf), m_weight_level(weight_level), m_anchor(anchor), m_dofs(std::move(dofs)) {
  std::sort(m_dofs.begin(), m_dofs.end());
  const Mesh& m = wf.mesh();
  const int host = 2 - weight_level;
  for (const auto& [simplex, c] : m_dofs) {
    if (c == 0.0) continue;
    for (int cell : m.cells_of(host, simplex)) m_support_cells.push_back(cell);
  }
  sort_unique(m_support_cells);
  for (int cell : m_support_cells) m_parent_support.push_back(wf.parent_of(cell));
  sort_unique(m_parent_support);
}

double BulkExtension::coeff(int simplex) const {
  auto it = std::lower_bound(m_dofs.begin(), m_dofs.end(), std::make_pair(simplex, -1e300));
  if (it != m_dofs.end() && it->first == simplex) return it->second;
  return 0.0;
}

double BulkExtension::scalar_value(int wf_cell, const Vec3& x) const {
  return whitney_expand::scalar(m_wf->mesh(), level(), wf_cell, x,
                                [this](int s) { return coeff(s); });
}

Vec3 BulkExtension::vector_value(int wf_cell, const Vec3& x) const {
  return whitney_expand::vector(m_wf->mesh(), level(), wf_cell, x,
                                [this](int s) { return coeff(s); });
}

Vec3 BulkExtension::vector_derivative(int wf_cell, const Vec3&) const {
  return whitney_expand::vector_d(m_wf->mesh(), level(), wf_cell,
                                  [this](int s) { return coeff(s); });
}

double BulkExtension::scalar_derivative(int wf_cell, const Vec3&) const {
  return whitney_expand::scalar_d(m_wf->mesh(), level(), wf_cell,
                                  [this](int s) { return coeff(s); });
}

DiscreteField BulkExtension::to_discrete_field(const FeSpace& wf_space) const {
  if (&wf_space.mesh() != &m_wf->mesh() || wf_space.level() != level())
    fail(ErrorCode::LevelMismatch, "to_discrete_field: space mismatch");
  DiscreteField out(wf_space);
  for (const auto& [simplex, c] : m_dofs) {
    int dof = wf_space.dof_of_simplex(simplex);
    if (dof >= 0) out.coeffs()(dof) = c;
  }
  return out;
}

WeightSet::WeightSet(const Mesh& mesh, const SurfaceComplex& sc, const WorseyFarinMesh& wf)
    : m_mesh(&mesh), m_sc(&sc), m_wf(&wf) {
  const auto& bverts = mesh.boundary_vertices();
  const auto& bedges = mesh.boundary_edges();
  const auto& bfaces = mesh.boundary_faces();
  m_weights[0].resize(bverts.size());
  m_weights[1].resize(bedges.size());
  m_weights[2].resize(bfaces.size());
  m_extensions[0].resize(bverts.size());
  m_extensions[1].resize(bedges.size());
  m_extensions[2].resize(bfaces.size());
  for (size_t i = 0; i < bverts.size(); ++i) m_pos[0][bverts[i]] = static_cast<int>(i);
  for (size_t i = 0; i < bedges.size(); ++i) m_pos[1][bedges[i]] = static_cast<int>(i);
  for (size_t i = 0; i < bfaces.size(); ++i) m_pos[2][bfaces[i]] = static_cast<int>(i);

  // weights are built level by level: edge weights consume vertex weights,
  // face weights consume edge weights
  for (size_t i = 0; i < bverts.size(); ++i) build_vertex_weight(static_cast<int>(i));
  for (size_t i = 0; i < bedges.size(); ++i) build_edge_weight(static_cast<int>(i));
  for (size_t i = 0; i < bfaces.size(); ++i) build_face_weight(static_cast<int>(i));
  for (int l = 0; l < 3; ++l)
    for (size_t i = 0; i < m_weights[l].size(); ++i) extend_to_bulk(l, static_cast<int>(i));
}

int WeightSet::count(int level) const { return static_cast<int>(m_weights[level].size()); }

int WeightSet::anchor_at(int level, int pos) const { return m_weights[level][pos].anchor; }

int WeightSet::position(int level, int mesh_id) const {
  auto it = m_pos[level].find(mesh_id);
  if (it == m_pos[level].end())
    fail(ErrorCode::NotBoundarySimplex, "WeightSet: not a boundary simplex");
  return it->second;
}

const BoundaryWeight& WeightSet::weight(int level, int mesh_id) const {
  return m_weights[level][position(level, mesh_id)];
}

const BulkExtension& WeightSet::extension(int level, int mesh_id) const {
  return m_extensions[level][position(level, mesh_id)];
}

const BoundaryWeight& WeightSet::weight_at(int level, int pos) const {
  return m_weights[level][pos];
}

const BulkExtension& WeightSet::extension_at(int level, int pos) const {
  return m_extensions[level][pos];
}

void WeightSet::build_vertex_weight(int pos) {
  const Mesh& mesh = *m_mesh;
  int v = mesh.boundary_vertices()[pos];
  SurfacePatch patch = build_patch(*m_sc, 0, v);
  BoundaryWeight& w = m_weights[0][pos];
  w.level = 0;
  w.anchor = v;
  w.support = patch.faces();
  w.eta0 = 1.0 / patch.area();

  // rhs(u) = u(v) - (eta0, u) on the parent P1 basis
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(patch.verts().size());
  rhs(patch.local_vert(v)) += 1.0;
  for (size_t i = 0; i < patch.faces().size(); ++i) {
    int f = mesh.boundary_faces()[patch.faces()[i]];
    for (int u : mesh.face(f))
      rhs(patch.local_vert(u)) -= w.eta0 * patch.parent_areas()(i) / 3.0;
  }
  w.psi = weighted_patch_solve(patch, 0, rhs);

  // zeta0 = eta0 - sdiv(mu sgrad psi): per sub-face, eta0 - grad(mu) . sgrad(psi)
  w.zeta0.values.setZero(m_sc->n_sub_faces());
  for (size_t i = 0; i < patch.faces().size(); ++i) {
    int b = patch.faces()[i];
    int f = mesh.boundary_faces()[b];
    const auto& fv = mesh.face(f);
    Vec3 sgrad_psi = Vec3::Zero();
    for (int j = 0; j < 3; ++j)
      sgrad_psi += w.psi(patch.local_vert(fv[j])) * m_sc->parent_grads(b).row(j).transpose();
    for (int sf : m_sc->alfeld().sub_faces_of_parent(b))
      w.zeta0.values(sf) = w.eta0 - m_sc->mu_grad(sf).dot(sgrad_psi);
  }
}

void WeightSet::build_edge_weight(int pos) {
  const Mesh& mesh = *m_mesh;
  const AlfeldBoundaryMesh& alfeld = m_sc->alfeld();
  int e = mesh.boundary_edges()[pos];
  SurfacePatch patch = build_patch(*m_sc, 1, e);
  BoundaryWeight& w = m_weights[1][pos];
  w.level = 1;
  w.anchor = e;
  w.support = patch.faces();

  // eta1 solves sdiv(eta1) = -sum_v iota_{ev} zeta0_v
  Eigen::VectorXd target = Eigen::VectorXd::Zero(patch.sub_faces().size());
  for (int j = 0; j < 2; ++j) {
    int v = mesh.edge(e)[j];
    double iota = mesh.incidence(1, e, v);
    const SplitConstField& z0 = m_weights[0][position(0, v)].zeta0;
    for (size_t i = 0; i < patch.sub_faces().size(); ++i)
      target(i) -= iota * z0.values(patch.sub_faces()[i]);
  }
  Eigen::VectorXd eta_local = min_norm_preimage(patch, OperatorTag::Sdiv, target);
  w.eta1.coeffs.setZero(alfeld.n_sub_edges());
  for (size_t i = 0; i < patch.split_edges().size(); ++i)
    w.eta1.coeffs(patch.split_edges()[i]) = eta_local(i);

  // rhs(u) = phi_e(u) - (eta1, u) on the parent Whitney basis
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(patch.edges().size());
  rhs(patch.local_edge(e)) += 1.0;
  for (size_t i = 0; i < patch.sub_faces().size(); ++i) {
    int sf = patch.sub_faces()[i];
    int b = alfeld.parent_of_sub_face(sf);
    int f = mesh.boundary_faces()[b];
    MappedRule mr = sub_face_rule(alfeld, sf, 3);
    for (int q = 0; q < mr.weights.size(); ++q) {
      Vec3 x = mr.points.col(q);
      Vec3 eta_val = w.eta1.value(*m_sc, sf, x);
      for (int pe : mesh.edges_of_face(f))
        rhs(patch.local_edge(pe)) -= mr.weights(q) * eta_val.dot(m_sc->edge_whitney(b, pe, x));
    }
  }
  w.psi = weighted_patch_solve(patch, 1, rhs);

  // zeta1 = eta1 + srot(mu scurl psi); with srot = sgrad x n the rotated
  // coefficients on vertex-to-barycenter edges pick up -(scurl psi)|_F
  w.zeta1.coeffs = w.eta1.coeffs;
  Eigen::VectorXd curl = patch.scurl_parent() * w.psi;  // per parent face values
  for (size_t i = 0; i < patch.faces().size(); ++i) {
    int b = patch.faces()[i];
    int f = mesh.boundary_faces()[b];
    int bary = alfeld.barycenter_id(b);
    for (int v : mesh.face(f)) {
      int se = alfeld.sub_edge_index(v, bary);
      w.zeta1.coeffs(se) -= curl(i);
    }
  }
}

void WeightSet::build_face_weight(int pos) {
  const Mesh& mesh = *m_mesh;
  const AlfeldBoundaryMesh& alfeld = m_sc->alfeld();
  int f = mesh.boundary_faces()[pos];
  SurfacePatch patch = build_patch(*m_sc, 2, f);
  BoundaryWeight& w = m_weights[2][pos];
  w.level = 2;
  w.anchor = f;
  w.support = patch.faces();

  // zeta2 solves srot(zeta2) = sum_e iota_{fe} zeta1_e
  Eigen::VectorXd target = Eigen::VectorXd::Zero(patch.split_edges().size());
  for (int e : mesh.edges_of_face(f)) {
    double iota = mesh.incidence(2, f, e);
    const SplitRotatedField& z1 = m_weights[1][position(1, e)].zeta1;
    for (size_t i = 0; i < patch.split_edges().size(); ++i)
      target(i) += iota * z1.coeffs(patch.split_edges()[i]);
  }
  Eigen::VectorXd z_local = min_norm_preimage(patch, OperatorTag::Srot, target);
  w.zeta2.values.setZero(alfeld.n_split_vertices());
  for (size_t i = 0; i < patch.split_verts().size(); ++i)
    w.zeta2.values(patch.split_verts()[i]) = z_local(i);
}

void WeightSet::extend_to_bulk(int level, int pos) {
  const Mesh& wfm = m_wf->mesh();
  const AlfeldBoundaryMesh& alfeld = m_sc->alfeld();
  const BoundaryWeight& w = m_weights[level][pos];
  std::vector<std::pair<int, double>> dofs;
  switch (level) {
    case 0:
      // RT dofs on boundary sub-faces: flux = sign * area * value
      for (int b : w.support)
        for (int sf : alfeld.sub_faces_of_parent(b)) {
          double val = w.zeta0.values(sf);
          if (val == 0.0) continue;
          int wff = m_wf->wf_face_of_sub_triangle(sf);
          dofs.push_back({wff, val * wfm.area(wff) * wfm.boundary_sign(wff)});
        }
      break;
    case 1: {
      // Nedelec dofs on boundary split edges carry the rotated coefficients
      std::vector<int> edges;
      for (int b : w.support)
        for (int sf : alfeld.sub_faces_of_parent(b))
          for (int se : alfeld.edges_of_sub_face(sf)) edges.push_back(se);
      sort_unique(edges);
      for (int se : edges) {
        double c = w.zeta1.coeffs(se);
        if (c != 0.0) dofs.push_back({m_wf->wf_edge_of_sub_edge(se), c});
      }
      break;
    }
    case 2: {
      std::vector<int> verts;
      for (int b : w.support)
        for (int sf : alfeld.sub_faces_of_parent(b))
          for (int sv : alfeld.sub_face(sf)) verts.push_back(sv);
      sort_unique(verts);
      for (int sv : verts) {
        double c = w.zeta2.values(sv);
        if (c != 0.0) dofs.push_back({m_wf->wf_vertex_of_split_vertex(sv), c});
      }
      break;
    }
  }
  m_extensions[level][pos] = BulkExtension(*m_wf, level, w.anchor, std::move(dofs));
}

double pair_weight_with_trace(const SurfaceComplex& sc, const BoundaryWeight& w,
                              const FieldView& u, int quad_degree) {
  const Mesh& mesh = sc.mesh();
  const AlfeldBoundaryMesh& alfeld = sc.alfeld();
  if (u.level() != w.level) fail(ErrorCode::LevelMismatch, "pair_weight_with_trace");
  double s = 0.0;
  for (int b : w.support) {
    int f = mesh.boundary_faces()[b];
    int cell = mesh.boundary_cell(f);
    Vec3 n = sc.normal(b);
    for (int sf : alfeld.sub_faces_of_parent(b)) {
      MappedRule mr = sub_face_rule(alfeld, sf, quad_degree);
      for (int q = 0; q < mr.weights.size(); ++q) {
        Vec3 x = mr.points.col(q);
        double val = 0.0;
        switch (w.level) {
          case 0: val = w.zeta0.values(sf) * u.scalar_value(cell, x); break;
          case 1: {
            Vec3 uu = u.vector_value(cell, x);
            Vec3 tang = uu - uu.dot(n) * n;
            val = w.zeta1.value(sc, sf, x).dot(tang);
            break;
          }
          case 2: val = w.zeta2.value(sc, sf, x) * u.vector_value(cell, x).dot(n); break;
        }
        s += mr.weights(q) * val;
      }
    }
  }
  return s;
}

double weight_l2_norm(const SurfaceComplex& sc, const BoundaryWeight& w, int quad_degree) {
  const AlfeldBoundaryMesh& alfeld = sc.alfeld();
  double s = 0.0;
  for (int b : w.support) {
    for (int sf : alfeld.sub_faces_of_parent(b)) {
      if (w.level == 0) {
        s += alfeld.sub_area(sf) * w.zeta0.values(sf) * w.zeta0.values(sf);
        continue;
      }
      MappedRule mr = sub_face_rule(alfeld, sf, quad_degree);
      for (int q = 0; q < mr.weights.size(); ++q) {
        Vec3 x = mr.points.col(q);
        double v2 = (w.level == 1) ? w.zeta1.value(sc, sf, x).squaredNorm()
                                   : std::pow(w.zeta2.value(sc, sf, x), 2);
        s += mr.weights(q) * v2;
      }
    }
  }
  return std::sqrt(std::max(0.0, s));
}

double weight_integral(const SurfaceComplex& sc, const BoundaryWeight& w) {
  if (w.level != 0) fail(ErrorCode::LevelMismatch, "weight_integral: level-0 weights only");
  double s = 0.0;
  for (int b : w.support)
    for (int sf : sc.alfeld().sub_faces_of_parent(b))
      s += sc.alfeld().sub_area(sf) * w.zeta0.values(sf);
  return s;
}

void dump_weights_json(const WeightSet& ws, std::ostream& out) {
  const Mesh& mesh = ws.mesh();
  const SurfaceComplex& sc = ws.complex();
  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (int level = 0; level <= 2; ++level) {
    FeSpace space(mesh, level);
    for (int i = 0; i < ws.count(level); ++i) {
      const BoundaryWeight& w = ws.weight_at(level, i);
      nlohmann::ordered_json rec;
      rec["level"] = level;
      rec["anchor"] = w.anchor;
      nlohmann::ordered_json faces = nlohmann::ordered_json::array();
      for (int b : w.support) faces.push_back(mesh.boundary_faces()[b]);
      rec["support_faces"] = faces;
      nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
      if (level == 0) {
        for (int b : w.support)
          for (int sf : sc.alfeld().sub_faces_of_parent(b)) coeffs.push_back(w.zeta0.values(sf));
      } else if (level == 1) {
        for (int se = 0; se < sc.alfeld().n_sub_edges(); ++se)
          if (w.zeta1.coeffs(se) != 0.0) coeffs.push_back(w.zeta1.coeffs(se));
      } else {
        for (int sv = 0; sv < sc.alfeld().n_split_vertices(); ++sv)
          if (w.zeta2.values(sv) != 0.0) coeffs.push_back(w.zeta2.values(sv));
      }
      rec["coefficients"] = coeffs;
      // duality residual against the anchor's own basis field
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(space.dim());
      unit(space.dof_of_simplex(w.anchor)) = 1.0;
      DiscreteField basis(space, unit);
      DiscreteFieldView view(basis);
      rec["duality_residual"] = std::abs(pair_weight_with_trace(sc, w, view) - 1.0);
      double drel = 0.0;
      if (level == 1) {
        SplitConstField div = sdiv_global(sc, w.zeta1);
        Eigen::VectorXd expect = Eigen::VectorXd::Zero(sc.n_sub_faces());
        for (int j = 0; j < 2; ++j) {
          int v = mesh.edge(w.anchor)[j];
          expect += mesh.incidence(1, w.anchor, v) * ws.weight(0, v).zeta0.values;
        }
        drel = (div.values + expect).lpNorm<Eigen::Infinity>();
      } else if (level == 2) {
        SplitRotatedField rot = srot_global(sc, w.zeta2);
        Eigen::VectorXd expect = Eigen::VectorXd::Zero(sc.alfeld().n_sub_edges());
        for (int e : mesh.edges_of_face(w.anchor))
          expect += mesh.incidence(2, w.anchor, e) * ws.weight(1, e).zeta1.coeffs;
        drel = (rot.coeffs - expect).lpNorm<Eigen::Infinity>();
      }
      rec["derivative_residual"] = drel;
      root.push_back(rec);
    }
  }
  out << root.dump(2) << "\n";
}

}  // namespace fecp
