#include "fecp/splits.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace fecp {

namespace {

std::array<int, 2> sorted2(int a, int b) {
  if (a > b) std::swap(a, b);
  return {a, b};
}

}  // namespace

AlfeldBoundaryMesh::AlfeldBoundaryMesh(const Mesh& mesh) : m_mesh(&mesh) {
  const auto& bfaces = mesh.boundary_faces();
  const int nb = static_cast<int>(bfaces.size());
  if (nb == 0) fail(ErrorCode::InvalidArgument, "AlfeldBoundaryMesh: mesh has no boundary faces");

  m_bface_pos.assign(mesh.n_faces(), -1);
  m_barycenters.resize(nb);
  m_normal.resize(nb);
  for (int b = 0; b < nb; ++b) {
    int f = bfaces[b];
    m_bface_pos[f] = b;
    const auto& fv = mesh.face(f);
    m_barycenters[b] = (mesh.vertex(fv[0]) + mesh.vertex(fv[1]) + mesh.vertex(fv[2])) / 3.0;
    m_normal[b] = mesh.outward_normal(f);
  }

  // sub-faces: for parent [a,b,c] the three sub-triangles drop one parent
  // vertex and add the barycenter B; tuples [x,y,B] stay sorted since
  // barycenter ids exceed all parent ids.
  m_sub_faces.resize(3 * nb);
  m_parent_subs.resize(nb);
  m_area.resize(3 * nb);
  m_sign.resize(3 * nb);
  m_grads.resize(3 * nb);
  for (int b = 0; b < nb; ++b) {
    int f = bfaces[b];
    const auto& fv = mesh.face(f);
    int B = barycenter_id(b);
    const std::array<std::array<int, 2>, 3> pairs = {{{fv[0], fv[1]}, {fv[0], fv[2]}, {fv[1], fv[2]}}};
    for (int s = 0; s < 3; ++s) {
      int sf = 3 * b + s;
      m_sub_faces[sf] = {pairs[s][0], pairs[s][1], B};
      m_parent_subs[b][s] = sf;
      Vec3 p0 = mesh.vertex(pairs[s][0]);
      Vec3 p1 = mesh.vertex(pairs[s][1]);
      Vec3 p2 = m_barycenters[b];
      Vec3 cr = (p1 - p0).cross(p2 - p0);
      m_area[sf] = cr.norm() / 2.0;
      m_sign[sf] = (cr.dot(m_normal[b]) > 0.0) ? 1.0 : -1.0;
      // in-plane gradients of the sub-face barycentric functions
      Eigen::Matrix<double, 3, 2> E;
      E.col(0) = p1 - p0;
      E.col(1) = p2 - p0;
      Eigen::Matrix2d G = E.transpose() * E;
      Eigen::Matrix<double, 3, 2> Einv = E * G.inverse();
      m_grads[sf].row(1) = Einv.col(0).transpose();
      m_grads[sf].row(2) = Einv.col(1).transpose();
      m_grads[sf].row(0) = -(m_grads[sf].row(1) + m_grads[sf].row(2));
    }
  }

  // split edges
  {
    std::vector<std::array<int, 2>> edges;
    for (const auto& sf : m_sub_faces) {
      edges.push_back(sorted2(sf[0], sf[1]));
      edges.push_back(sorted2(sf[0], sf[2]));
      edges.push_back(sorted2(sf[1], sf[2]));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    m_edges = std::move(edges);
  }
  m_mesh_edge.assign(m_edges.size(), -1);
  for (size_t se = 0; se < m_edges.size(); ++se)
    if (!is_barycenter(m_edges[se][1]))
      m_mesh_edge[se] = mesh.edge_index(m_edges[se][0], m_edges[se][1]);

  m_sub_face_edges.resize(m_sub_faces.size());
  m_edge_faces.assign(m_edges.size(), {});
  m_vertex_edges.assign(n_split_vertices(), {});
  for (size_t sf = 0; sf < m_sub_faces.size(); ++sf) {
    const auto& t = m_sub_faces[sf];
    m_sub_face_edges[sf] = {sub_edge_index(t[1], t[2]), sub_edge_index(t[0], t[2]),
                            sub_edge_index(t[0], t[1])};
    for (int se : m_sub_face_edges[sf]) m_edge_faces[se].push_back(static_cast<int>(sf));
  }
  for (size_t se = 0; se < m_edges.size(); ++se) {
    m_vertex_edges[m_edges[se][0]].push_back(static_cast<int>(se));
    m_vertex_edges[m_edges[se][1]].push_back(static_cast<int>(se));
  }
}

Vec3 AlfeldBoundaryMesh::split_vertex(int sv) const {
  if (sv < m_mesh->n_vertices()) return m_mesh->vertex(sv);
  return m_barycenters[sv - m_mesh->n_vertices()];
}

int AlfeldBoundaryMesh::sub_edge_index(int a, int b) const {
  auto key = sorted2(a, b);
  auto it = std::lower_bound(m_edges.begin(), m_edges.end(), key);
  if (it == m_edges.end() || *it != key) return -1;
  return static_cast<int>(it - m_edges.begin());
}

int AlfeldBoundaryMesh::incidence_fe(int sf, int se) const {
  const auto& t = m_sub_faces[sf];
  const auto& e = m_edges[se];
  for (int j = 0; j < 3; ++j) {
    std::array<int, 2> rest;
    int p = 0;
    for (int i = 0; i < 3; ++i)
      if (i != j) rest[p++] = t[i];
    if (rest == e) return (j % 2 == 0) ? 1 : -1;
  }
  return 0;
}

int AlfeldBoundaryMesh::incidence_ev(int se, int sv) const {
  const auto& e = m_edges[se];
  if (e[0] == sv) return -1;  // omitting position 1 leaves vertex 0
  if (e[1] == sv) return 1;
  return 0;
}

double AlfeldBoundaryMesh::parent_area(int bface_pos) const {
  return m_mesh->area(m_mesh->boundary_faces()[bface_pos]);
}

WorseyFarinMesh::WorseyFarinMesh(const Mesh& parent, const AlfeldBoundaryMesh& alfeld)
    : m_parent(&parent), m_alfeld(&alfeld) {
  const int nv = parent.n_vertices();
  const int nt = parent.n_cells();
  const int nf = parent.n_faces();

  std::vector<Vec3> vertices(nv + nt + nf);
  for (int v = 0; v < nv; ++v) vertices[v] = parent.vertex(v);
  for (int t = 0; t < nt; ++t) vertices[nv + t] = parent.cell_geometry(t).verts.rowwise().mean();
  for (int f = 0; f < nf; ++f) {
    const auto& fv = parent.face(f);
    vertices[nv + nt + f] =
        (parent.vertex(fv[0]) + parent.vertex(fv[1]) + parent.vertex(fv[2])) / 3.0;
  }

  std::vector<std::array<int, 4>> tets;
  tets.reserve(12 * nt);
  m_parent_cell.reserve(12 * nt);
  m_sub_cells.resize(nt);
  for (int t = 0; t < nt; ++t) {
    int C = nv + t;
    int s = 0;
    for (int f : parent.faces_of_cell(t)) {
      int B = nv + nt + f;
      const auto& fv = parent.face(f);
      const std::array<std::array<int, 2>, 3> pairs = {
          {{fv[0], fv[1]}, {fv[0], fv[2]}, {fv[1], fv[2]}}};
      for (const auto& pr : pairs) {
        m_sub_cells[t][s++] = static_cast<int>(tets.size());
        tets.push_back({pr[0], pr[1], B, C});
        m_parent_cell.push_back(t);
      }
    }
  }
  m_mesh = build_mesh(vertices, tets);

  // boundary restriction tables
  m_wf_face.assign(alfeld.n_sub_faces(), -1);
  for (int sf = 0; sf < alfeld.n_sub_faces(); ++sf) {
    const auto& t = alfeld.sub_face(sf);
    int B = face_barycenter_vertex(alfeld.parent_face_id(sf));
    int wf = m_mesh.face_index(t[0], t[1], B);
    if (wf < 0 || !m_mesh.is_boundary(2, wf))
      fail(ErrorCode::NonManifold, "WorseyFarinMesh: boundary restriction mismatch");
    m_wf_face[sf] = wf;
  }
  m_wf_edge.assign(alfeld.n_sub_edges(), -1);
  for (int se = 0; se < alfeld.n_sub_edges(); ++se) {
    const auto& e = alfeld.sub_edge(se);
    int a = e[0];
    int b = alfeld.is_barycenter(e[1])
                ? face_barycenter_vertex(alfeld.parent_face_id(3 * alfeld.barycenter_owner(e[1])))
                : e[1];
    int wf = m_mesh.edge_index(a, b);
    if (wf < 0) fail(ErrorCode::NonManifold, "WorseyFarinMesh: boundary edge mismatch");
    m_wf_edge[se] = wf;
  }
}

int WorseyFarinMesh::wf_vertex_of_split_vertex(int alfeld_vertex) const {
  if (!m_alfeld->is_barycenter(alfeld_vertex)) return alfeld_vertex;
  int b = m_alfeld->barycenter_owner(alfeld_vertex);
  return face_barycenter_vertex(m_parent->boundary_faces()[b]);
}

void write_worsey_farin(const WorseyFarinMesh& wf, const std::string& mesh_path,
                        const std::string& parent_map_path) {
  write_mesh_file(wf.mesh(), mesh_path);
  std::ofstream out(parent_map_path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + parent_map_path);
  for (int c = 0; c < wf.mesh().n_cells(); ++c) out << c << " " << wf.parent_of(c) << "\n";
}

}  // namespace fecp
