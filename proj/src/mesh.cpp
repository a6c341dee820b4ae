#include "fecp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fecp {

namespace {

std::array<int, 2> sorted2(int a, int b) {
  if (a > b) std::swap(a, b);
  return {a, b};
}

std::array<int, 3> sorted3(int a, int b, int c) {
  std::array<int, 3> out{a, b, c};
  std::sort(out.begin(), out.end());
  return out;
}

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

int Mesh::n_simplices(int level) const {
  switch (level) {
    case 0: return n_vertices();
    case 1: return n_edges();
    case 2: return n_faces();
    case 3: return n_cells();
    default: fail(ErrorCode::InvalidArgument, "n_simplices: level out of range");
  }
}

std::vector<int> Mesh::simplex_vertices(int level, int index) const {
  switch (level) {
    case 0: return {index};
    case 1: return {m_edges[index][0], m_edges[index][1]};
    case 2: return {m_faces[index][0], m_faces[index][1], m_faces[index][2]};
    case 3:
      return {m_cells[index][0], m_cells[index][1], m_cells[index][2], m_cells[index][3]};
    default: fail(ErrorCode::InvalidArgument, "simplex_vertices: level out of range");
  }
}

int Mesh::edge_index(int a, int b) const {
  auto key = sorted2(a, b);
  auto it = std::lower_bound(m_edges.begin(), m_edges.end(), key);
  if (it == m_edges.end() || *it != key) return -1;
  return static_cast<int>(it - m_edges.begin());
}

int Mesh::face_index(int a, int b, int c) const {
  auto key = sorted3(a, b, c);
  auto it = std::lower_bound(m_faces.begin(), m_faces.end(), key);
  if (it == m_faces.end() || *it != key) return -1;
  return static_cast<int>(it - m_faces.begin());
}

std::vector<int> Mesh::cells_of(int level, int index) const {
  switch (level) {
    case 0: return m_vertex_cells[index];
    case 1: return m_edge_cells[index];
    case 2: return m_face_cells[index];
    case 3: return {index};
    default: fail(ErrorCode::InvalidArgument, "cells_of: level out of range");
  }
}

int Mesh::incidence(int parent_level, int parent, int child) const {
  if (parent_level < 1 || parent_level > 3)
    fail(ErrorCode::InvalidArgument, "incidence: parent level must be 1, 2 or 3");
  std::vector<int> pv = simplex_vertices(parent_level, parent);
  std::vector<int> cv = simplex_vertices(parent_level - 1, child);
  // child must equal parent with one position omitted
  int omitted = -1;
  size_t ci = 0;
  for (size_t pi = 0; pi < pv.size(); ++pi) {
    if (ci < cv.size() && pv[pi] == cv[ci]) {
      ++ci;
    } else if (omitted < 0) {
      omitted = static_cast<int>(pi);
    } else {
      return 0;
    }
  }
  if (ci != cv.size() || omitted < 0) return 0;
  return (omitted % 2 == 0) ? 1 : -1;
}

bool Mesh::is_boundary(int level, int index) const {
  switch (level) {
    case 0: return m_vertex_boundary[index] != 0;
    case 1: return m_edge_boundary[index] != 0;
    case 2: return m_face_boundary[index] != 0;
    case 3: return false;
    default: fail(ErrorCode::InvalidArgument, "is_boundary: level out of range");
  }
}

Vec3 Mesh::outward_normal(int f) const {
  return m_face_geom[f].normal * boundary_sign(f);
}

double Mesh::boundary_sign(int f) const {
  if (!m_face_boundary[f]) fail(ErrorCode::NotBoundarySimplex, "boundary_sign: interior face");
  int t = m_face_cells[f][0];
  Vec3 centroid = m_cell_geom[t].verts.rowwise().mean();
  Vec3 fc = (vertex(m_faces[f][0]) + vertex(m_faces[f][1]) + vertex(m_faces[f][2])) / 3.0;
  return (m_face_geom[f].normal.dot(fc - centroid) > 0.0) ? 1.0 : -1.0;
}

int Mesh::boundary_cell(int f) const {
  if (!m_face_boundary[f]) fail(ErrorCode::NotBoundarySimplex, "boundary_cell: interior face");
  return m_face_cells[f][0];
}

Vec3 Mesh::edge_tangent(int e) const {
  return (vertex(m_edges[e][1]) - vertex(m_edges[e][0])) / m_edge_length[e];
}

double Mesh::h(int level, int index) const {
  switch (level) {
    case 0: return m_vertex_h[index];
    case 1: return m_edge_length[index];
    case 2: return m_face_geom[index].diam;
    case 3: return m_cell_geom[index].diam;
    default: fail(ErrorCode::InvalidArgument, "h: level out of range");
  }
}

Eigen::Vector4d Mesh::barycentric(int t, const Vec3& x) const {
  const CellGeometry& g = m_cell_geom[t];
  Eigen::Vector4d lambda;
  for (int i = 0; i < 4; ++i)
    lambda(i) = 1.0 / 4.0 + g.grads.row(i).dot(x - g.verts.rowwise().mean());
  return lambda;
}

int Mesh::locate(const std::vector<int>& candidates, const Vec3& x) const {
  int best = -1;
  double best_min = -1e300;
  for (int t : candidates) {
    double m = barycentric(t, x).minCoeff();
    if (m > best_min) {
      best_min = m;
      best = t;
    }
  }
  return best;
}

std::vector<int> Mesh::star_cells(int level, int index) const {
  std::vector<int> out = cells_of(level, index);
  sort_unique(out);
  return out;
}

std::vector<int> Mesh::extended_star_cells(int level, int index, int k) const {
  if (k < 1) fail(ErrorCode::InvalidArgument, "extended_star_cells: k must be >= 1");
  std::vector<int> verts = simplex_vertices(level, index);
  std::vector<int> cells;
  for (int round = 0; round < k; ++round) {
    cells.clear();
    for (int v : verts)
      for (int t : m_vertex_cells[v]) cells.push_back(t);
    sort_unique(cells);
    if (round + 1 < k) {
      verts.clear();
      for (int t : cells)
        for (int v : m_cells[t]) verts.push_back(v);
      sort_unique(verts);
    }
  }
  return cells;
}

std::vector<int> Mesh::boundary_star_faces(int level, int index) const {
  if (level > 2 || !is_boundary(level, index))
    fail(ErrorCode::NotBoundarySimplex, "boundary_star_faces: anchor not on the boundary");
  std::vector<int> verts = simplex_vertices(level, index);
  std::vector<int> out;
  for (int f : m_boundary_faces) {
    const auto& fv = m_faces[f];
    bool contains = true;
    for (int v : verts)
      contains = contains && (fv[0] == v || fv[1] == v || fv[2] == v);
    if (contains) out.push_back(f);
  }
  return out;
}

std::vector<int> Mesh::extended_boundary_star_faces(int level, int index) const {
  if (level > 2 || !is_boundary(level, index))
    fail(ErrorCode::NotBoundarySimplex, "extended_boundary_star_faces: anchor not on the boundary");
  std::vector<int> verts = simplex_vertices(level, index);
  std::vector<int> out;
  for (int f : m_boundary_faces) {
    const auto& fv = m_faces[f];
    for (int v : verts)
      if (fv[0] == v || fv[1] == v || fv[2] == v) {
        out.push_back(f);
        break;
      }
  }
  return out;
}

Mesh build_mesh(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 4>>& tets) {
  Mesh m;
  m.m_vertices = vertices;
  const int nv = static_cast<int>(vertices.size());

  m.m_cells.reserve(tets.size());
  for (auto t : tets) {
    std::sort(t.begin(), t.end());
    for (int v : t)
      if (v < 0 || v >= nv) fail(ErrorCode::InvalidArgument, "build_mesh: vertex index out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[2] == t[3])
      fail(ErrorCode::DegenerateCell, "build_mesh: repeated vertex in cell");
    m.m_cells.push_back(t);
  }
  const int nt = static_cast<int>(m.m_cells.size());

  // edge and face tables (sorted tuples, lexicographic ids)
  {
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> faces;
    for (const auto& c : m.m_cells) {
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) edges.push_back({c[i], c[j]});
      for (int i = 0; i < 4; ++i) {
        std::array<int, 3> f;
        int p = 0;
        for (int j = 0; j < 4; ++j)
          if (j != i) f[p++] = c[j];
        faces.push_back(f);
      }
    }
    sort_unique(edges);
    sort_unique(faces);
    m.m_edges = std::move(edges);
    m.m_faces = std::move(faces);
  }
  const int ne = static_cast<int>(m.m_edges.size());
  const int nf = static_cast<int>(m.m_faces.size());

  // adjacency
  m.m_vertex_cells.assign(nv, {});
  m.m_edge_cells.assign(ne, {});
  m.m_face_cells.assign(nf, {});
  m.m_vertex_edges.assign(nv, {});
  m.m_edge_faces.assign(ne, {});
  m.m_face_edges.resize(nf);
  m.m_cell_edges.resize(nt);
  m.m_cell_faces.resize(nt);

  for (int e = 0; e < ne; ++e) {
    m.m_vertex_edges[m.m_edges[e][0]].push_back(e);
    m.m_vertex_edges[m.m_edges[e][1]].push_back(e);
  }
  for (int f = 0; f < nf; ++f) {
    const auto& fv = m.m_faces[f];
    m.m_face_edges[f] = {m.edge_index(fv[1], fv[2]), m.edge_index(fv[0], fv[2]),
                         m.edge_index(fv[0], fv[1])};
    for (int e : m.m_face_edges[f]) m.m_edge_faces[e].push_back(f);
  }
  for (int t = 0; t < nt; ++t) {
    const auto& c = m.m_cells[t];
    int p = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) m.m_cell_edges[t][p++] = m.edge_index(c[i], c[j]);
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> f;
      int q = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) f[q++] = c[j];
      m.m_cell_faces[t][i] = m.face_index(f[0], f[1], f[2]);
    }
    for (int v : c) m.m_vertex_cells[v].push_back(t);
    for (int e : m.m_cell_edges[t]) m.m_edge_cells[e].push_back(t);
    for (int f : m.m_cell_faces[t]) m.m_face_cells[f].push_back(t);
  }

  for (int v = 0; v < nv; ++v)
    if (m.m_vertex_cells[v].empty())
      fail(ErrorCode::DanglingVertex, "build_mesh: vertex " + std::to_string(v) + " not in any cell");
  for (int f = 0; f < nf; ++f)
    if (m.m_face_cells[f].size() > 2)
      fail(ErrorCode::NonManifold, "build_mesh: face with more than two cofaces");

  // geometry
  m.m_cell_geom.resize(nt);
  for (int t = 0; t < nt; ++t) {
    CellGeometry& g = m.m_cell_geom[t];
    const auto& c = m.m_cells[t];
    for (int i = 0; i < 4; ++i) g.verts.col(i) = vertices[c[i]];
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i) M.col(i) = g.verts.col(i + 1) - g.verts.col(0);
    double det = M.determinant();
    g.volume = std::abs(det) / 6.0;
    g.orientation = (det > 0.0) ? 1.0 : -1.0;
    g.diam = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        g.diam = std::max(g.diam, (g.verts.col(i) - g.verts.col(j)).norm());
    if (g.volume < 1e-14 * g.diam * g.diam * g.diam)
      fail(ErrorCode::DegenerateCell, "build_mesh: cell " + std::to_string(t) + " has zero volume");
    Eigen::Matrix3d Minv = M.inverse();
    for (int i = 0; i < 3; ++i) g.grads.row(i + 1) = Minv.row(i);
    g.grads.row(0) = -(g.grads.row(1) + g.grads.row(2) + g.grads.row(3));
  }

  m.m_face_geom.resize(nf);
  for (int f = 0; f < nf; ++f) {
    FaceGeometry& g = m.m_face_geom[f];
    Vec3 a = vertices[m.m_faces[f][0]];
    Vec3 b = vertices[m.m_faces[f][1]];
    Vec3 c = vertices[m.m_faces[f][2]];
    Vec3 cr = (b - a).cross(c - a);
    g.area = cr.norm() / 2.0;
    g.normal = cr.normalized();
    g.diam = std::max({(b - a).norm(), (c - a).norm(), (c - b).norm()});
  }

  m.m_edge_length.resize(ne);
  for (int e = 0; e < ne; ++e)
    m.m_edge_length[e] = (vertices[m.m_edges[e][1]] - vertices[m.m_edges[e][0]]).norm();

  // boundary classification: a simplex is boundary iff it lies in a
  // boundary face
  m.m_vertex_boundary.assign(nv, 0);
  m.m_edge_boundary.assign(ne, 0);
  m.m_face_boundary.assign(nf, 0);
  for (int f = 0; f < nf; ++f) {
    if (m.m_face_cells[f].size() == 1) {
      m.m_face_boundary[f] = 1;
      m.m_boundary_faces.push_back(f);
      for (int v : m.m_faces[f]) m.m_vertex_boundary[v] = 1;
      for (int e : m.m_face_edges[f]) m.m_edge_boundary[e] = 1;
    }
  }
  for (int v = 0; v < nv; ++v)
    if (m.m_vertex_boundary[v]) m.m_boundary_vertices.push_back(v);
  for (int e = 0; e < ne; ++e)
    if (m.m_edge_boundary[e]) m.m_boundary_edges.push_back(e);

  // closed-surface check: every boundary edge has exactly two boundary faces
  for (int e : m.m_boundary_edges) {
    int count = 0;
    for (int f : m.m_edge_faces[e])
      if (m.m_face_boundary[f]) ++count;
    if (count != 2)
      fail(ErrorCode::NonManifold, "build_mesh: boundary edge without two boundary faces");
  }

  m.m_vertex_h.resize(nv);
  for (int v = 0; v < nv; ++v) {
    std::vector<int> sv;
    for (int t : m.m_vertex_cells[v])
      for (int u : m.m_cells[t]) sv.push_back(u);
    sort_unique(sv);
    double d = 0.0;
    for (size_t i = 0; i < sv.size(); ++i)
      for (size_t j = i + 1; j < sv.size(); ++j)
        d = std::max(d, (vertices[sv[i]] - vertices[sv[j]]).norm());
    m.m_vertex_h[v] = d;
  }

  double rho = 0.0;
  for (int t = 0; t < nt; ++t) {
    const CellGeometry& g = m.m_cell_geom[t];
    double area_sum = 0.0;
    for (int f : m.m_cell_faces[t]) area_sum += m.m_face_geom[f].area;
    double inradius = 3.0 * g.volume / area_sum;
    rho = std::max(rho, g.diam / (2.0 * inradius));
  }
  m.m_shape_regularity = rho;

  return m;
}

Mesh gen_structured_cube(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "gen_structured_cube: n must be >= 1");
  const int s = n + 1;
  std::vector<Vec3> vertices(s * s * s);
  auto vid = [s](int i, int j, int k) { return i + s * (j + s * k); };
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i)
        vertices[vid(i, j, k)] = Vec3(double(i) / n, double(j) / n, double(k) / n);

  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::array<int, 4>> tets;
  tets.reserve(6 * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          int c[3] = {i, j, k};
          std::array<int, 4> t;
          t[0] = vid(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            ++c[p[step]];
            t[step + 1] = vid(c[0], c[1], c[2]);
          }
          tets.push_back(t);
        }
  return build_mesh(vertices, tets);
}

Mesh gen_cube_with_hole() {
  const int n = 3;
  const int s = n + 1;
  std::vector<Vec3> coords;
  std::vector<int> idmap(s * s * s, -1);
  auto lid = [s](int i, int j, int k) { return i + s * (j + s * k); };
  std::vector<std::array<int, 4>> tets;
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto getv = [&](int i, int j, int k) {
    int& id = idmap[lid(i, j, k)];
    if (id < 0) {
      id = static_cast<int>(coords.size());
      coords.push_back(Vec3(i, j, k));
    }
    return id;
  };
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i == 1 && j == 1 && k == 1) continue;  // the hole
        for (const auto& p : perms) {
          int c[3] = {i, j, k};
          std::array<int, 4> t;
          t[0] = getv(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            ++c[p[step]];
            t[step + 1] = getv(c[0], c[1], c[2]);
          }
          tets.push_back(t);
        }
      }
  return build_mesh(coords, tets);
}

std::vector<int> MeshPartitions::near_boundary_cells(int l) const {
  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(in_cells_near_boundary[l].size()); ++t)
    if (in_cells_near_boundary[l][t]) out.push_back(t);
  return out;
}

std::vector<int> MeshPartitions::deep_interior_cells(int l) const {
  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(in_deep_interior[l].size()); ++t)
    if (in_deep_interior[l][t]) out.push_back(t);
  return out;
}

MeshPartitions classify(const Mesh& mesh) {
  MeshPartitions parts;
  const int nt = mesh.n_cells();
  for (int l = 0; l < 3; ++l) {
    parts.in_cells_near_boundary[l].assign(nt, 0);
    parts.in_deep_interior[l].assign(nt, 0);
  }
  for (int t = 0; t < nt; ++t) {
    // T^{l,d}: the cell contains some boundary l-simplex
    for (int v : mesh.cell(t))
      if (mesh.is_boundary(0, v)) parts.in_cells_near_boundary[0][t] = 1;
    for (int e : mesh.edges_of_cell(t))
      if (mesh.is_boundary(1, e)) parts.in_cells_near_boundary[1][t] = 1;
    for (int f : mesh.faces_of_cell(t))
      if (mesh.is_boundary(2, f)) parts.in_cells_near_boundary[2][t] = 1;
  }
  for (int t = 0; t < nt; ++t) {
    std::vector<int> es2 = mesh.extended_star_cells(3, t, 2);
    for (int l = 0; l < 3; ++l) {
      bool touches = false;
      for (int c : es2)
        if (parts.in_cells_near_boundary[l][c]) {
          touches = true;
          break;
        }
      parts.in_deep_interior[l][t] = touches ? 0 : 1;
    }
  }
  return parts;
}

std::vector<int> omega_restricted_extended_star(const Mesh& mesh, const MeshPartitions& parts,
                                                int cell, int k, int l) {
  std::vector<int> es = mesh.extended_star_cells(3, cell, k);
  std::vector<int> out;
  for (int t : es)
    if (parts.in_cells_near_boundary[l][t]) out.push_back(t);
  return out;
}

PatchIndex patch(const Mesh& mesh, int anchor_level, int anchor, PatchKind kind, int k, int l,
                 const MeshPartitions* parts) {
  PatchIndex p;
  p.kind = kind;
  p.anchor_level = anchor_level;
  p.anchor = anchor;
  p.k = k;
  p.l = l;
  switch (kind) {
    case PatchKind::Star: p.cells = mesh.star_cells(anchor_level, anchor); break;
    case PatchKind::ExtendedStar:
      if (k == 0) {
        // es^0(sigma) = sigma; only meaningful as a cell set for cell anchors
        if (anchor_level != 3)
          fail(ErrorCode::InvalidArgument, "patch: es^0 of a non-cell is not a cell set");
        p.cells = {anchor};
      } else {
        p.cells = mesh.extended_star_cells(anchor_level, anchor, k);
      }
      break;
    case PatchKind::BoundaryStar:
      p.boundary_faces = mesh.boundary_star_faces(anchor_level, anchor);
      break;
    case PatchKind::ExtendedBoundaryStar:
      p.boundary_faces = mesh.extended_boundary_star_faces(anchor_level, anchor);
      break;
    case PatchKind::OmegaRestricted: {
      if (anchor_level != 3)
        fail(ErrorCode::InvalidArgument, "patch: omega-restricted stars are anchored at cells");
      if (!parts) fail(ErrorCode::InvalidArgument, "patch: omega-restricted needs partitions");
      p.cells = omega_restricted_extended_star(mesh, *parts, anchor, k, l);
      break;
    }
  }
  return p;
}

bool surface_patch_is_disc(const std::vector<std::array<int, 3>>& triangles) {
  if (triangles.empty()) return false;
  std::set<int> verts;
  std::set<std::array<int, 2>> edges;
  for (const auto& t : triangles) {
    for (int v : t) verts.insert(v);
    edges.insert(sorted2(t[0], t[1]));
    edges.insert(sorted2(t[0], t[2]));
    edges.insert(sorted2(t[1], t[2]));
  }
  long chi = static_cast<long>(verts.size()) - static_cast<long>(edges.size()) +
             static_cast<long>(triangles.size());
  if (chi != 1) return false;
  // connectivity through shared edges
  std::map<std::array<int, 2>, std::vector<int>> edge_tris;
  for (int i = 0; i < static_cast<int>(triangles.size()); ++i) {
    const auto& t = triangles[i];
    edge_tris[sorted2(t[0], t[1])].push_back(i);
    edge_tris[sorted2(t[0], t[2])].push_back(i);
    edge_tris[sorted2(t[1], t[2])].push_back(i);
  }
  std::vector<char> seen(triangles.size(), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    const auto& t = triangles[i];
    for (auto key : {sorted2(t[0], t[1]), sorted2(t[0], t[2]), sorted2(t[1], t[2])})
      for (int j : edge_tris[key])
        if (!seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
  }
  for (char s : seen)
    if (!s) return false;
  return true;
}

bool check_contractibility(const Mesh& mesh, int level, int index) {
  std::vector<int> faces = mesh.extended_boundary_star_faces(level, index);
  std::vector<std::array<int, 3>> tris;
  tris.reserve(faces.size());
  for (int f : faces) tris.push_back(mesh.face(f));
  return surface_patch_is_disc(tris);
}

Mesh parse_mesh(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) fail(ErrorCode::ParseError, "line 1: missing header");
  std::istringstream header(line);
  long nv = -1, nt = -1;
  if (!(header >> nv >> nt) || nv < 0 || nt < 0)
    fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad count line");
  std::vector<Vec3> vertices(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_line()) fail(ErrorCode::ParseError, "line " + std::to_string(lineno + 1) + ": missing vertex");
    std::istringstream ls(line);
    if (!(ls >> vertices[i](0) >> vertices[i](1) >> vertices[i](2)))
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad vertex line");
  }
  std::vector<std::array<int, 4>> tets(nt);
  for (long i = 0; i < nt; ++i) {
    if (!next_line()) fail(ErrorCode::ParseError, "line " + std::to_string(lineno + 1) + ": missing cell");
    std::istringstream ls(line);
    if (!(ls >> tets[i][0] >> tets[i][1] >> tets[i][2] >> tets[i][3]))
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad cell line");
  }
  return build_mesh(vertices, tets);
}

Mesh parse_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return parse_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out.precision(17);
  out << mesh.n_vertices() << " " << mesh.n_cells() << "\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vec3& x = mesh.vertex(v);
    out << x(0) << " " << x(1) << " " << x(2) << "\n";
  }
  for (int t = 0; t < mesh.n_cells(); ++t) {
    const auto& c = mesh.cell(t);
    out << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  }
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path);
  write_mesh(mesh, out);
}

}  // namespace fecp
