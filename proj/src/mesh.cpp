#include "nsfem/mesh.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace nsfem {

namespace {

double signed_area2(const Mesh& mesh, const std::array<int, 3>& t) {
  const Eigen::Vector2d d1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
  const Eigen::Vector2d d2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
  return d1.x() * d2.y() - d1.y() * d2.x();
}

Eigen::Vector2d outward_normal(const Mesh& mesh, int t, int va, int vb) {
  // va -> vb must appear in the triangle's counterclockwise traversal; the
  // outward direction is then the clockwise rotation of the edge vector.
  const auto& tri = mesh.triangles[t];
  for (int j = 0; j < 3; ++j) {
    if (tri[j] == va && tri[(j + 1) % 3] == vb) {
      const Eigen::Vector2d d = mesh.vertices[vb] - mesh.vertices[va];
      return Eigen::Vector2d(d.y(), -d.x()).normalized();
    }
    if (tri[j] == vb && tri[(j + 1) % 3] == va) {
      const Eigen::Vector2d d = mesh.vertices[va] - mesh.vertices[vb];
      return Eigen::Vector2d(d.y(), -d.x()).normalized();
    }
  }
  throw MeshError("edge not found in triangle", va, vb);
}

}  // namespace

void rebuild_edges(Mesh& mesh) {
  std::map<std::pair<int, int>, std::array<int, 2>> adj;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int j = 0; j < 3; ++j) {
      const int va = tri[(j + 1) % 3], vb = tri[(j + 2) % 3];
      const std::pair<int, int> key{std::min(va, vb), std::max(va, vb)};
      auto [it, fresh] = adj.try_emplace(key, std::array<int, 2>{t, -1});
      if (!fresh) {
        if (it->second[1] != -1)
          throw MeshError("nonconforming mesh: edge has more than two triangles",
                          key.first, key.second);
        it->second[1] = t;
      }
    }
  }
  mesh.edges.clear();
  mesh.edges.reserve(adj.size());
  for (const auto& [key, tris] : adj) {
    Edge e;
    e.a = key.first;
    e.b = key.second;
    e.tri[0] = tris[0];
    e.tri[1] = tris[1];
    e.boundary = (tris[1] == -1);
    e.normal = outward_normal(mesh, e.tri[0], e.a, e.b);
    mesh.edges.push_back(e);
  }

  mesh.h_max = 0.0;
  for (const auto& tri : mesh.triangles)
    for (int j = 0; j < 3; ++j)
      mesh.h_max = std::max(
          mesh.h_max,
          (mesh.vertices[tri[j]] - mesh.vertices[tri[(j + 1) % 3]]).norm());
}

Mesh unit_square_initial() {
  Mesh mesh;
  mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.5, 0.5}};
  mesh.triangles = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {0, 4, 3}};
  mesh.level = 0;
  mesh.h = 1.0;
  rebuild_edges(mesh);
  return mesh;
}

Mesh refine_red(const Mesh& mesh) {
  Mesh fine;
  fine.vertices = mesh.vertices;
  fine.vertices.reserve(mesh.n_vertices() + mesh.n_edges());
  for (const Edge& e : mesh.edges)
    fine.vertices.push_back(0.5 * (mesh.vertices[e.a] + mesh.vertices[e.b]));

  std::map<std::pair<int, int>, int> midpoint;
  for (int e = 0; e < mesh.n_edges(); ++e)
    midpoint[{mesh.edges[e].a, mesh.edges[e].b}] = mesh.n_vertices() + e;

  auto mid = [&](int va, int vb) {
    return midpoint.at({std::min(va, vb), std::max(va, vb)});
  };

  fine.triangles.reserve(4 * mesh.n_triangles());
  fine.parent.reserve(4 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const int v0 = tri[0], v1 = tri[1], v2 = tri[2];
    const int m01 = mid(v0, v1), m12 = mid(v1, v2), m20 = mid(v2, v0);
    fine.triangles.push_back({v0, m01, m20});
    fine.triangles.push_back({m01, v1, m12});
    fine.triangles.push_back({m20, m12, v2});
    fine.triangles.push_back({m01, m12, m20});
    for (int c = 0; c < 4; ++c) fine.parent.push_back(t);
  }

  fine.level = mesh.level + 1;
  fine.h = 0.5 * mesh.h;
  rebuild_edges(fine);
  return fine;
}

double chunkiness(const Mesh& mesh) {
  double worst = 0.0;
  for (const auto& tri : mesh.triangles) {
    double diam = 0.0, perim = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double len =
          (mesh.vertices[tri[j]] - mesh.vertices[tri[(j + 1) % 3]]).norm();
      diam = std::max(diam, len);
      perim += len;
    }
    const double area = 0.5 * std::abs(signed_area2(mesh, tri));
    const double rho = 2.0 * area / perim;
    worst = std::max(worst, diam / rho);
  }
  return worst;
}

MeshTopology build_topology(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> edge_id;
  for (int e = 0; e < mesh.n_edges(); ++e)
    edge_id[{mesh.edges[e].a, mesh.edges[e].b}] = e;

  MeshTopology topo;
  topo.tri_edge.resize(mesh.n_triangles());
  topo.edge_normal_sign.resize(mesh.n_triangles());
  topo.edge_orient_sign.resize(mesh.n_triangles());
  topo.vertex_on_boundary.assign(mesh.n_vertices(), 0);

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (signed_area2(mesh, mesh.triangles[t]) <= 0.0)
      throw std::invalid_argument("build_topology: triangle " +
                                  std::to_string(t) +
                                  " is not counterclockwise");
    const auto& tri = mesh.triangles[t];
    for (int j = 0; j < 3; ++j) {
      const int va = tri[(j + 1) % 3], vb = tri[(j + 2) % 3];
      const auto key = std::minmax(va, vb);
      const auto it = edge_id.find({key.first, key.second});
      if (it == edge_id.end())
        throw MeshError("build_topology: missing edge", key.first, key.second);
      const Edge& e = mesh.edges[it->second];
      topo.tri_edge[t][j] = it->second;
      const Eigen::Vector2d out = outward_normal(mesh, t, va, vb);
      topo.edge_normal_sign[t][j] = out.dot(e.normal) > 0.0 ? 1 : -1;
      topo.edge_orient_sign[t][j] = (va == e.a) ? 1 : -1;
    }
  }

  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (mesh.edges[e].boundary) {
      topo.boundary_edges.push_back(e);
      topo.vertex_on_boundary[mesh.edges[e].a] = 1;
      topo.vertex_on_boundary[mesh.edges[e].b] = 1;
    }
  }
  return topo;
}

void write_mesh_text(const Mesh& mesh, std::ostream& os) {
  os << mesh.n_vertices() << ' ' << mesh.n_triangles() << ' ' << mesh.n_edges()
     << '\n';
  os.precision(17);
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : mesh.triangles)
    os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.edges)
    os << e.a << ' ' << e.b << ' ' << (e.boundary ? 1 : 0) << '\n';
}

}  // namespace nsfem
