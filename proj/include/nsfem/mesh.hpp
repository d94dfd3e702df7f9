#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsfem {

class MeshError : public std::runtime_error {
public:
  MeshError(const std::string& what, int a, int b)
      : std::runtime_error(what + " (edge " + std::to_string(a) + "-" +
                           std::to_string(b) + ")"),
        a_(a), b_(b) {}
  int edge_a() const { return a_; }
  int edge_b() const { return b_; }

private:
  int a_, b_;
};

struct Edge {
  int a = -1, b = -1;        // vertex ids with a < b
  int tri[2] = {-1, -1};     // adjacent triangles, lower index first
  bool boundary = false;
  // Unit normal fixed globally: it points out of tri[0], which on interior
  // edges means from the lower-numbered into the higher-numbered triangle,
  // and on boundary edges out of the domain.
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
};

/// Conforming triangulation of the unit square. Triangles are
/// counterclockwise; edges are sorted lexicographically by vertex pair.
struct Mesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Edge> edges;
  std::vector<int> parent;   // triangle -> parent in the previous mesh; empty at level 0
  int level = 0;
  double h = 1.0;            // nominal mesh size 2^-level
  double h_max = 0.0;        // largest triangle diameter

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
};

/// Recomputes edges, adjacency, normals, and h_max from the triangle list.
/// Throws MeshError, naming the offending vertex pair, when some edge is
/// shared by more than two triangles.
void rebuild_edges(Mesh& mesh);

/// Four corners plus the center, split along both diagonals into four
/// counterclockwise triangles.
Mesh unit_square_initial();

/// Uniform red refinement: every triangle splits into four congruent
/// children (children of triangle t occupy slots 4t .. 4t+3).
Mesh refine_red(const Mesh& mesh);

/// max over triangles of diameter / (2 area / perimeter).
double chunkiness(const Mesh& mesh);

/// Incidence tables between triangles and the global edge list.
struct MeshTopology {
  // tri_edge[t][j]: global edge opposite local vertex j.
  std::vector<std::array<int, 3>> tri_edge;
  // +1 when the global edge normal is outward for this triangle.
  std::vector<std::array<std::int8_t, 3>> edge_normal_sign;
  // +1 when the local traversal (j+1) -> (j+2) runs from edge.a to edge.b.
  std::vector<std::array<std::int8_t, 3>> edge_orient_sign;
  std::vector<char> vertex_on_boundary;
  std::vector<int> boundary_edges;
};

/// Builds incidence; throws MeshError on nonconforming input (an edge with
/// more than two triangles) and std::invalid_argument on negative
/// orientation.
MeshTopology build_topology(const Mesh& mesh);

/// Plain-text dump: header "V T E", vertex lines "x y", triangle lines
/// "i j k", edge lines "a b boundary_flag".
void write_mesh_text(const Mesh& mesh, std::ostream& os);

}  // namespace nsfem
