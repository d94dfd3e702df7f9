#include "nsfem/spaces.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

namespace nsfem {

namespace {

constexpr int kInterpEdgeDegree = 8;

int vel_local_dim(ElementPairTag tag) {
  switch (tag) {
    case ElementPairTag::BR1P0: return 12;
    case ElementPairTag::P2P0: return 12;
    case ElementPairTag::CCRP1dg: return 14;
  }
  throw std::invalid_argument("unknown element pair");
}

const std::vector<ScalarBasisEval>& scalar_table(ScalarFamily family,
                                                 const TriangleQuadrature& rule) {
  static std::map<std::tuple<int, int, int>, std::vector<ScalarBasisEval>> cache;
  const auto key = std::make_tuple(static_cast<int>(family), rule.degree, rule.size());
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<ScalarBasisEval> tab(rule.size());
    for (int k = 0; k < rule.size(); ++k) eval_scalar(family, rule.point(k), tab[k]);
    it = cache.emplace(key, std::move(tab)).first;
  }
  return it->second;
}

const std::vector<RTBasisEval>& rt_table(RTFamily family,
                                         const TriangleQuadrature& rule) {
  static std::map<std::tuple<int, int, int>, std::vector<RTBasisEval>> cache;
  const auto key = std::make_tuple(static_cast<int>(family), rule.degree, rule.size());
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<RTBasisEval> tab(rule.size());
    for (int k = 0; k < rule.size(); ++k) eval_rt(family, rule.point(k), tab[k]);
    it = cache.emplace(key, std::move(tab)).first;
  }
  return it->second;
}

}  // namespace

ElementPair element_pair(ElementPairTag tag) {
  switch (tag) {
    case ElementPairTag::BR1P0:
      return {tag, RTFamily::RT0, ScalarFamily::P0, "br1"};
    case ElementPairTag::P2P0:
      return {tag, RTFamily::RT0, ScalarFamily::P0, "p2p0"};
    case ElementPairTag::CCRP1dg:
      return {tag, RTFamily::RT1, ScalarFamily::P1dg, "ccr"};
  }
  throw std::invalid_argument("unknown element pair");
}

DofMap build_dofmap(const Mesh& mesh, const MeshTopology& topo, ElementPair pair) {
  const int V = mesh.n_vertices();
  const int E = mesh.n_edges();
  const int T = mesh.n_triangles();

  DofMap dm;
  dm.pair = pair;
  dm.vel_local = vel_local_dim(pair.tag);
  dm.recon_local = rt_dim(pair.recon);
  dm.pressure_local = scalar_dim(pair.pressure) == 1 ? 1 : 3;

  switch (pair.tag) {
    case ElementPairTag::BR1P0: dm.n_velocity = 2 * (V + E); break;
    case ElementPairTag::P2P0: dm.n_velocity = 2 * (V + E); break;
    case ElementPairTag::CCRP1dg: dm.n_velocity = 2 * (V + E) + 2 * T; break;
  }
  dm.n_recon = pair.recon == RTFamily::RT0 ? E : 2 * E + 2 * T;
  dm.n_pressure = pair.pressure == ScalarFamily::P0 ? T : 3 * T;

  dm.cell_vdof.resize(static_cast<std::size_t>(T) * dm.vel_local);
  dm.cell_zdof.resize(static_cast<std::size_t>(T) * dm.recon_local);
  dm.cell_zsign.resize(static_cast<std::size_t>(T) * dm.recon_local);
  dm.cell_qdof.resize(static_cast<std::size_t>(T) * dm.pressure_local);

  for (int t = 0; t < T; ++t) {
    const auto& tri = mesh.triangles[t];
    int* vd = &dm.cell_vdof[static_cast<std::size_t>(t) * dm.vel_local];
    for (int lv = 0; lv < 3; ++lv)
      for (int c = 0; c < 2; ++c) vd[2 * lv + c] = 2 * tri[lv] + c;
    for (int j = 0; j < 3; ++j)
      for (int c = 0; c < 2; ++c)
        vd[6 + 2 * j + c] = 2 * (V + topo.tri_edge[t][j]) + c;
    if (pair.tag == ElementPairTag::CCRP1dg)
      for (int c = 0; c < 2; ++c) vd[12 + c] = 2 * (V + E) + 2 * t + c;

    int* zd = &dm.cell_zdof[static_cast<std::size_t>(t) * dm.recon_local];
    double* zs = &dm.cell_zsign[static_cast<std::size_t>(t) * dm.recon_local];
    if (pair.recon == RTFamily::RT0) {
      for (int j = 0; j < 3; ++j) {
        zd[j] = topo.tri_edge[t][j];
        zs[j] = topo.edge_normal_sign[t][j];
      }
    } else {
      for (int j = 0; j < 3; ++j) {
        const double ns = topo.edge_normal_sign[t][j];
        const double os = topo.edge_orient_sign[t][j];
        zd[2 * j + 0] = 2 * topo.tri_edge[t][j] + 0;
        zs[2 * j + 0] = ns;
        zd[2 * j + 1] = 2 * topo.tri_edge[t][j] + 1;
        zs[2 * j + 1] = ns * os;
      }
      for (int c = 0; c < 2; ++c) {
        zd[6 + c] = 2 * E + 2 * t + c;
        zs[6 + c] = 1.0;
      }
    }

    int* qd = &dm.cell_qdof[static_cast<std::size_t>(t) * dm.pressure_local];
    if (pair.pressure == ScalarFamily::P0) {
      qd[0] = t;
    } else {
      for (int j = 0; j < 3; ++j) qd[j] = 3 * t + j;
    }
  }

  dm.vel_is_dirichlet.assign(dm.n_velocity, 0);
  for (int gv = 0; gv < V; ++gv) {
    if (!topo.vertex_on_boundary[gv]) continue;
    dm.vel_is_dirichlet[2 * gv] = 1;
    dm.vel_is_dirichlet[2 * gv + 1] = 1;
  }
  for (int e : topo.boundary_edges) {
    dm.vel_is_dirichlet[2 * (V + e)] = 1;
    dm.vel_is_dirichlet[2 * (V + e) + 1] = 1;
  }
  for (int i = 0; i < dm.n_velocity; ++i)
    if (dm.vel_is_dirichlet[i]) dm.dirichlet_dofs.push_back(i);
  return dm;
}

AffineMap cell_map(const Mesh& mesh, int cell) {
  const auto& tri = mesh.triangles[cell];
  return affine_from_vertices(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                              mesh.vertices[tri[2]]);
}

void velocity_basis_on_cell(const Mesh& mesh, const MeshTopology& topo,
                            const DofMap& dofmap, int cell, const AffineMap& map,
                            const TriangleQuadrature& rule, VelocityBasis& out) {
  out.nloc = dofmap.vel_local;
  out.nq = rule.size();
  out.value.resize(static_cast<std::size_t>(out.nq) * out.nloc);
  out.grad.resize(static_cast<std::size_t>(out.nq) * out.nloc);

  const ElementPairTag tag = dofmap.pair.tag;
  const ScalarFamily node_family =
      tag == ElementPairTag::BR1P0 ? ScalarFamily::P1 : ScalarFamily::P2;
  const auto& nodal = scalar_table(node_family, rule);
  const int n_nodes = scalar_dim(node_family);

  for (int q = 0; q < out.nq; ++q) {
    const auto& tab = nodal[q];
    for (int node = 0; node < n_nodes; ++node) {
      const double s = tab.values[node];
      const Eigen::Vector2d g = map.push_gradient(tab.gradients.row(node).transpose());
      for (int c = 0; c < 2; ++c) {
        const int i = 2 * node + c;
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        v[c] = s;
        Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
        G.row(c) = g.transpose();
        out.value[static_cast<std::size_t>(q) * out.nloc + i] = v;
        out.grad[static_cast<std::size_t>(q) * out.nloc + i] = G;
      }
    }
  }

  if (tag == ElementPairTag::BR1P0) {
    const auto& bub = scalar_table(ScalarFamily::EdgeBubble, rule);
    for (int q = 0; q < out.nq; ++q) {
      const auto& tab = bub[q];
      for (int j = 0; j < 3; ++j) {
        const double s = tab.values[j];
        const Eigen::Vector2d g = map.push_gradient(tab.gradients.row(j).transpose());
        for (int c = 0; c < 2; ++c) {
          const int i = 6 + 2 * j + c;
          Eigen::Vector2d v = Eigen::Vector2d::Zero();
          v[c] = s;
          Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
          G.row(c) = g.transpose();
          out.value[static_cast<std::size_t>(q) * out.nloc + i] = v;
          out.grad[static_cast<std::size_t>(q) * out.nloc + i] = G;
        }
      }
    }
  } else if (tag == ElementPairTag::CCRP1dg) {
    const auto& bub = scalar_table(ScalarFamily::CellBubble, rule);
    for (int q = 0; q < out.nq; ++q) {
      const auto& tab = bub[q];
      const double s = tab.values[0];
      const Eigen::Vector2d g = map.push_gradient(tab.gradients.row(0).transpose());
      for (int c = 0; c < 2; ++c) {
        const int i = 12 + c;
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        v[c] = s;
        Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
        G.row(c) = g.transpose();
        out.value[static_cast<std::size_t>(q) * out.nloc + i] = v;
        out.grad[static_cast<std::size_t>(q) * out.nloc + i] = G;
      }
    }
  }
}

void recon_basis_on_cell(const Mesh& mesh, const MeshTopology& topo,
                         const DofMap& dofmap, int cell, const AffineMap& map,
                         const TriangleQuadrature& rule, ReconBasis& out) {
  (void)mesh;
  (void)topo;
  out.nloc = dofmap.recon_local;
  out.nq = rule.size();
  out.value.resize(static_cast<std::size_t>(out.nq) * out.nloc);
  out.divergence.resize(static_cast<std::size_t>(out.nq) * out.nloc);

  const auto& tab = rt_table(dofmap.pair.recon, rule);
  for (int q = 0; q < out.nq; ++q) {
    for (int i = 0; i < out.nloc; ++i) {
      const double s = dofmap.zsign(cell, i);
      out.value[static_cast<std::size_t>(q) * out.nloc + i] =
          s * map.piola(tab[q].values.row(i).transpose());
      out.divergence[static_cast<std::size_t>(q) * out.nloc + i] =
          s * map.piola_divergence(tab[q].divergences[i]);
    }
  }
}

void pressure_basis(const DofMap& dofmap, const TriangleQuadrature& rule,
                    PressureBasis& out) {
  out.nloc = dofmap.pressure_local;
  out.nq = rule.size();
  out.value.resize(static_cast<std::size_t>(out.nq) * out.nloc);
  if (dofmap.pair.pressure == ScalarFamily::P0) {
    for (int q = 0; q < out.nq; ++q) out.value[q] = 1.0;
  } else {
    const auto& tab = scalar_table(ScalarFamily::P1, rule);
    for (int q = 0; q < out.nq; ++q)
      for (int j = 0; j < 3; ++j)
        out.value[static_cast<std::size_t>(q) * out.nloc + j] = tab[q].values[j];
  }
}

void velocity_shapes(const Mesh& mesh, const MeshTopology& topo,
                     const DofMap& dofmap, int cell, const AffineMap& map,
                     const Eigen::Vector2d& xhat,
                     std::vector<Eigen::Vector2d>& values,
                     std::vector<Eigen::Matrix2d>* gradients) {
  const ElementPairTag tag = dofmap.pair.tag;
  const ScalarFamily node_family =
      tag == ElementPairTag::BR1P0 ? ScalarFamily::P1 : ScalarFamily::P2;
  ScalarBasisEval nodal;
  eval_scalar(node_family, xhat, nodal);
  const int n_nodes = scalar_dim(node_family);

  values.resize(dofmap.vel_local);
  if (gradients) gradients->resize(dofmap.vel_local);

  auto emit_component = [&](int i, int c, double s, const Eigen::Vector2d& g) {
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
    v[c] = s;
    values[i] = v;
    if (gradients) {
      Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
      G.row(c) = g.transpose();
      (*gradients)[i] = G;
    }
  };

  for (int node = 0; node < n_nodes; ++node) {
    const Eigen::Vector2d g = map.push_gradient(nodal.gradients.row(node).transpose());
    for (int c = 0; c < 2; ++c) emit_component(2 * node + c, c, nodal.values[node], g);
  }
  if (tag == ElementPairTag::BR1P0) {
    ScalarBasisEval bub;
    eval_scalar(ScalarFamily::EdgeBubble, xhat, bub);
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector2d g = map.push_gradient(bub.gradients.row(j).transpose());
      for (int c = 0; c < 2; ++c)
        emit_component(6 + 2 * j + c, c, bub.values[j], g);
    }
  } else if (tag == ElementPairTag::CCRP1dg) {
    ScalarBasisEval bub;
    eval_scalar(ScalarFamily::CellBubble, xhat, bub);
    const Eigen::Vector2d g = map.push_gradient(bub.gradients.row(0).transpose());
    for (int c = 0; c < 2; ++c) emit_component(12 + c, c, bub.values[0], g);
  }
}

void recon_shapes(const Mesh& mesh, const DofMap& dofmap, int cell,
                  const AffineMap& map, const Eigen::Vector2d& xhat,
                  std::vector<Eigen::Vector2d>& values,
                  std::vector<double>* divergences) {
  (void)mesh;
  RTBasisEval tab;
  eval_rt(dofmap.pair.recon, xhat, tab);
  values.resize(dofmap.recon_local);
  if (divergences) divergences->resize(dofmap.recon_local);
  for (int i = 0; i < dofmap.recon_local; ++i) {
    const double s = dofmap.zsign(cell, i);
    values[i] = s * map.piola(tab.values.row(i).transpose());
    if (divergences)
      (*divergences)[i] = s * map.piola_divergence(tab.divergences[i]);
  }
}

void eval_velocity(const Mesh& mesh, const MeshTopology& topo,
                   const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                   int cell, const Eigen::Vector2d& xhat, Eigen::Vector2d* value,
                   Eigen::Matrix2d* gradient) {
  const AffineMap map = cell_map(mesh, cell);
  std::vector<Eigen::Vector2d> vals;
  std::vector<Eigen::Matrix2d> grads;
  velocity_shapes(mesh, topo, dofmap, cell, map, xhat, vals,
                  gradient ? &grads : nullptr);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  for (int i = 0; i < dofmap.vel_local; ++i) {
    const double a = coeffs[dofmap.vdof(cell, i)];
    v += a * vals[i];
    if (gradient) G += a * grads[i];
  }
  if (value) *value = v;
  if (gradient) *gradient = G;
}

double eval_pressure(const Mesh& mesh, const DofMap& dofmap,
                     const Eigen::VectorXd& coeffs, int cell,
                     const Eigen::Vector2d& xhat) {
  (void)mesh;
  if (dofmap.pair.pressure == ScalarFamily::P0) return coeffs[dofmap.qdof(cell, 0)];
  ScalarBasisEval tab;
  eval_scalar(ScalarFamily::P1, xhat, tab);
  double s = 0.0;
  for (int j = 0; j < 3; ++j) s += coeffs[dofmap.qdof(cell, j)] * tab.values[j];
  return s;
}

void eval_recon(const Mesh& mesh, const MeshTopology& topo, const DofMap& dofmap,
                const Eigen::VectorXd& coeffs, int cell,
                const Eigen::Vector2d& xhat, Eigen::Vector2d* value,
                double* divergence) {
  (void)topo;
  const AffineMap map = cell_map(mesh, cell);
  std::vector<Eigen::Vector2d> vals;
  std::vector<double> divs;
  recon_shapes(mesh, dofmap, cell, map, xhat, vals, divergence ? &divs : nullptr);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  double dv = 0.0;
  for (int i = 0; i < dofmap.recon_local; ++i) {
    const double a = coeffs[dofmap.zdof(cell, i)];
    v += a * vals[i];
    if (divergence) dv += a * divs[i];
  }
  if (value) *value = v;
  if (divergence) *divergence = dv;
}

namespace {

// Bubble coefficients match the edge mean of each component, so interpolants
// reproduce every edge integral of g, in particular the normal flux.
Eigen::Vector2d edge_bubble_mean_coeff(const Mesh& mesh, int e,
                                       const VectorField& g) {
  const Edge& edge = mesh.edges[e];
  const Eigen::Vector2d a = mesh.vertices[edge.a];
  const Eigen::Vector2d b = mesh.vertices[edge.b];
  const EdgeQuadrature& rule = edge_quadrature(kInterpEdgeDegree);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int k = 0; k < rule.size(); ++k) {
    const Eigen::Vector2d x = a + rule.points[k] * (b - a);
    mean += rule.weights[k] * g(x);
  }
  const Eigen::Vector2d linear_mean = 0.5 * (g(a) + g(b));
  return 6.0 * (mean - linear_mean);
}

Eigen::VectorXd interpolate_impl(const Mesh& mesh, const MeshTopology& topo,
                                 const DofMap& dofmap, const VectorField& g,
                                 bool boundary_only) {
  const int V = mesh.n_vertices();
  const int E = mesh.n_edges();
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(dofmap.n_velocity);
  const ElementPairTag tag = dofmap.pair.tag;

  for (int gv = 0; gv < V; ++gv) {
    if (boundary_only && !topo.vertex_on_boundary[gv]) continue;
    const Eigen::Vector2d gval = g(mesh.vertices[gv]);
    coeffs[2 * gv] = gval[0];
    coeffs[2 * gv + 1] = gval[1];
  }

  for (int e = 0; e < E; ++e) {
    if (boundary_only && !mesh.edges[e].boundary) continue;
    if (tag == ElementPairTag::BR1P0) {
      const Eigen::Vector2d coeff = edge_bubble_mean_coeff(mesh, e, g);
      coeffs[2 * (V + e)] = coeff[0];
      coeffs[2 * (V + e) + 1] = coeff[1];
    } else {
      const Eigen::Vector2d mid =
          0.5 * (mesh.vertices[mesh.edges[e].a] + mesh.vertices[mesh.edges[e].b]);
      const Eigen::Vector2d gval = g(mid);
      coeffs[2 * (V + e)] = gval[0];
      coeffs[2 * (V + e) + 1] = gval[1];
    }
  }

  if (tag == ElementPairTag::CCRP1dg && !boundary_only) {
    const Eigen::Vector2d chat(1.0 / 3.0, 1.0 / 3.0);
    ScalarBasisEval p2;
    eval_scalar(ScalarFamily::P2, chat, p2);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const AffineMap map = cell_map(mesh, t);
      const Eigen::Vector2d center = map.apply(chat);
      Eigen::Vector2d nodal_part = Eigen::Vector2d::Zero();
      for (int node = 0; node < 6; ++node)
        for (int c = 0; c < 2; ++c)
          nodal_part[c] += coeffs[dofmap.vdof(t, 2 * node + c)] * p2.values[node];
      const Eigen::Vector2d gap = g(center) - nodal_part;
      ScalarBasisEval bub;
      eval_scalar(ScalarFamily::CellBubble, chat, bub);
      for (int c = 0; c < 2; ++c)
        coeffs[dofmap.vdof(t, 12 + c)] = gap[c] / bub.values[0];
    }
  }
  return coeffs;
}

}  // namespace

Eigen::VectorXd interpolate_velocity(const Mesh& mesh, const MeshTopology& topo,
                                     const DofMap& dofmap, const VectorField& g) {
  return interpolate_impl(mesh, topo, dofmap, g, false);
}

Eigen::VectorXd interpolate_boundary(const Mesh& mesh, const MeshTopology& topo,
                                     const DofMap& dofmap, const VectorField& g) {
  return interpolate_impl(mesh, topo, dofmap, g, true);
}

Eigen::VectorXd fortin_interpolate(const Mesh& mesh, const MeshTopology& topo,
                                   const DofMap& dofmap, const VectorField& g) {
  (void)topo;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(dofmap.n_recon);
  const int edge_moments = dofmap.pair.recon == RTFamily::RT0 ? 1 : 2;
  const TriangleQuadrature& vol_rule = triangle_quadrature(10);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    auto pulled = [&](const Eigen::Vector2d& xhat) -> Eigen::Vector2d {
      return map.det * (map.Jinv * g(map.apply(xhat)));
    };
    int i = 0;
    for (int j = 0; j < 3; ++j)
      for (int q = 0; q < edge_moments; ++q, ++i)
        z[dofmap.zdof(t, i)] = dofmap.zsign(t, i) * rt_edge_moment(j, q, pulled, 10);
    if (dofmap.pair.recon == RTFamily::RT1) {
      Eigen::Vector2d cell_int = Eigen::Vector2d::Zero();
      for (int k = 0; k < vol_rule.size(); ++k)
        cell_int += vol_rule.weights[k] * pulled(vol_rule.point(k));
      for (int c = 0; c < 2; ++c)
        z[dofmap.zdof(t, 6 + c)] = dofmap.zsign(t, 6 + c) * cell_int[c];
    }
  }
  return z;
}

double compatible_divergence_datum(const Mesh& mesh, const MeshTopology& topo,
                                   const DofMap& dofmap,
                                   const Eigen::VectorXd& vel_coeffs) {
  const TriangleQuadrature& rule = triangle_quadrature(6);
  VelocityBasis basis;
  double integral = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    velocity_basis_on_cell(mesh, topo, dofmap, t, map, rule, basis);
    for (int q = 0; q < rule.size(); ++q) {
      double dv = 0.0;
      for (int i = 0; i < basis.nloc; ++i)
        dv += vel_coeffs[dofmap.vdof(t, i)] * basis.grd(q, i).trace();
      integral += rule.weights[q] * map.det * dv;
    }
  }
  return integral;
}

}  // namespace nsfem
