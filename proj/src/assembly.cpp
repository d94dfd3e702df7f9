#include "nsfem/assembly.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsfem {

namespace {

void validate_problem(const Problem& pr, const char* who) {
  if (!pr.mesh || !pr.topo || !pr.dofmap)
    throw std::invalid_argument(std::string(who) + ": problem is unbound");
  const int nv = pr.dofmap->n_velocity;
  if (pr.load.size() != 0 && pr.load.size() != nv)
    throw std::invalid_argument(std::string(who) + ": load size " +
                                std::to_string(pr.load.size()) + " != " +
                                std::to_string(nv));
  if (pr.boundary_values.size() != 0 && pr.boundary_values.size() != nv)
    throw std::invalid_argument(std::string(who) + ": boundary data size " +
                                std::to_string(pr.boundary_values.size()) +
                                " != " + std::to_string(nv));
}

void validate_state(const Problem& pr, const Eigen::VectorXd& state,
                    const char* who) {
  if (state.size() != pr.dofmap->total())
    throw std::invalid_argument(std::string(who) + ": state size " +
                                std::to_string(state.size()) + " != " +
                                std::to_string(pr.dofmap->total()));
}

double bc_value(const Problem& pr, int i) {
  return pr.boundary_values.size() ? pr.boundary_values[i] : 0.0;
}

struct EdgeGeometry {
  Eigen::Vector2d a, b, n;
  double len = 0.0;
};

EdgeGeometry edge_geometry(const Mesh& mesh, int e) {
  const Edge& edge = mesh.edges[e];
  EdgeGeometry g;
  g.a = mesh.vertices[edge.a];
  g.b = mesh.vertices[edge.b];
  g.n = edge.normal;
  g.len = (g.b - g.a).norm();
  return g;
}

}  // namespace

Eigen::VectorXd zero_state(const Problem& problem) {
  validate_problem(problem, "zero_state");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.dofmap->total());
  for (int i : problem.dofmap->dirichlet_dofs) x[i] = bc_value(problem, i);
  return x;
}

Eigen::VectorXd assemble_residual(const Problem& pr, const Eigen::VectorXd& x) {
  validate_problem(pr, "assemble_residual");
  validate_state(pr, x, "assemble_residual");
  const Mesh& mesh = *pr.mesh;
  const MeshTopology& topo = *pr.topo;
  const DofMap& dm = *pr.dofmap;
  const int nv = dm.n_velocity;
  const int nz = dm.n_recon;
  const int oz = dm.recon_offset();
  const int oq = dm.pressure_offset();
  const int ol = dm.multiplier_index();
  const double lambda = x[ol];
  const bool recon = pr.mode == ConvectiveMode::Reconstruction;
  const bool temam = pr.mode == ConvectiveMode::Temam;

  Eigen::VectorXd R = Eigen::VectorXd::Zero(dm.total());
  if (pr.load.size()) R.head(nv) -= pr.load;

  const TriangleQuadrature& rule = triangle_quadrature(pr.volume_degree);
  VelocityBasis vb;
  ReconBasis zb;
  PressureBasis qb;
  pressure_basis(dm, rule, qb);
  std::vector<double> vloc(dm.vel_local), zloc(dm.recon_local),
      qloc(dm.pressure_local);

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    velocity_basis_on_cell(mesh, topo, dm, t, map, rule, vb);
    if (recon) recon_basis_on_cell(mesh, topo, dm, t, map, rule, zb);
    for (int i = 0; i < dm.vel_local; ++i) vloc[i] = x[dm.vdof(t, i)];
    if (recon)
      for (int i = 0; i < dm.recon_local; ++i) zloc[i] = x[oz + dm.zdof(t, i)];
    for (int m = 0; m < dm.pressure_local; ++m) qloc[m] = x[oq + dm.qdof(t, m)];

    for (int k = 0; k < rule.size(); ++k) {
      const double w = rule.weights[k] * map.det;
      Eigen::Vector2d vval = Eigen::Vector2d::Zero();
      Eigen::Matrix2d vgrad = Eigen::Matrix2d::Zero();
      for (int i = 0; i < dm.vel_local; ++i) {
        vval += vloc[i] * vb.val(k, i);
        vgrad += vloc[i] * vb.grd(k, i);
      }
      double qval = 0.0;
      for (int m = 0; m < dm.pressure_local; ++m)
        qval += qloc[m] * qb.val(k, m);
      Eigen::Vector2d zval = Eigen::Vector2d::Zero();
      if (recon)
        for (int i = 0; i < dm.recon_local; ++i) zval += zloc[i] * zb.val(k, i);

      const Tensor2 S = stress(pr.law, vgrad);
      const Eigen::Vector2d vgv = vgrad * vval;
      for (int i = 0; i < dm.vel_local; ++i) {
        const Eigen::Vector2d& wi = vb.val(k, i);
        const Eigen::Matrix2d& gi = vb.grd(k, i);
        double val = S.cwiseProduct(gi).sum() - qval * gi.trace();
        if (recon)
          val -= vval.dot(gi * zval);
        else if (temam)
          val += 0.5 * (wi.dot(vgv) - vval.dot(gi * vval) +
                        pr.g1 * vval.dot(wi));
        R[dm.vdof(t, i)] += w * val;
      }
      const double divv = vgrad.trace();
      for (int m = 0; m < dm.pressure_local; ++m)
        R[oq + dm.qdof(t, m)] += w * (divv - pr.g1 + lambda) * qb.val(k, m);
      R[ol] += w * qval;
      if (recon && dm.pair.recon == RTFamily::RT1)
        for (int c = 0; c < 2; ++c)
          R[oz + 2 * mesh.n_edges() + 2 * t + c] += w * (zval[c] - vval[c]);
    }
  }

  if (recon) {
    const EdgeQuadrature& erule = edge_quadrature(pr.edge_degree);
    const int per_edge = dm.pair.recon == RTFamily::RT0 ? 1 : 2;
    std::vector<Eigen::Vector2d> vshapes, zshapes;
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const EdgeGeometry g = edge_geometry(mesh, e);
      const int t0 = mesh.edges[e].tri[0];
      const AffineMap map0 = cell_map(mesh, t0);
      for (int k = 0; k < erule.size(); ++k) {
        const double s = erule.points[k];
        const Eigen::Vector2d xhat = map0.pull(g.a + s * (g.b - g.a));
        velocity_shapes(mesh, topo, dm, t0, map0, xhat, vshapes, nullptr);
        recon_shapes(mesh, dm, t0, map0, xhat, zshapes, nullptr);
        Eigen::Vector2d diff = Eigen::Vector2d::Zero();
        for (int i = 0; i < dm.recon_local; ++i)
          diff += x[oz + dm.zdof(t0, i)] * zshapes[i];
        for (int i = 0; i < dm.vel_local; ++i)
          diff -= x[dm.vdof(t0, i)] * vshapes[i];
        const double flux = diff.dot(g.n);
        for (int q = 0; q < per_edge; ++q) {
          const double leg = q == 0 ? 1.0 : 2.0 * s - 1.0;
          R[oz + per_edge * e + q] += g.len * erule.weights[k] * leg * flux;
        }
      }
    }
  } else {
    R.segment(oz, nz) = x.segment(oz, nz);
  }

  for (int i : dm.dirichlet_dofs) R[i] = x[i] - bc_value(pr, i);
  return R;
}

Eigen::SparseMatrix<double> assemble_jacobian(const Problem& pr,
                                              const Eigen::VectorXd& x) {
  validate_problem(pr, "assemble_jacobian");
  validate_state(pr, x, "assemble_jacobian");
  const Mesh& mesh = *pr.mesh;
  const MeshTopology& topo = *pr.topo;
  const DofMap& dm = *pr.dofmap;
  const int nz = dm.n_recon;
  const int oz = dm.recon_offset();
  const int oq = dm.pressure_offset();
  const int ol = dm.multiplier_index();
  const bool recon = pr.mode == ConvectiveMode::Reconstruction;
  const bool temam = pr.mode == ConvectiveMode::Temam;
  const int lv = dm.vel_local, lz = dm.recon_local, lq = dm.pressure_local;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.n_triangles()) *
                    (lv + lq + 3) * (lv + lz + lq + 1) +
                static_cast<std::size_t>(nz) * (lv + lz) + dm.total());

  const TriangleQuadrature& rule = triangle_quadrature(pr.volume_degree);
  VelocityBasis vb;
  ReconBasis zb;
  PressureBasis qb;
  pressure_basis(dm, rule, qb);
  std::vector<double> vloc(lv), zloc(lz);

  Eigen::MatrixXd Avv(lv, lv), Avz(lv, lz), Avq(lv, lq), Aqv(lq, lv);
  Eigen::VectorXd qmass(lq);
  Eigen::MatrixXd Bzv(2, lv), Bzz(2, lz);

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    velocity_basis_on_cell(mesh, topo, dm, t, map, rule, vb);
    if (recon) recon_basis_on_cell(mesh, topo, dm, t, map, rule, zb);
    for (int i = 0; i < lv; ++i) vloc[i] = x[dm.vdof(t, i)];
    if (recon)
      for (int i = 0; i < lz; ++i) zloc[i] = x[oz + dm.zdof(t, i)];

    Avv.setZero();
    Avz.setZero();
    Avq.setZero();
    Aqv.setZero();
    qmass.setZero();
    Bzv.setZero();
    Bzz.setZero();

    for (int k = 0; k < rule.size(); ++k) {
      const double w = rule.weights[k] * map.det;
      Eigen::Vector2d vval = Eigen::Vector2d::Zero();
      Eigen::Matrix2d vgrad = Eigen::Matrix2d::Zero();
      for (int i = 0; i < lv; ++i) {
        vval += vloc[i] * vb.val(k, i);
        vgrad += vloc[i] * vb.grd(k, i);
      }
      Eigen::Vector2d zval = Eigen::Vector2d::Zero();
      if (recon)
        for (int i = 0; i < lz; ++i) zval += zloc[i] * zb.val(k, i);

      for (int j = 0; j < lv; ++j) {
        const Eigen::Vector2d& pj = vb.val(k, j);
        const Eigen::Matrix2d& Gj = vb.grd(k, j);
        const Tensor2 DS = stress_tangent(pr.law, vgrad, Gj);
        for (int i = 0; i < lv; ++i) {
          const Eigen::Vector2d& wi = vb.val(k, i);
          const Eigen::Matrix2d& gi = vb.grd(k, i);
          double val = DS.cwiseProduct(gi).sum();
          if (recon)
            val -= pj.dot(gi * zval);
          else if (temam)
            val += 0.5 * (wi.dot(Gj * vval + vgrad * pj) -
                          (pj.dot(gi * vval) + vval.dot(gi * pj)) +
                          pr.g1 * pj.dot(wi));
          Avv(i, j) += w * val;
        }
        const double divj = Gj.trace();
        for (int m = 0; m < lq; ++m) Aqv(m, j) += w * divj * qb.val(k, m);
        if (recon && dm.pair.recon == RTFamily::RT1)
          for (int c = 0; c < 2; ++c) Bzv(c, j) -= w * pj[c];
      }
      if (recon) {
        for (int kz = 0; kz < lz; ++kz) {
          const Eigen::Vector2d& zk = zb.val(k, kz);
          for (int i = 0; i < lv; ++i)
            Avz(i, kz) -= w * vval.dot(vb.grd(k, i) * zk);
          if (dm.pair.recon == RTFamily::RT1)
            for (int c = 0; c < 2; ++c) Bzz(c, kz) += w * zk[c];
        }
      }
      for (int m = 0; m < lq; ++m) {
        const double psi = qb.val(k, m);
        qmass[m] += w * psi;
        for (int i = 0; i < lv; ++i) Avq(i, m) -= w * psi * vb.grd(k, i).trace();
      }
    }

    for (int i = 0; i < lv; ++i) {
      const int gi = dm.vdof(t, i);
      if (dm.vel_is_dirichlet[gi]) continue;
      for (int j = 0; j < lv; ++j)
        trips.emplace_back(gi, dm.vdof(t, j), Avv(i, j));
      if (recon)
        for (int kz = 0; kz < lz; ++kz)
          trips.emplace_back(gi, oz + dm.zdof(t, kz), Avz(i, kz));
      for (int m = 0; m < lq; ++m)
        trips.emplace_back(gi, oq + dm.qdof(t, m), Avq(i, m));
    }
    for (int m = 0; m < lq; ++m) {
      const int gm = oq + dm.qdof(t, m);
      for (int j = 0; j < lv; ++j) trips.emplace_back(gm, dm.vdof(t, j), Aqv(m, j));
      trips.emplace_back(gm, ol, qmass[m]);
      trips.emplace_back(ol, gm, qmass[m]);
    }
    if (recon && dm.pair.recon == RTFamily::RT1) {
      for (int c = 0; c < 2; ++c) {
        const int gr = oz + 2 * mesh.n_edges() + 2 * t + c;
        for (int j = 0; j < lv; ++j) trips.emplace_back(gr, dm.vdof(t, j), Bzv(c, j));
        for (int kz = 0; kz < lz; ++kz)
          trips.emplace_back(gr, oz + dm.zdof(t, kz), Bzz(c, kz));
      }
    }
  }

  if (recon) {
    const EdgeQuadrature& erule = edge_quadrature(pr.edge_degree);
    const int per_edge = dm.pair.recon == RTFamily::RT0 ? 1 : 2;
    std::vector<Eigen::Vector2d> vshapes, zshapes;
    Eigen::MatrixXd Ev(per_edge, lv), Ez(per_edge, lz);
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const EdgeGeometry g = edge_geometry(mesh, e);
      const int t0 = mesh.edges[e].tri[0];
      const AffineMap map0 = cell_map(mesh, t0);
      Ev.setZero();
      Ez.setZero();
      for (int k = 0; k < erule.size(); ++k) {
        const double s = erule.points[k];
        const Eigen::Vector2d xhat = map0.pull(g.a + s * (g.b - g.a));
        velocity_shapes(mesh, topo, dm, t0, map0, xhat, vshapes, nullptr);
        recon_shapes(mesh, dm, t0, map0, xhat, zshapes, nullptr);
        for (int q = 0; q < per_edge; ++q) {
          const double c = g.len * erule.weights[k] * (q == 0 ? 1.0 : 2.0 * s - 1.0);
          for (int j = 0; j < lv; ++j) Ev(q, j) -= c * vshapes[j].dot(g.n);
          for (int i = 0; i < lz; ++i) Ez(q, i) += c * zshapes[i].dot(g.n);
        }
      }
      for (int q = 0; q < per_edge; ++q) {
        const int gr = oz + per_edge * e + q;
        for (int j = 0; j < lv; ++j) trips.emplace_back(gr, dm.vdof(t0, j), Ev(q, j));
        for (int i = 0; i < lz; ++i)
          trips.emplace_back(gr, oz + dm.zdof(t0, i), Ez(q, i));
      }
    }
  } else {
    for (int r = 0; r < nz; ++r) trips.emplace_back(oz + r, oz + r, 1.0);
  }

  for (int i : dm.dirichlet_dofs) trips.emplace_back(i, i, 1.0);

  Eigen::SparseMatrix<double> A(dm.total(), dm.total());
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd manufactured_rhs(const Mesh& mesh, const MeshTopology& topo,
                                 const DofMap& dm, const FlowLaw& law,
                                 const ExactFields& exact,
                                 bool include_convection, int degree) {
  Eigen::VectorXd L = Eigen::VectorXd::Zero(dm.n_velocity);
  const TriangleQuadrature& rule = triangle_quadrature(degree);
  VelocityBasis vb;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    velocity_basis_on_cell(mesh, topo, dm, t, map, rule, vb);
    for (int k = 0; k < rule.size(); ++k) {
      const double w = rule.weights[k] * map.det;
      const Eigen::Vector2d xq = map.apply(rule.point(k));
      const Tensor2 S = stress(law, exact.gradient(xq));
      const Eigen::Vector2d v = exact.velocity(xq);
      const double q = exact.pressure(xq);
      for (int i = 0; i < dm.vel_local; ++i) {
        const Eigen::Matrix2d& gi = vb.grd(k, i);
        double val = S.cwiseProduct(gi).sum() - q * gi.trace();
        if (include_convection) val -= v.dot(gi * v);
        L[dm.vdof(t, i)] += w * val;
      }
    }
  }
  return L;
}

double temam_form(const Mesh& mesh, const MeshTopology& topo, const DofMap& dm,
                  const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                  const Eigen::VectorXd& w, double g1, int degree) {
  const TriangleQuadrature& rule = triangle_quadrature(degree);
  VelocityBasis vb;
  double sum = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    velocity_basis_on_cell(mesh, topo, dm, t, map, rule, vb);
    for (int k = 0; k < rule.size(); ++k) {
      Eigen::Vector2d uval = Eigen::Vector2d::Zero(), vval = uval, wval = uval;
      Eigen::Matrix2d vg = Eigen::Matrix2d::Zero(), wg = vg;
      for (int i = 0; i < dm.vel_local; ++i) {
        const int gi = dm.vdof(t, i);
        uval += u[gi] * vb.val(k, i);
        vval += v[gi] * vb.val(k, i);
        wval += w[gi] * vb.val(k, i);
        vg += v[gi] * vb.grd(k, i);
        wg += w[gi] * vb.grd(k, i);
      }
      sum += rule.weights[k] * map.det *
             (0.5 * wval.dot(vg * uval) - 0.5 * vval.dot(wg * uval) +
              0.5 * g1 * uval.dot(wval));
    }
  }
  return sum;
}

double recon_convective_form(const Mesh& mesh, const MeshTopology& topo,
                             const DofMap& dm, const Eigen::VectorXd& a,
                             const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                             int degree) {
  const TriangleQuadrature& rule = triangle_quadrature(degree);
  VelocityBasis vb;
  ReconBasis zb;
  double sum = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    velocity_basis_on_cell(mesh, topo, dm, t, map, rule, vb);
    recon_basis_on_cell(mesh, topo, dm, t, map, rule, zb);
    for (int k = 0; k < rule.size(); ++k) {
      Eigen::Vector2d aval = Eigen::Vector2d::Zero(), zval = aval;
      Eigen::Matrix2d wg = Eigen::Matrix2d::Zero();
      for (int i = 0; i < dm.vel_local; ++i) {
        aval += a[dm.vdof(t, i)] * vb.val(k, i);
        wg += w[dm.vdof(t, i)] * vb.grd(k, i);
      }
      for (int i = 0; i < dm.recon_local; ++i)
        zval += z[dm.zdof(t, i)] * zb.val(k, i);
      sum -= rule.weights[k] * map.det * aval.dot(wg * zval);
    }
  }
  return sum;
}

void write_matrix_text(const Eigen::SparseMatrix<double>& A, std::ostream& os) {
  os << std::setprecision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace nsfem
