#include "nsfem/study.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nsfem {

namespace {

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0)
    throw std::runtime_error("adaptive quadrature: recursion limit reached");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

bool is_origin(const Eigen::Vector2d& x) { return x.x() == 0.0 && x.y() == 0.0; }

// Bucket-grid point location, used for inter-level transfer.
struct MeshLocator {
  const Mesh* mesh;
  int nx;
  std::vector<std::vector<int>> buckets;

  explicit MeshLocator(const Mesh& m) : mesh(&m) {
    nx = std::max(1, static_cast<int>(std::lround(1.0 / m.h)) * 2);
    buckets.assign(static_cast<std::size_t>(nx) * nx, {});
    for (int t = 0; t < m.n_triangles(); ++t) {
      Eigen::Vector2d lo(2.0, 2.0), hi(-1.0, -1.0);
      for (int v = 0; v < 3; ++v) {
        const Eigen::Vector2d& p = m.vertices[m.triangles[t][v]];
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      const int i0 = clamp_idx(lo.x()), i1 = clamp_idx(hi.x());
      const int j0 = clamp_idx(lo.y()), j1 = clamp_idx(hi.y());
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j)
          buckets[static_cast<std::size_t>(i) * nx + j].push_back(t);
    }
  }

  int clamp_idx(double c) const {
    return std::clamp(static_cast<int>(c * nx), 0, nx - 1);
  }

  bool inside(int t, const Eigen::Vector2d& p, Eigen::Vector2d* xhat) const {
    const AffineMap map = cell_map(*mesh, t);
    const Eigen::Vector2d r = map.pull(p);
    if (r.x() >= -1e-10 && r.y() >= -1e-10 && r.x() + r.y() <= 1.0 + 1e-10) {
      if (xhat) *xhat = r;
      return true;
    }
    return false;
  }

  int find(const Eigen::Vector2d& p, Eigen::Vector2d* xhat) const {
    const int i = clamp_idx(p.x()), j = clamp_idx(p.y());
    for (int t : buckets[static_cast<std::size_t>(i) * nx + j])
      if (inside(t, p, xhat)) return t;
    for (int t = 0; t < mesh->n_triangles(); ++t)
      if (inside(t, p, xhat)) return t;
    throw std::runtime_error("prolong_state: point not located in coarse mesh");
  }
};

}  // namespace

double q_mean_constant(double gamma) {
  if (!(gamma > -2.0))
    throw std::invalid_argument("q_mean_constant: gamma must be > -2");
  static std::map<double, double> cache;
  const auto it = cache.find(gamma);
  if (it != cache.end()) return it->second;
  // By x <-> y symmetry the mean over the square is twice the integral over
  // the triangle {0 <= y <= x <= 1}; substituting (x, y) = (s, s t) factors
  // that into an exact radial power integral times a smooth integral in t.
  const double smooth = adaptive_simpson(
      [gamma](double t) { return std::pow(1.0 + t * t, 0.5 * gamma); }, 0.0,
      1.0, 1e-12);
  const double value = 2.0 / (gamma + 2.0) * smooth;
  cache.emplace(gamma, value);
  return value;
}

ManufacturedSolution manufactured_solution(double p, double beta) {
  if (!(p > 1.0))
    throw std::invalid_argument("manufactured_solution: p must exceed 1");
  ManufacturedSolution ms;
  ms.p = p;
  ms.beta = beta;
  const double pprime = p / (p - 1.0);
  ms.gamma = 1.0 - 2.0 / pprime + beta;
  ms.q_mean = q_mean_constant(ms.gamma);
  return ms;
}

ExactFields exact_fields(const ManufacturedSolution& ms) {
  const double beta = ms.beta, gamma = ms.gamma, q_mean = ms.q_mean;
  ExactFields f;
  f.velocity = [beta](const Eigen::Vector2d& x) -> Eigen::Vector2d {
    if (is_origin(x)) throw std::domain_error("exact velocity: origin");
    return std::pow(x.norm(), beta) * Eigen::Vector2d(-x.y(), x.x());
  };
  f.gradient = [beta](const Eigen::Vector2d& x) -> Eigen::Matrix2d {
    if (is_origin(x)) throw std::domain_error("exact gradient: origin");
    const double r = x.norm();
    const Eigen::Vector2d w(-x.y(), x.x());
    Eigen::Matrix2d rot;
    rot << 0.0, -1.0, 1.0, 0.0;
    return beta * std::pow(r, beta - 2.0) * w * x.transpose() +
           std::pow(r, beta) * rot;
  };
  f.pressure = [gamma, q_mean](const Eigen::Vector2d& x) -> double {
    if (is_origin(x)) throw std::domain_error("exact pressure: origin");
    return std::pow(x.norm(), gamma) - q_mean;
  };
  return f;
}

VectorField boundary_velocity(const ManufacturedSolution& ms) {
  const double beta = ms.beta;
  return [beta](const Eigen::Vector2d& x) -> Eigen::Vector2d {
    if (is_origin(x)) return Eigen::Vector2d::Zero();
    return std::pow(x.norm(), beta) * Eigen::Vector2d(-x.y(), x.x());
  };
}

double error_F(const Mesh& mesh, const MeshTopology& topo, const DofMap& dofmap,
               const FlowLaw& law, const Eigen::VectorXd& state,
               const ExactFields& exact, int degree) {
  const TriangleQuadrature& rule = triangle_quadrature(degree);
  VelocityBasis vb;
  double total = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    velocity_basis_on_cell(mesh, topo, dofmap, t, map, rule, vb);
    for (int k = 0; k < rule.size(); ++k) {
      Eigen::Matrix2d gh = Eigen::Matrix2d::Zero();
      for (int i = 0; i < dofmap.vel_local; ++i)
        gh += state[dofmap.vdof(t, i)] * vb.grd(k, i);
      const Eigen::Vector2d x = map.apply(rule.point(k));
      const Eigen::Matrix2d diff =
          natural_map(law, gh) - natural_map(law, exact.gradient(x));
      total += rule.weights[k] * map.det * diff.squaredNorm();
    }
  }
  return std::sqrt(total);
}

double error_pressure(const Mesh& mesh, const MeshTopology& topo,
                      const DofMap& dofmap, const Eigen::VectorXd& state,
                      const std::function<double(const Eigen::Vector2d&)>& qexact,
                      double s, int degree) {
  (void)topo;
  if (!(s >= 1.0)) throw std::invalid_argument("error_pressure: s must be >= 1");
  const TriangleQuadrature& rule = triangle_quadrature(degree);
  PressureBasis qb;
  pressure_basis(dofmap, rule, qb);
  const int oq = dofmap.pressure_offset();

  double mean_h = 0.0, mean_ex = 0.0, area = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    for (int k = 0; k < rule.size(); ++k) {
      const double w = rule.weights[k] * map.det;
      double qh = 0.0;
      for (int m = 0; m < dofmap.pressure_local; ++m)
        qh += state[oq + dofmap.qdof(t, m)] * qb.val(k, m);
      mean_h += w * qh;
      mean_ex += w * qexact(map.apply(rule.point(k)));
      area += w;
    }
  }
  mean_h /= area;
  mean_ex /= area;

  double total = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = cell_map(mesh, t);
    for (int k = 0; k < rule.size(); ++k) {
      double qh = 0.0;
      for (int m = 0; m < dofmap.pressure_local; ++m)
        qh += state[oq + dofmap.qdof(t, m)] * qb.val(k, m);
      const double diff =
          (qh - mean_h) - (qexact(map.apply(rule.point(k))) - mean_ex);
      total += rule.weights[k] * map.det * std::pow(std::abs(diff), s);
    }
  }
  return std::pow(total, 1.0 / s);
}

std::vector<double> eoc(const std::vector<double>& errors,
                        const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw std::invalid_argument("eoc: need equal-length lists of length >= 2");
  for (double e : errors)
    if (!(e > 0.0))
      throw std::invalid_argument(
          "eoc: errors must be positive (exact reproduction has no order)");
  std::vector<double> rates;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    rates.push_back(std::log(errors[i + 1] / errors[i]) /
                    std::log(hs[i + 1] / hs[i]));
  return rates;
}

Eigen::VectorXd prolong_state(const Mesh& coarse_mesh,
                              const MeshTopology& coarse_topo,
                              const DofMap& coarse_dm,
                              const Eigen::VectorXd& coarse_state,
                              const Mesh& fine_mesh,
                              const MeshTopology& fine_topo,
                              const DofMap& fine_dm) {
  const MeshLocator locator(coarse_mesh);
  const Eigen::VectorXd vc = coarse_state.head(coarse_dm.n_velocity);
  const VectorField vfield = [&](const Eigen::Vector2d& p) -> Eigen::Vector2d {
    Eigen::Vector2d xhat, val;
    const int t = locator.find(p, &xhat);
    eval_velocity(coarse_mesh, coarse_topo, coarse_dm, vc, t, xhat, &val,
                  nullptr);
    return val;
  };

  Eigen::VectorXd fine = Eigen::VectorXd::Zero(fine_dm.total());
  fine.head(fine_dm.n_velocity) =
      interpolate_velocity(fine_mesh, fine_topo, fine_dm, vfield);
  fine.segment(fine_dm.recon_offset(), fine_dm.n_recon) =
      fortin_interpolate(fine_mesh, fine_topo, fine_dm, vfield);

  const Eigen::VectorXd qc = coarse_state.segment(coarse_dm.pressure_offset(),
                                                  coarse_dm.n_pressure);
  const auto qfield = [&](const Eigen::Vector2d& p) {
    Eigen::Vector2d xhat;
    const int t = locator.find(p, &xhat);
    return eval_pressure(coarse_mesh, coarse_dm, qc, t, xhat);
  };
  const int oq = fine_dm.pressure_offset();
  for (int t = 0; t < fine_mesh.n_triangles(); ++t) {
    const auto& tri = fine_mesh.triangles[t];
    if (fine_dm.pressure_local == 1) {
      const Eigen::Vector2d c = (fine_mesh.vertices[tri[0]] +
                                 fine_mesh.vertices[tri[1]] +
                                 fine_mesh.vertices[tri[2]]) /
                                3.0;
      fine[oq + fine_dm.qdof(t, 0)] = qfield(c);
    } else {
      for (int m = 0; m < 3; ++m)
        fine[oq + fine_dm.qdof(t, m)] = qfield(fine_mesh.vertices[tri[m]]);
    }
  }
  return fine;
}

StudyReport run_study(const StudyParams& sp) {
  if (!(sp.p > 1.0)) throw std::invalid_argument("run_study: p must exceed 1");
  if (sp.levels < 1) throw std::invalid_argument("run_study: levels must be >= 1");

  StudyReport report;
  report.params = sp;
  report.theory_v = 1.0;
  const double pprime = sp.p / (sp.p - 1.0);
  report.theory_lp = std::min(1.0, 2.0 / pprime);
  report.theory_l2 = 1.0;

  Mesh mesh = unit_square_initial();
  Mesh coarse_mesh;
  MeshTopology coarse_topo;
  DofMap coarse_dm;
  Eigen::VectorXd coarse_x;

  for (int level = 0; level < sp.levels; ++level) {
    if (level > 0) {
      coarse_mesh = std::move(mesh);
      mesh = refine_red(coarse_mesh);
    }
    const MeshTopology topo = build_topology(mesh);
    const DofMap dm = build_dofmap(mesh, topo, element_pair(sp.pair));

    const ManufacturedSolution target_ms = manufactured_solution(sp.p, sp.beta);
    Problem pr;
    pr.mesh = &mesh;
    pr.topo = &topo;
    pr.dofmap = &dm;
    pr.mode = sp.mode;
    pr.boundary_values =
        interpolate_boundary(mesh, topo, dm, boundary_velocity(target_ms));
    pr.g1 = compatible_divergence_datum(mesh, topo, dm, pr.boundary_values);

    const ProblemFamily family = [&](double p) -> const Problem& {
      pr.law = {p, sp.delta, sp.nu0};
      const ManufacturedSolution ms = manufactured_solution(p, sp.beta);
      pr.load = manufactured_rhs(mesh, topo, dm, pr.law, exact_fields(ms),
                                 sp.mode != ConvectiveMode::None);
      return pr;
    };

    SolveStats stats;
    Eigen::VectorXd x;
    try {
      if (level == 0) {
        x = continuation_drive(family, sp.p, sp.newton, stats);
      } else {
        const Eigen::VectorXd warm = prolong_state(
            coarse_mesh, coarse_topo, coarse_dm, coarse_x, mesh, topo, dm);
        x = continuation_drive(family, sp.p, sp.newton, stats, &warm);
      }
    } catch (const NewtonFailure& failure) {
      std::ostringstream os;
      os << "run_study: level " << level << " failed: " << failure.what();
      throw StudyFailure(os.str(), level);
    }

    family(sp.p);
    const ExactFields fields = exact_fields(target_ms);
    LevelResult r;
    r.level = level;
    r.h = mesh.h;
    r.ndof = dm.total();
    r.newton_iters = stats.total_iterations();
    r.eF = error_F(mesh, topo, dm, pr.law, x, fields);
    r.eq_lp = error_pressure(mesh, topo, dm, x, fields.pressure, pprime);
    r.eq_l2 = error_pressure(mesh, topo, dm, x, fields.pressure, 2.0);
    report.levels.push_back(r);

    coarse_topo = topo;
    coarse_dm = dm;
    coarse_x = x;
    if (level == 0) coarse_mesh = mesh;
  }

  if (report.levels.size() >= 2) {
    std::vector<double> hs, eF, lp, l2;
    for (const LevelResult& r : report.levels) {
      hs.push_back(r.h);
      eF.push_back(r.eF);
      lp.push_back(r.eq_lp);
      l2.push_back(r.eq_l2);
    }
    report.eocF = eoc(eF, hs);
    report.eoc_lp = eoc(lp, hs);
    report.eoc_l2 = eoc(l2, hs);
  }
  return report;
}

namespace {

std::string fmt(double v, int precision, bool scientific) {
  std::ostringstream os;
  if (scientific)
    os << std::scientific << std::setprecision(precision) << v;
  else
    os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void write_csv(const StudyReport& report, std::ostream& os) {
  os << "level,h,ndof,newton_iters,eF,eq_lp,eq_l2,eocF,eoc_lp,eoc_l2\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelResult& r = report.levels[i];
    os << r.level << ',' << fmt17(r.h) << ',' << r.ndof << ','
       << r.newton_iters << ',' << fmt17(r.eF) << ',' << fmt17(r.eq_lp) << ','
       << fmt17(r.eq_l2) << ',';
    if (i == 0)
      os << ",,";
    else
      os << fmt17(report.eocF[i - 1]) << ',' << fmt17(report.eoc_lp[i - 1])
         << ',' << fmt17(report.eoc_l2[i - 1]);
    os << '\n';
  }
}

void write_markdown(const StudyReport& report, std::ostream& os) {
  os << "| level | h | ndof | newton_iters | eF | eq_lp | eq_l2 | eocF | "
        "eoc_lp | eoc_l2 |\n";
  os << "| --- | --- | --- | --- | --- | --- | --- | --- | --- | --- |\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelResult& r = report.levels[i];
    os << "| " << r.level << " | " << fmt(r.h, 5, false) << " | " << r.ndof
       << " | " << r.newton_iters << " | " << fmt(r.eF, 3, true) << " | "
       << fmt(r.eq_lp, 3, true) << " | " << fmt(r.eq_l2, 3, true) << " | ";
    if (i == 0)
      os << " |  |  |\n";
    else
      os << fmt(report.eocF[i - 1], 3, false) << " | "
         << fmt(report.eoc_lp[i - 1], 3, false) << " | "
         << fmt(report.eoc_l2[i - 1], 3, false) << " |\n";
  }
  os << "| theory |  |  |  |  |  |  | " << fmt(report.theory_v, 3, false)
     << " | " << fmt(report.theory_lp, 3, false) << " | "
     << fmt(report.theory_l2, 3, false) << " |\n";
}

}  // namespace nsfem
