#include "nsfem/reference_elements.hpp"

#include <stdexcept>

#include "nsfem/quadrature.hpp"

namespace nsfem {

Eigen::Vector2d ref_vertex(int i) {
  switch (i) {
    case 0: return {0.0, 0.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, 1.0};
  }
  throw std::invalid_argument("ref_vertex: index out of range");
}

void ref_edge_endpoints(int j, Eigen::Vector2d& a, Eigen::Vector2d& b) {
  a = ref_vertex((j + 1) % 3);
  b = ref_vertex((j + 2) % 3);
}

Eigen::Vector2d ref_edge_outward_normal(int j) {
  Eigen::Vector2d a, b;
  ref_edge_endpoints(j, a, b);
  const Eigen::Vector2d d = b - a;
  return Eigen::Vector2d(d.y(), -d.x()).normalized();
}

double ref_edge_length(int j) {
  Eigen::Vector2d a, b;
  ref_edge_endpoints(j, a, b);
  return (b - a).norm();
}

int scalar_dim(ScalarFamily family) {
  switch (family) {
    case ScalarFamily::P0: return 1;
    case ScalarFamily::P1: return 3;
    case ScalarFamily::P1dg: return 3;
    case ScalarFamily::P2: return 6;
    case ScalarFamily::CellBubble: return 1;
    case ScalarFamily::EdgeBubble: return 3;
  }
  throw std::invalid_argument("scalar_dim: unknown family");
}

void eval_scalar(ScalarFamily family, const Eigen::Vector2d& xhat,
                 ScalarBasisEval& out) {
  const double x = xhat.x(), y = xhat.y();
  const double l0 = 1.0 - x - y, l1 = x, l2 = y;
  const Eigen::Vector2d g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);
  const double lam[3] = {l0, l1, l2};
  const Eigen::Vector2d grad[3] = {g0, g1, g2};

  const int n = scalar_dim(family);
  out.values.resize(n);
  out.gradients.resize(n, 2);

  switch (family) {
    case ScalarFamily::P0:
      out.values[0] = 1.0;
      out.gradients.row(0).setZero();
      return;
    case ScalarFamily::P1:
    case ScalarFamily::P1dg:
      for (int i = 0; i < 3; ++i) {
        out.values[i] = lam[i];
        out.gradients.row(i) = grad[i].transpose();
      }
      return;
    case ScalarFamily::P2:
      for (int i = 0; i < 3; ++i) {
        out.values[i] = lam[i] * (2.0 * lam[i] - 1.0);
        out.gradients.row(i) = ((4.0 * lam[i] - 1.0) * grad[i]).transpose();
      }
      for (int j = 0; j < 3; ++j) {
        const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
        out.values[3 + j] = 4.0 * lam[i1] * lam[i2];
        out.gradients.row(3 + j) =
            (4.0 * (lam[i1] * grad[i2] + lam[i2] * grad[i1])).transpose();
      }
      return;
    case ScalarFamily::CellBubble:
      out.values[0] = 27.0 * l0 * l1 * l2;
      out.gradients.row(0) =
          (27.0 * (l1 * l2 * g0 + l0 * l2 * g1 + l0 * l1 * g2)).transpose();
      return;
    case ScalarFamily::EdgeBubble:
      for (int j = 0; j < 3; ++j) {
        const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
        out.values[j] = lam[i1] * lam[i2];
        out.gradients.row(j) =
            (lam[i1] * grad[i2] + lam[i2] * grad[i1]).transpose();
      }
      return;
  }
  throw std::invalid_argument("eval_scalar: unknown family");
}

int rt_dim(RTFamily family) {
  return family == RTFamily::RT0 ? 3 : 8;
}

namespace {

// Vector monomial spans:
//   RT0: (1,0), (0,1), (x,y)
//   RT1: (1,0), (0,1), (x,0), (0,x), (y,0), (0,y), (x^2,xy), (xy,y^2)
void eval_rt_monomials(RTFamily family, const Eigen::Vector2d& p,
                       Eigen::Matrix<double, Eigen::Dynamic, 2>& vals,
                       Eigen::VectorXd& divs) {
  const double x = p.x(), y = p.y();
  const int n = rt_dim(family);
  vals.resize(n, 2);
  divs.resize(n);
  vals.row(0) << 1.0, 0.0;
  divs[0] = 0.0;
  vals.row(1) << 0.0, 1.0;
  divs[1] = 0.0;
  if (family == RTFamily::RT0) {
    vals.row(2) << x, y;
    divs[2] = 2.0;
    return;
  }
  vals.row(2) << x, 0.0;
  divs[2] = 1.0;
  vals.row(3) << 0.0, x;
  divs[3] = 0.0;
  vals.row(4) << y, 0.0;
  divs[4] = 0.0;
  vals.row(5) << 0.0, y;
  divs[5] = 1.0;
  vals.row(6) << x * x, x * y;
  divs[6] = 3.0 * x;
  vals.row(7) << x * y, y * y;
  divs[7] = 3.0 * y;
}

// Coefficients of the dof-dual shapes in the monomial span, built once by
// applying each functional to each monomial and inverting.
const Eigen::MatrixXd& rt_coefficients(RTFamily family) {
  static Eigen::MatrixXd cache[2];
  Eigen::MatrixXd& C = cache[family == RTFamily::RT0 ? 0 : 1];
  if (C.size() > 0) return C;

  const int n = rt_dim(family);
  const int edge_moments = (family == RTFamily::RT0) ? 1 : 2;
  Eigen::MatrixXd D(n, n);
  Eigen::Matrix<double, Eigen::Dynamic, 2> vals;
  Eigen::VectorXd divs;

  for (int m = 0; m < n; ++m) {
    auto mono = [&](const Eigen::Vector2d& p) -> Eigen::Vector2d {
      eval_rt_monomials(family, p, vals, divs);
      return vals.row(m).transpose();
    };
    int row = 0;
    for (int j = 0; j < 3; ++j)
      for (int q = 0; q < edge_moments; ++q)
        D(row++, m) = rt_edge_moment(j, q, mono);
    if (family == RTFamily::RT1) {
      const TriangleQuadrature& tq = triangle_quadrature(4);
      Eigen::Vector2d avg = Eigen::Vector2d::Zero();
      for (int k = 0; k < tq.size(); ++k)
        avg += tq.weights[k] * mono(tq.point(k));
      D(row++, m) = avg.x();
      D(row++, m) = avg.y();
    }
  }
  C = D.fullPivLu().inverse();
  return C;
}

}  // namespace

void eval_rt(RTFamily family, const Eigen::Vector2d& xhat, RTBasisEval& out) {
  const Eigen::MatrixXd& C = rt_coefficients(family);
  Eigen::Matrix<double, Eigen::Dynamic, 2> mv;
  Eigen::VectorXd md;
  eval_rt_monomials(family, xhat, mv, md);
  const int n = rt_dim(family);
  out.values.resize(n, 2);
  out.divergences.resize(n);
  // Shape k = sum_m C(m, k) * monomial_m.
  out.values = C.transpose() * mv;
  out.divergences = C.transpose() * md;
}

AffineMap affine_from_vertices(const Eigen::Vector2d& a0,
                               const Eigen::Vector2d& a1,
                               const Eigen::Vector2d& a2) {
  AffineMap map;
  map.J.col(0) = a1 - a0;
  map.J.col(1) = a2 - a0;
  map.shift = a0;
  map.det = map.J.determinant();
  if (map.det == 0.0)
    throw std::invalid_argument("affine_from_vertices: degenerate triangle");
  map.Jinv = map.J.inverse();
  return map;
}

}  // namespace nsfem
