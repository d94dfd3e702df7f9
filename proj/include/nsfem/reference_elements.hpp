#pragma once

#include <Eigen/Dense>

namespace nsfem {

// Reference triangle: vertices (0,0), (1,0), (0,1). Edge j lies opposite
// vertex j and runs from vertex (j+1)%3 to vertex (j+2)%3, so traversing
// edges 0, 1, 2 walks the boundary counterclockwise.

Eigen::Vector2d ref_vertex(int i);
void ref_edge_endpoints(int j, Eigen::Vector2d& a, Eigen::Vector2d& b);
Eigen::Vector2d ref_edge_outward_normal(int j);
double ref_edge_length(int j);

/// Scalar shape families on the reference triangle. P1dg shares the P1
/// shapes; the distinction (continuous vs per-cell coefficients) lives in
/// the dof layout, not here.
enum class ScalarFamily { P0, P1, P1dg, P2, CellBubble, EdgeBubble };

int scalar_dim(ScalarFamily family);

/// Values and reference-coordinate gradients of every shape at one point.
struct ScalarBasisEval {
  Eigen::VectorXd values;
  Eigen::Matrix<double, Eigen::Dynamic, 2> gradients;
};
void eval_scalar(ScalarFamily family, const Eigen::Vector2d& xhat,
                 ScalarBasisEval& out);

/// Raviart-Thomas families. Shapes are dual to these functionals:
///   RT0: unit flux moment per edge, against 1;
///   RT1: flux moments per edge against the Legendre pair {1, 2s-1} in the
///        edge parameter, plus the two componentwise cell averages.
/// Flux moments use the outward normal and include the arc length factor.
enum class RTFamily { RT0, RT1 };

int rt_dim(RTFamily family);

struct RTBasisEval {
  Eigen::Matrix<double, Eigen::Dynamic, 2> values;
  Eigen::VectorXd divergences;
};
void eval_rt(RTFamily family, const Eigen::Vector2d& xhat, RTBasisEval& out);

/// Applies the edge flux functional (edge j, Legendre index q) to an
/// arbitrary vector field on the reference triangle, by quadrature.
template <class F>
double rt_edge_moment(int j, int q, F&& v, int quad_degree = 8);

/// Affine map x = J xhat + shift from the reference triangle onto a
/// physical triangle. det > 0 for counterclockwise vertex order.
struct AffineMap {
  Eigen::Matrix2d J;
  Eigen::Matrix2d Jinv;
  Eigen::Vector2d shift;
  double det = 0.0;

  Eigen::Vector2d apply(const Eigen::Vector2d& xhat) const {
    return J * xhat + shift;
  }
  Eigen::Vector2d pull(const Eigen::Vector2d& x) const {
    return Jinv * (x - shift);
  }
  /// Physical gradient of a scalar from its reference gradient.
  Eigen::Vector2d push_gradient(const Eigen::Vector2d& gref) const {
    return Jinv.transpose() * gref;
  }
  /// Contravariant (flux-preserving) push of a vector value.
  Eigen::Vector2d piola(const Eigen::Vector2d& vref) const {
    return J * vref / det;
  }
  double piola_divergence(double divref) const { return divref / det; }
};

AffineMap affine_from_vertices(const Eigen::Vector2d& a0,
                               const Eigen::Vector2d& a1,
                               const Eigen::Vector2d& a2);

}  // namespace nsfem

#include "nsfem/quadrature.hpp"

namespace nsfem {

template <class F>
double rt_edge_moment(int j, int q, F&& v, int quad_degree) {
  Eigen::Vector2d a, b;
  ref_edge_endpoints(j, a, b);
  const Eigen::Vector2d n = ref_edge_outward_normal(j);
  const double len = ref_edge_length(j);
  const EdgeQuadrature& rule = edge_quadrature(quad_degree);
  double sum = 0.0;
  for (int k = 0; k < rule.size(); ++k) {
    const double s = rule.points[k];
    const Eigen::Vector2d x = a + s * (b - a);
    const double leg = (q == 0) ? 1.0 : 2.0 * s - 1.0;
    sum += rule.weights[k] * leg * v(x).dot(n);
  }
  return len * sum;
}

}  // namespace nsfem
