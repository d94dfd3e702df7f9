#pragma once

#include <Eigen/Dense>

namespace nsfem {

/// Rule on the reference triangle {x, y >= 0, x + y <= 1}. Points are stored
/// as barycentric triples against vertices (0,0), (1,0), (0,1); weights are
/// positive and sum to the reference area 1/2. All points lie strictly
/// inside the triangle.
struct TriangleQuadrature {
  int degree = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 3> bary;
  Eigen::VectorXd weights;

  Eigen::Vector2d point(int k) const {
    return {bary(k, 1), bary(k, 2)};
  }
  int size() const { return static_cast<int>(weights.size()); }
};

/// Returns a cached rule exact for all polynomials of total degree <= degree.
/// Supported range is 1..12; anything else throws std::invalid_argument.
const TriangleQuadrature& triangle_quadrature(int degree);

/// Gauss-Legendre rule on [0, 1]; weights sum to 1. Same supported range.
struct EdgeQuadrature {
  int degree = 0;
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
  int size() const { return static_cast<int>(weights.size()); }
};
const EdgeQuadrature& edge_quadrature(int degree);

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w);

namespace detail {
/// Collapsed tensor-product construction behind triangle_quadrature, exposed
/// without the range cap so convergence tests can over-integrate.
TriangleQuadrature collapsed_triangle_rule(int degree);
}  // namespace detail

}  // namespace nsfem
