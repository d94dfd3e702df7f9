#include "nsfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace nsfem {

void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

namespace detail {

TriangleQuadrature collapsed_triangle_rule(int degree) {
  // Map the square (s, t) in [0,1]^2 onto the triangle by x = s t,
  // y = s (1 - t), with Jacobian s. Points cluster toward vertex 0, which
  // resolves radially structured integrands around that vertex. A polynomial
  // of total degree d becomes, including the Jacobian, degree d + 1 in s and
  // degree d in t.
  const int ms = (degree + 3) / 2;
  const int mt = (degree + 2) / 2;
  Eigen::VectorXd xs, ws, xt, wt;
  gauss_legendre(ms, xs, ws);
  gauss_legendre(mt, xt, wt);

  TriangleQuadrature rule;
  rule.degree = degree;
  rule.bary.resize(ms * mt, 3);
  rule.weights.resize(ms * mt);
  int k = 0;
  for (int i = 0; i < ms; ++i) {
    const double s = 0.5 * (xs[i] + 1.0);
    const double cs = 0.5 * ws[i];
    for (int j = 0; j < mt; ++j, ++k) {
      const double t = 0.5 * (xt[j] + 1.0);
      const double ct = 0.5 * wt[j];
      rule.bary(k, 0) = 1.0 - s;
      rule.bary(k, 1) = s * t;
      rule.bary(k, 2) = s * (1.0 - t);
      rule.weights[k] = cs * ct * s;
    }
  }
  return rule;
}

}  // namespace detail

namespace {

TriangleQuadrature make_triangle_rule(int degree) {
  TriangleQuadrature rule;
  rule.degree = degree;
  if (degree == 1) {
    rule.bary.resize(1, 3);
    rule.bary << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
    rule.weights.resize(1);
    rule.weights << 0.5;
    return rule;
  }
  if (degree == 2) {
    rule.bary.resize(3, 3);
    rule.bary << 2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0,
                 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0,
                 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0;
    rule.weights.resize(3);
    rule.weights << 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0;
    return rule;
  }
  return detail::collapsed_triangle_rule(degree);
}

}  // namespace

const TriangleQuadrature& triangle_quadrature(int degree) {
  if (degree < 1 || degree > 12)
    throw std::invalid_argument(
        "triangle_quadrature: supported degrees are 1..12");
  static std::map<int, TriangleQuadrature> cache;
  auto it = cache.find(degree);
  if (it == cache.end())
    it = cache.emplace(degree, make_triangle_rule(degree)).first;
  return it->second;
}

const EdgeQuadrature& edge_quadrature(int degree) {
  if (degree < 1 || degree > 12)
    throw std::invalid_argument("edge_quadrature: supported degrees are 1..12");
  static std::map<int, EdgeQuadrature> cache;
  auto it = cache.find(degree);
  if (it == cache.end()) {
    EdgeQuadrature rule;
    rule.degree = degree;
    const int n = (degree + 2) / 2;
    Eigen::VectorXd x, w;
    gauss_legendre(n, x, w);
    rule.points = 0.5 * (x.array() + 1.0);
    rule.weights = 0.5 * w;
    it = cache.emplace(degree, std::move(rule)).first;
  }
  return it->second;
}

}  // namespace nsfem
