#pragma once

#include <Eigen/Dense>

namespace nsfem {

using Tensor2 = Eigen::Matrix2d;

/// Shear-dependent viscosity law. The scalar profile is
///   phi'(t) = (delta + t)^(p-2) * t,
/// and the stress applies it to the symmetric part of a velocity gradient.
struct FlowLaw {
  double p = 2.0;
  double delta = 0.0;
  double nu0 = 1.0;
};

/// Throws std::invalid_argument unless p > 1, delta >= 0, nu0 > 0.
void validate(const FlowLaw& law);

/// phi(t) = integral of phi' from 0 to t, in closed form. Requires t >= 0.
double phi(const FlowLaw& law, double t);

/// phi'(t) = (delta + t)^(p-2) * t. Requires t >= 0.
double phi_prime(const FlowLaw& law, double t);

/// Derivative of the shifted function: phi'(a + t) * t / (a + t).
double phi_prime_shifted(const FlowLaw& law, double a, double t);

/// Shifted function phi_a(t), integrated numerically to 1e-10 relative.
double phi_shifted(const FlowLaw& law, double a, double t);

/// Convex conjugate (phi_a)*(s) = sup_t { s*t - phi_a(t) }, s >= 0.
double phi_conjugate_shifted(const FlowLaw& law, double a, double s);

inline Tensor2 sym(const Tensor2& A) { return 0.5 * (A + A.transpose()); }

/// Extra stress S(A) = nu0 * (delta + |sym A|)^(p-2) * sym A.
Tensor2 stress(const FlowLaw& law, const Tensor2& A);

/// Directional derivative of stress at A in direction H.
Tensor2 stress_tangent(const FlowLaw& law, const Tensor2& A, const Tensor2& H);

/// Nonlinear strain transform (delta + |sym A|)^((p-2)/2) * sym A. Squared
/// L2 distances between transformed strains give the natural error measure
/// for this stress law.
Tensor2 natural_map(const FlowLaw& law, const Tensor2& A);

}  // namespace nsfem
