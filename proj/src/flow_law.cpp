#include "nsfem/flow_law.hpp"

#include <cmath>
#include <stdexcept>

#include "nsfem/numeric.hpp"

namespace nsfem {

namespace {

constexpr double kTinyStrain = 1e-14;

void require_nonnegative(double t, const char* who) {
  if (!(t >= 0.0)) throw std::domain_error(std::string(who) + ": negative argument");
}

// phi(t) for delta > 0 via the expansion
//   (delta+s)^(p-2) s = (delta+s)^(p-1) - delta (delta+s)^(p-2),
// which integrates to
//   [(delta+t)^p - delta^p]/p - delta [(delta+t)^(p-1) - delta^(p-1)]/(p-1).
// Both differences lose accuracy to cancellation when t << delta, so the
// series in t/delta takes over on that side.
double phi_positive_delta(double p, double delta, double t) {
  const double x = t / delta;
  if (x > 0.5) {
    const double L = std::log1p(x);
    const double dp = std::pow(delta, p);
    return dp * (std::expm1(p * L) / p - std::expm1((p - 1.0) * L) / (p - 1.0));
  }
  // phi(t) = delta^(p-2) t^2 sum_k C(p-2, k) x^k / (k+2)
  double coeff = 1.0;
  double xk = 1.0;
  double sum = 0.5;
  for (int k = 1; k < 200; ++k) {
    coeff *= (p - 2.0 - (k - 1)) / k;
    xk *= x;
    const double term = coeff * xk / (k + 2);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::pow(delta, p - 2.0) * t * t * sum;
}

}  // namespace

void validate(const FlowLaw& law) {
  if (!(law.p > 1.0)) throw std::invalid_argument("FlowLaw: requires p > 1");
  if (!(law.delta >= 0.0)) throw std::invalid_argument("FlowLaw: requires delta >= 0");
  if (!(law.nu0 > 0.0)) throw std::invalid_argument("FlowLaw: requires nu0 > 0");
}

double phi(const FlowLaw& law, double t) {
  require_nonnegative(t, "phi");
  if (t == 0.0) return 0.0;
  if (law.delta == 0.0) return std::pow(t, law.p) / law.p;
  return phi_positive_delta(law.p, law.delta, t);
}

double phi_prime(const FlowLaw& law, double t) {
  require_nonnegative(t, "phi_prime");
  if (t == 0.0) return 0.0;
  return std::pow(law.delta + t, law.p - 2.0) * t;
}

double phi_prime_shifted(const FlowLaw& law, double a, double t) {
  require_nonnegative(a, "phi_prime_shifted");
  require_nonnegative(t, "phi_prime_shifted");
  if (t == 0.0 || a + t == 0.0) return 0.0;
  return phi_prime(law, a + t) * t / (a + t);
}

double phi_shifted(const FlowLaw& law, double a, double t) {
  require_nonnegative(a, "phi_shifted");
  require_nonnegative(t, "phi_shifted");
  if (t == 0.0) return 0.0;
  return adaptive_integrate(
      [&](double s) { return phi_prime_shifted(law, a, s); }, 0.0, t, 1e-10);
}

double phi_conjugate_shifted(const FlowLaw& law, double a, double s) {
  require_nonnegative(a, "phi_conjugate_shifted");
  require_nonnegative(s, "phi_conjugate_shifted");
  if (s == 0.0) return 0.0;
  // phi_a' is strictly increasing onto [0, inf), so the supremum sits at the
  // unique t* with phi_a'(t*) = s.
  double hi = 1.0;
  int guard = 0;
  while (phi_prime_shifted(law, a, hi) < s) {
    hi *= 2.0;
    if (++guard > 2100)
      throw NumericError("phi_conjugate_shifted: bracketing failed", hi);
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (phi_prime_shifted(law, a, mid) < s ? lo : hi) = mid;
  }
  const double tstar = 0.5 * (lo + hi);
  return s * tstar - phi_shifted(law, a, tstar);
}

Tensor2 stress(const FlowLaw& law, const Tensor2& A) {
  const Tensor2 As = sym(A);
  const double ns = As.norm();
  if (ns == 0.0) return Tensor2::Zero();
  double base = law.delta + ns;
  if (law.p < 2.0 && base < kTinyStrain) base = kTinyStrain;
  return law.nu0 * std::pow(base, law.p - 2.0) * As;
}

Tensor2 stress_tangent(const FlowLaw& law, const Tensor2& A, const Tensor2& H) {
  const Tensor2 As = sym(A);
  const Tensor2 Hs = sym(H);
  const double ns = As.norm();
  if (ns < kTinyStrain) {
    double base = law.delta;
    if (law.p < 2.0 && base < kTinyStrain) base = kTinyStrain;
    const double c = (law.p == 2.0) ? 1.0 : std::pow(base, law.p - 2.0);
    return law.nu0 * c * Hs;
  }
  const double base = law.delta + ns;
  const double c1 = std::pow(base, law.p - 2.0);
  const double inner = As.cwiseProduct(Hs).sum();
  const double c2 = (law.p - 2.0) * std::pow(base, law.p - 3.0) * inner / ns;
  return law.nu0 * (c1 * Hs + c2 * As);
}

Tensor2 natural_map(const FlowLaw& law, const Tensor2& A) {
  const Tensor2 As = sym(A);
  const double ns = As.norm();
  if (ns == 0.0) return Tensor2::Zero();
  double base = law.delta + ns;
  if (law.p < 2.0 && base < kTinyStrain) base = kTinyStrain;
  return std::pow(base, 0.5 * (law.p - 2.0)) * As;
}

}  // namespace nsfem
