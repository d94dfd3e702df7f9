#pragma once

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace nsfem {

/// Thrown when an iterative numeric procedure cannot reach its tolerance.
class NumericError : public std::runtime_error {
public:
  NumericError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved " + format(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const { return achieved_; }

private:
  static std::string format(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  }
  double achieved_ = 0.0;
};

namespace detail {

template <class F>
struct AdaptiveSimpson {
  F& f;
  double tol_total = 0.0;
  double err_total = 0.0;
  int max_depth = 48;

  double simpson(double fa, double fm, double fb, double h) const {
    return h / 6.0 * (fa + 4.0 * fm + fb);
  }

  double run(double a, double m, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double err = (left + right - whole) / 15.0;
    if (std::abs(err) <= tol || depth >= max_depth || (b - a) < 1e-300) {
      err_total += std::abs(err);
      return left + right + err;
    }
    return run(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           run(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace detail

/// Integrates f on [a, b] by adaptive Simpson refinement. The target is
/// rel_tol relative to the integral's magnitude (or abs_tol if larger).
/// Throws NumericError when refinement bottoms out above the target.
template <class F>
double adaptive_integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                          double abs_tol = 0.0) {
  if (!(b >= a)) throw std::invalid_argument("adaptive_integrate: b < a");
  if (a == b) return 0.0;

  // Coarse pre-scan fixes the magnitude that "relative" refers to.
  double coarse = 0.0;
  {
    const int n = 16;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
      const double x0 = a + i * h;
      coarse += h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
    }
  }

  double scale = std::abs(coarse);
  for (int pass = 0; pass < 3; ++pass) {
    detail::AdaptiveSimpson<F> engine{f};
    engine.tol_total = std::max(abs_tol, rel_tol * scale);
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = engine.simpson(fa, fm, fb, b - a);
    const double value =
        engine.run(a, m, b, fa, fm, fb, whole, engine.tol_total, 0);
    const double new_scale = std::abs(value);
    if (new_scale > 2.0 * scale && pass < 2) {
      scale = new_scale;
      continue;
    }
    const double target = std::max(abs_tol, rel_tol * std::max(new_scale, scale));
    if (engine.err_total > target && target > 0.0)
      throw NumericError("adaptive_integrate: tolerance not reached",
                         engine.err_total / std::max(new_scale, 1e-300));
    return value;
  }
  return coarse;
}

}  // namespace nsfem
