#pragma once

#include <functional>

namespace stcov {

/* Tolerance and budget for the adaptive integrators.  `transform` selects how
 * semi-infinite domains are handled: LogSubstitution integrates in s with
 * x = e^s - 1, which compresses algebraic tails enough that a modest block
 * sweep captures them; None integrates in the original variable with
 * geometrically growing blocks (only sensible for exponentially decaying
 * integrands). */
struct QuadSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  enum class Transform { none, log_substitution };
  Transform transform = Transform::log_substitution;
};

struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;
  int n_subdivisions = 0;
  bool converged = false;
};

/* Adaptive bisection on [a, b] with 15-point Gauss-Legendre panels.  The worst
 * panel (largest error estimate) is split first; a panel's error is estimated
 * by comparing its estimate against the sum over its two halves. */
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadSpec& spec = {});

/* Integral of f over [0, inf).  Applies the transform chosen in `spec` and
 * sweeps blocks outward until two consecutive blocks are negligible. */
QuadResult integrate_half_line(const std::function<double(double)>& f,
                               const QuadSpec& spec = {});

}  // namespace stcov
