#pragma once

namespace stcov {

/* Accuracy/budget knobs shared by the quadrature- and series-backed special
 * functions.  log_scale_threshold is the argument size beyond which callers
 * must go through the scaled/log variants instead of the natural-scale ones. */
struct EvalConfig {
  double rel_tol = 1e-10;
  int max_quad_nodes = 4096;
  double log_scale_threshold = 700.0;
};

/* ln Gamma(x) for x > 0. */
double log_gamma(double x);

/* Modified Bessel function of the second kind K_nu(x), real order, x > 0.
 * Negative nu is folded through K_nu = K_{-nu}.  Series evaluation for
 * x <= 2 (Temme), continued fraction for x > 2, upward recurrence in the
 * order with overflow-safe exponent tracking.  The unscaled variant raises
 * std::overflow_error when the value exceeds double range (tiny x, large nu);
 * use log_bessel_k there. */
double bessel_k(double nu, double x, const EvalConfig& cfg = {});

/* e^x * K_nu(x); finite (no underflow) for all x in the supported range. */
double bessel_k_scaled(double nu, double x, const EvalConfig& cfg = {});

/* ln K_nu(x); always finite within the supported range. */
double log_bessel_k(double nu, double x, const EvalConfig& cfg = {});

/* Tricomi confluent hypergeometric function of the second kind U(a, b, x),
 * a > 0, x >= 0 (x = 0 requires b < 1), evaluated by adaptive quadrature of
 * U = 1/Gamma(a) * integral_0^inf t^(a-1) (1+t)^(b-a-1) e^(-xt) dt
 * after the substitution t = e^s - 1 (plus an endpoint-flattening power map
 * when a < 1). */
double tricomi_u(double a, double b, double x, const EvalConfig& cfg = {});

}  // namespace stcov
