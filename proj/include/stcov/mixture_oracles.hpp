#pragma once

#include <functional>
#include <stdexcept>

#include "stcov/kernels.hpp"
#include "stcov/quadrature.hpp"

namespace stcov {

/* Quadrature-based reconstructions of every closed-form family from its
 * hierarchical mixture definition.  These are deliberately slow, independent
 * reference implementations used as ground truth in tests; they never run at
 * fitting time. */

struct oracle_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Gaussian location-mixture closed form: the average of the Gaussian base
 * covariance sigma2 exp(-|h - v u|^2 / rho^2) over v ~ N(lambda, rho^2
 * Lambda / 2), which integrates to
 *   sigma2 |I + u^2 Lambda|^(-1/2) exp(-h_u^2 / rho^2). */
double lgauss_closed(const SpaceTimeLag& lag, double sigma2, double rho,
                     const Anisotropy& aniso);

/* Outer scale mixtures over the squared range rho^2: Gamma mixing for the
 * Matern family, its inverse-Gamma-marginalized (beta-prime) law for the CH
 * family, generalized-inverse-Gaussian mixing for the GH family. */
double oracle_lmatern(const SpaceTimeLag& lag, const LMaternParams& params,
                      const QuadSpec& quad = {});
double oracle_lch(const SpaceTimeLag& lag, const LCHParams& params,
                  const QuadSpec& quad = {});
double oracle_lgh(const SpaceTimeLag& lag, const LGHParams& params,
                  const QuadSpec& quad = {});

/* Fully nested (rho^2 x phi^2) double quadrature for the CH hierarchy; slow
 * cross-check of oracle_lch's analytic inner integral. */
double oracle_lch_nested(const SpaceTimeLag& lag, const LCHParams& params,
                         const QuadSpec& quad = {});

/* Pure spatial-correlation mixtures: E exp(-h^2/(2U)) with U ~ Ga(nu,
 * rate 1/(2 phi^2)) for Matern, U ~ (beta^2/2) x beta-prime(nu, alpha) for
 * CH. */
double oracle_matern_corr(double h, double nu, double phi, const QuadSpec& quad = {});
double oracle_ch_corr(double h, double nu, double alpha, double beta,
                      const QuadSpec& quad = {});

/* Least-squares slope of ln f vs ln x over n_pts log-spaced points in
 * [x_lo, x_hi]; f must be positive there. */
double tail_slope(const std::function<double(double)>& f, double x_lo, double x_hi,
                  int n_pts);

}  // namespace stcov
