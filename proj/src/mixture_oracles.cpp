#include "stcov/mixture_oracles.hpp"

#include <cmath>
#include <vector>

#include "stcov/special_functions.hpp"

namespace stcov {

namespace {

double checked(const QuadResult& r, const char* what) {
  if (!r.converged)
    throw oracle_error(std::string("mixture oracle: quadrature did not converge in ") + what);
  return r.value;
}

/* E[exp(-c / X)] under the density exp(log_dens(x)), X on (0, inf). */
double scale_mixture(double c, const std::function<double(double)>& log_dens,
                     const QuadSpec& quad, const char* what) {
  auto f = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double e = -c / x + log_dens(x);
    return (e < -745.0) ? 0.0 : std::exp(e);
  };
  return checked(integrate_half_line(f, quad), what);
}

}  // namespace

double lgauss_closed(const SpaceTimeLag& lag, double sigma2, double rho,
                     const Anisotropy& aniso) {
  const MahalanobisLag m = mahalanobis_lag(lag, aniso);
  return sigma2 * std::exp(-0.5 * m.logdet - m.h_u * m.h_u / (rho * rho));
}

double oracle_lmatern(const SpaceTimeLag& lag, const LMaternParams& params,
                      const QuadSpec& quad) {
  const MahalanobisLag m = mahalanobis_lag(lag, params.aniso);
  const double rate = 1.0 / (4.0 * params.phi * params.phi);
  const double lognorm = params.nu * std::log(rate) - log_gamma(params.nu);
  auto log_dens = [&](double x) {
    return lognorm + (params.nu - 1.0) * std::log(x) - rate * x;
  };
  const double mix = scale_mixture(m.h_u * m.h_u, log_dens, quad, "oracle_lmatern");
  return params.sigma2 * std::exp(-0.5 * m.logdet) * mix;
}

double oracle_lch(const SpaceTimeLag& lag, const LCHParams& params,
                  const QuadSpec& quad) {
  /* Integrating the inverse-Gamma law of phi^2 out of the Gamma law of rho^2
   * analytically leaves the scaled beta-prime marginal
   *   p(x) = G(nu+alpha)/(G(nu)G(alpha)) beta^(2 alpha) x^(nu-1)
   *          (x + beta^2)^-(nu+alpha). */
  const MahalanobisLag m = mahalanobis_lag(lag, params.aniso);
  const double b2 = params.beta * params.beta;
  const double lognorm = log_gamma(params.nu + params.alpha) - log_gamma(params.nu) -
                         log_gamma(params.alpha) + params.alpha * std::log(b2);
  auto log_dens = [&](double x) {
    return lognorm + (params.nu - 1.0) * std::log(x) -
           (params.nu + params.alpha) * std::log(x + b2);
  };
  const double mix = scale_mixture(m.h_u * m.h_u, log_dens, quad, "oracle_lch");
  return params.sigma2 * std::exp(-0.5 * m.logdet) * mix;
}

double oracle_lch_nested(const SpaceTimeLag& lag, const LCHParams& params,
                         const QuadSpec& quad) {
  const MahalanobisLag m = mahalanobis_lag(lag, params.aniso);
  const double b2_4 = params.beta * params.beta / 4.0;
  const double ig_norm = params.alpha * std::log(b2_4) - log_gamma(params.alpha);
  const double c = m.h_u * m.h_u;
  auto outer = [&](double y) { /* y = phi^2 ~ inverse-Gamma(alpha, beta^2/4) */
    if (y <= 0.0) return 0.0;
    const double lg_ig = ig_norm - (params.alpha + 1.0) * std::log(y) - b2_4 / y;
    if (lg_ig < -700.0) return 0.0;
    const double rate = 1.0 / (4.0 * y);
    const double ga_norm = params.nu * std::log(rate) - log_gamma(params.nu);
    auto log_dens = [&](double x) {
      return ga_norm + (params.nu - 1.0) * std::log(x) - rate * x;
    };
    QuadSpec inner = quad;
    inner.rel_tol = std::max(quad.rel_tol, 1e-9);
    return std::exp(lg_ig) * scale_mixture(c, log_dens, inner, "oracle_lch_nested inner");
  };
  const double mix = checked(integrate_half_line(outer, quad), "oracle_lch_nested outer");
  return params.sigma2 * std::exp(-0.5 * m.logdet) * mix;
}

double oracle_lgh(const SpaceTimeLag& lag, const LGHParams& params,
                  const QuadSpec& quad) {
  /* rho^2 follows the generalized inverse Gaussian law with kernel
   * x^(p-1) exp(-phi^2 x / 4 - beta^2 / x); the normalizer is evaluated by
   * quadrature too, keeping this oracle free of Bessel-function code. */
  const MahalanobisLag m = mahalanobis_lag(lag, params.aniso);
  const double qa = params.phi * params.phi / 4.0;
  const double qb = params.beta * params.beta;
  auto log_kernel = [&](double x) {
    return (params.p - 1.0) * std::log(x) - qa * x - qb / x;
  };
  const double z = scale_mixture(0.0, log_kernel, quad, "oracle_lgh normalizer");
  const double mix = scale_mixture(m.h_u * m.h_u, log_kernel, quad, "oracle_lgh");
  return params.sigma2 * std::exp(-0.5 * m.logdet) * mix / z;
}

double oracle_matern_corr(double h, double nu, double phi, const QuadSpec& quad) {
  const double rate = 1.0 / (2.0 * phi * phi);
  const double lognorm = nu * std::log(rate) - log_gamma(nu);
  auto log_dens = [&](double x) { return lognorm + (nu - 1.0) * std::log(x) - rate * x; };
  return scale_mixture(0.5 * h * h, log_dens, quad, "oracle_matern_corr");
}

double oracle_ch_corr(double h, double nu, double alpha, double beta,
                      const QuadSpec& quad) {
  /* U = (beta^2/2) W with W beta-prime(nu, alpha):
   * p(u) = 2/(beta^2 B(nu, alpha)) (2u/beta^2)^(nu-1) (1 + 2u/beta^2)^-(nu+alpha). */
  const double half_b2 = 0.5 * beta * beta;
  const double log_b = log_gamma(nu) + log_gamma(alpha) - log_gamma(nu + alpha);
  auto log_dens = [&](double u) {
    const double w = u / half_b2;
    return -std::log(half_b2) - log_b + (nu - 1.0) * std::log(w) -
           (nu + alpha) * std::log1p(w);
  };
  return scale_mixture(0.5 * h * h, log_dens, quad, "oracle_ch_corr");
}

double tail_slope(const std::function<double(double)>& f, double x_lo, double x_hi,
                  int n_pts) {
  if (!(x_lo > 0.0) || !(x_hi / x_lo >= 10.0) || n_pts < 2)
    throw std::domain_error("tail_slope: need 0 < x_lo, x_hi/x_lo >= 10, n_pts >= 2");
  std::vector<double> lx(n_pts), ly(n_pts);
  const double step = (std::log(x_hi) - std::log(x_lo)) / (n_pts - 1);
  for (int i = 0; i < n_pts; ++i) {
    lx[i] = std::log(x_lo) + i * step;
    const double v = f(std::exp(lx[i]));
    if (!(v > 0.0)) throw std::domain_error("tail_slope: f must be positive");
    ly[i] = std::log(v);
  }
  double mx = 0, my = 0;
  for (int i = 0; i < n_pts; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n_pts;
  my /= n_pts;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n_pts; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace stcov
