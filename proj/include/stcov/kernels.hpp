#pragma once

#include <Eigen/Dense>
#include <variant>

namespace stcov {

/* Space-time displacement (h, u): spatial lag h in R^d, temporal lag u. */
struct SpaceTimeLag {
  Eigen::VectorXd h;
  double u = 0.0;
};

/* Transport anisotropy: mean velocity lambda_vec and velocity spread Lambda
 * (symmetric positive definite).  Validated on construction by attempting a
 * Cholesky factorization of Lambda. */
class Anisotropy {
 public:
  Anisotropy(Eigen::VectorXd lambda_vec, Eigen::MatrixXd Lambda);

  /* d = 2 parameterization: lambda = lambda0 [cos th0, sin th0]',
   * Lambda = R(th1) diag(l1, l2) R(th1)'.  Requires lambda0 >= 0, l1, l2 > 0,
   * angles in (-pi, pi]. */
  static Anisotropy plane(double lambda0, double theta0, double l1, double l2,
                          double theta1);

  const Eigen::VectorXd& lambda_vec() const { return lambda_vec_; }
  const Eigen::MatrixXd& Lambda() const { return Lambda_; }
  int dim() const { return static_cast<int>(lambda_vec_.size()); }

 private:
  Eigen::VectorXd lambda_vec_;
  Eigen::MatrixXd Lambda_;
};

/* h_u = sqrt((h-u lambda)' (I + u^2 Lambda)^-1 (h-u lambda)) together with
 * ln|I + u^2 Lambda|, both via a symmetric factorization of I + u^2 Lambda. */
struct MahalanobisLag {
  double h_u;
  double logdet;
};
MahalanobisLag mahalanobis_lag(const SpaceTimeLag& lag, const Anisotropy& aniso);

/* Matern correlation 2^(1-nu)/Gamma(nu) (h/phi)^nu K_nu(h/phi); equals 1 at
 * h_u = 0 by the analytic limit. */
double matern_corr(double h_u, double nu, double phi);
double log_matern_corr(double h_u, double nu, double phi);

/* Confluent-hypergeometric correlation
 * Gamma(nu+alpha)/Gamma(nu) U(alpha, 1-nu, (h/beta)^2); 1 at h_u = 0. */
double ch_corr(double h_u, double nu, double alpha, double beta);

/* --- family parameter records --------------------------------------- */

/* Gaussian base with random velocity v ~ N(mu_v, D_v/2), closed form
 * sigma2 |I + (u^2/rho^2) D_v|^(-1/2)
 *        exp(-(h-u mu_v)' (u^2 D_v + rho^2 I)^-1 (h-u mu_v)). */
class LGaussParams {
 public:
  LGaussParams(double sigma2, double rho, Eigen::VectorXd mu_v, Eigen::MatrixXd D_v);
  double sigma2, rho;
  Eigen::VectorXd mu_v;
  Eigen::MatrixXd D_v;
  const Anisotropy& equivalent_aniso() const { return aniso_; }

 private:
  Anisotropy aniso_; /* lambda = mu_v, Lambda = D_v / rho^2 (cached) */
};

struct LMaternParams {
  double sigma2, nu, phi;
  Anisotropy aniso;
};

struct LCHParams {
  double sigma2, nu, alpha, beta;
  Anisotropy aniso;
};

/* Generalized-hyperbolic mixture; the lag-independent normalizer ln K_p(phi
 * beta) is computed once here and cached. */
class LGHParams {
 public:
  LGHParams(double sigma2, double p, double phi, double beta, Anisotropy aniso);
  double sigma2, p, phi, beta;
  Anisotropy aniso;
  double log_norm() const { return log_norm_; }

 private:
  double log_norm_;
};

struct MaternBase {
  double nu, phi;
};
struct CHBase {
  double nu, alpha, beta;
};

/* Time-tail-controlled family: sigma2 |I + u^2 Lambda|^(-a/(2d)) corr(h_u)
 * with corr either Matern or CH. */
struct GLParams {
  std::variant<MaternBase, CHBase> base;
  double a_exp, sigma2;
  Anisotropy aniso;
};

struct CovarianceModel {
  std::variant<LGaussParams, LMaternParams, LCHParams, LGHParams, GLParams> family;
  double tau2 = 0.0;
};

/* Throws std::invalid_argument when any parameter invariant fails. */
void validate(const CovarianceModel& model);

int dim(const CovarianceModel& model);
double sigma2_of(const CovarianceModel& model);

/* Covariance at a lag, including the nugget sigma2 tau2 1{h=0, u=0} (exact
 * zero only). */
double eval(const CovarianceModel& model, const SpaceTimeLag& lag);

/* Covariance without the nugget term (used by matrix assembly, which places
 * the nugget on the diagonal only). */
double eval_base(const CovarianceModel& model, const SpaceTimeLag& lag);

}  // namespace stcov
