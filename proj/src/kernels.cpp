#include "stcov/kernels.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "stcov/special_functions.hpp"

namespace stcov {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite_all(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return m.allFinite();
}

}  // namespace

Anisotropy::Anisotropy(Eigen::VectorXd lambda_vec, Eigen::MatrixXd Lambda)
    : lambda_vec_(std::move(lambda_vec)), Lambda_(std::move(Lambda)) {
  check(lambda_vec_.size() >= 1, "Anisotropy: dimension must be >= 1");
  check(Lambda_.rows() == lambda_vec_.size() && Lambda_.cols() == lambda_vec_.size(),
        "Anisotropy: Lambda must be d x d");
  check(finite_all(lambda_vec_) && finite_all(Lambda_),
        "Anisotropy: non-finite entries");
  check(Lambda_.isApprox(Lambda_.transpose(), 1e-12),
        "Anisotropy: Lambda must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(Lambda_);
  check(llt.info() == Eigen::Success,
        "Anisotropy: Lambda must be positive definite (factorization failed)");
}

Anisotropy Anisotropy::plane(double lambda0, double theta0, double l1, double l2,
                             double theta1) {
  check(lambda0 >= 0.0, "Anisotropy::plane: lambda0 must be >= 0");
  check(l1 > 0.0 && l2 > 0.0, "Anisotropy::plane: eigenvalues must be > 0");
  check(theta0 > -kPi && theta0 <= kPi, "Anisotropy::plane: theta0 outside (-pi, pi]");
  check(theta1 > -kPi && theta1 <= kPi, "Anisotropy::plane: theta1 outside (-pi, pi]");
  Eigen::VectorXd lam(2);
  lam << lambda0 * std::cos(theta0), lambda0 * std::sin(theta0);
  const double c = std::cos(theta1), s = std::sin(theta1);
  Eigen::Matrix2d U;
  U << c, -s, s, c;
  Eigen::Matrix2d L = U * Eigen::Vector2d(l1, l2).asDiagonal() * U.transpose();
  return Anisotropy(lam, L);
}

MahalanobisLag mahalanobis_lag(const SpaceTimeLag& lag, const Anisotropy& aniso) {
  const int d = aniso.dim();
  check(lag.h.size() == d, "mahalanobis_lag: lag dimension mismatch");
  const double u2 = lag.u * lag.u;
  if (d == 2) {
    /* Hand-rolled LDL' of the 2x2 M = I + u^2 Lambda (hot path). */
    const double m00 = 1.0 + u2 * aniso.Lambda()(0, 0);
    const double m01 = u2 * aniso.Lambda()(0, 1);
    const double m11 = 1.0 + u2 * aniso.Lambda()(1, 1);
    const double d1 = m00;
    const double l21 = m01 / m00;
    const double d2 = m11 - m01 * l21;
    if (!(d1 > 0.0) || !(d2 > 0.0))
      throw std::invalid_argument("mahalanobis_lag: I + u^2 Lambda not positive definite");
    const double r0 = lag.h[0] - lag.u * aniso.lambda_vec()[0];
    const double r1 = lag.h[1] - lag.u * aniso.lambda_vec()[1];
    const double z1 = r0;
    const double z2 = r1 - l21 * z1;
    const double q = z1 * z1 / d1 + z2 * z2 / d2;
    return {std::sqrt(q), std::log(d1) + std::log(d2)};
  }
  Eigen::MatrixXd M = u2 * aniso.Lambda();
  M.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("mahalanobis_lag: I + u^2 Lambda not positive definite");
  const Eigen::VectorXd r = lag.h - lag.u * aniso.lambda_vec();
  const Eigen::VectorXd z = llt.matrixL().solve(r);
  double logdet = 0.0;
  for (int i = 0; i < d; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return {z.norm(), logdet};
}

double log_matern_corr(double h_u, double nu, double phi) {
  check(h_u >= 0.0 && nu > 0.0 && phi > 0.0, "matern_corr: invalid arguments");
  if (h_u == 0.0) return 0.0;
  const double z = h_u / phi;
  return (1.0 - nu) * std::log(2.0) - log_gamma(nu) + nu * std::log(z) +
         log_bessel_k(nu, z);
}

double matern_corr(double h_u, double nu, double phi) {
  if (h_u == 0.0) {
    check(nu > 0.0 && phi > 0.0, "matern_corr: invalid arguments");
    return 1.0;
  }
  return std::exp(log_matern_corr(h_u, nu, phi));
}

double ch_corr(double h_u, double nu, double alpha, double beta) {
  check(h_u >= 0.0 && nu > 0.0 && alpha > 0.0 && beta > 0.0,
        "ch_corr: invalid arguments");
  if (h_u == 0.0) return 1.0;
  const double z = h_u / beta;
  return std::exp(log_gamma(nu + alpha) - log_gamma(nu)) *
         tricomi_u(alpha, 1.0 - nu, z * z);
}

namespace {
double checked_rho_sq(double rho) {
  check(std::isfinite(rho) && rho > 0.0, "LGaussParams: rho must be > 0");
  return rho * rho;
}
}  // namespace

LGaussParams::LGaussParams(double sigma2_in, double rho_in, Eigen::VectorXd mu_v_in,
                           Eigen::MatrixXd D_v_in)
    : sigma2(sigma2_in),
      rho(rho_in),
      mu_v(std::move(mu_v_in)),
      D_v(std::move(D_v_in)),
      aniso_(mu_v, D_v / checked_rho_sq(rho_in)) {
  check(sigma2 >= 0.0 && std::isfinite(sigma2), "LGaussParams: sigma2 must be >= 0");
}

LGHParams::LGHParams(double sigma2_in, double p_in, double phi_in, double beta_in,
                     Anisotropy aniso_in)
    : sigma2(sigma2_in), p(p_in), phi(phi_in), beta(beta_in),
      aniso(std::move(aniso_in)) {
  check(sigma2 >= 0.0 && std::isfinite(sigma2) && phi > 0.0 && beta > 0.0,
        "LGHParams: invalid parameters");
  check(std::isfinite(p), "LGHParams: p must be finite");
  log_norm_ = log_bessel_k(p, phi * beta);
}

void validate(const CovarianceModel& model) {
  check(model.tau2 >= 0.0 && std::isfinite(model.tau2),
        "CovarianceModel: tau2 must be >= 0");
  std::visit(
      [](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, LGaussParams>) {
          check(fam.sigma2 >= 0.0 && fam.rho > 0.0, "LGaussParams: invalid");
        } else if constexpr (std::is_same_v<T, LMaternParams>) {
          check(fam.sigma2 >= 0.0 && fam.nu > 0.0 && fam.phi > 0.0,
                "LMaternParams: invalid");
        } else if constexpr (std::is_same_v<T, LCHParams>) {
          check(fam.sigma2 >= 0.0 && fam.nu > 0.0 && fam.alpha > 0.0 && fam.beta > 0.0,
                "LCHParams: invalid");
        } else if constexpr (std::is_same_v<T, LGHParams>) {
          check(fam.sigma2 >= 0.0 && fam.phi > 0.0 && fam.beta > 0.0,
                "LGHParams: invalid");
        } else if constexpr (std::is_same_v<T, GLParams>) {
          check(fam.sigma2 >= 0.0 && fam.a_exp > 0.0, "GLParams: invalid");
          std::visit(
              [](const auto& base) {
                using B = std::decay_t<decltype(base)>;
                if constexpr (std::is_same_v<B, MaternBase>) {
                  check(base.nu > 0.0 && base.phi > 0.0, "GLParams: invalid Matern base");
                } else {
                  check(base.nu > 0.0 && base.alpha > 0.0 && base.beta > 0.0,
                        "GLParams: invalid CH base");
                }
              },
              fam.base);
        }
      },
      model.family);
}

int dim(const CovarianceModel& model) {
  return std::visit(
      [](const auto& fam) -> int {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, LGaussParams>)
          return static_cast<int>(fam.mu_v.size());
        else
          return fam.aniso.dim();
      },
      model.family);
}

double sigma2_of(const CovarianceModel& model) {
  return std::visit([](const auto& fam) { return fam.sigma2; }, model.family);
}

double eval_base(const CovarianceModel& model, const SpaceTimeLag& lag) {
  return std::visit(
      [&lag](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, LGaussParams>) {
          const MahalanobisLag m = mahalanobis_lag(lag, fam.equivalent_aniso());
          return fam.sigma2 *
                 std::exp(-0.5 * m.logdet - m.h_u * m.h_u / (fam.rho * fam.rho));
        } else if constexpr (std::is_same_v<T, LMaternParams>) {
          const MahalanobisLag m = mahalanobis_lag(lag, fam.aniso);
          return fam.sigma2 *
                 std::exp(-0.5 * m.logdet + log_matern_corr(m.h_u, fam.nu, fam.phi));
        } else if constexpr (std::is_same_v<T, LCHParams>) {
          const MahalanobisLag m = mahalanobis_lag(lag, fam.aniso);
          return fam.sigma2 * std::exp(-0.5 * m.logdet) *
                 ch_corr(m.h_u, fam.nu, fam.alpha, fam.beta);
        } else if constexpr (std::is_same_v<T, LGHParams>) {
          const MahalanobisLag m = mahalanobis_lag(lag, fam.aniso);
          const double b2 = fam.beta * fam.beta;
          const double arg = fam.phi * std::sqrt(m.h_u * m.h_u + b2);
          const double lcorr = 0.5 * fam.p * std::log1p(m.h_u * m.h_u / b2) +
                               log_bessel_k(fam.p, arg) - fam.log_norm();
          return fam.sigma2 * std::exp(-0.5 * m.logdet + lcorr);
        } else {
          const MahalanobisLag m = mahalanobis_lag(lag, fam.aniso);
          const double d = fam.aniso.dim();
          const double lcorr = std::visit(
              [&m](const auto& base) -> double {
                using B = std::decay_t<decltype(base)>;
                if constexpr (std::is_same_v<B, MaternBase>)
                  return log_matern_corr(m.h_u, base.nu, base.phi);
                else
                  return std::log(ch_corr(m.h_u, base.nu, base.alpha, base.beta));
              },
              fam.base);
          return fam.sigma2 *
                 std::exp(-fam.a_exp / (2.0 * d) * m.logdet + lcorr);
        }
      },
      model.family);
}

double eval(const CovarianceModel& model, const SpaceTimeLag& lag) {
  double v = eval_base(model, lag);
  if (lag.u == 0.0 && (lag.h.array() == 0.0).all() && model.tau2 > 0.0)
    v += sigma2_of(model) * model.tau2;
  return v;
}

}  // namespace stcov
