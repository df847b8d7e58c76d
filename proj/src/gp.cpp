#include "stcov/gp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <vector>

#include "stcov/rng.hpp"

namespace stcov {

namespace {
constexpr double kLog2Pi = 1.83787706640934548356;
}

Eigen::MatrixXd cov_matrix(const CovarianceModel& model, const SpaceTimeDataset& data) {
  validate(model);
  const int n = data.size();
  const int d = data.dim();
  if (d != dim(model))
    throw std::invalid_argument("cov_matrix: model/data dimension mismatch");
  const double s2 = sigma2_of(model);
  Eigen::MatrixXd sigma(n, n);
  SpaceTimeLag lag;
  lag.h.resize(d);
  for (int i = 0; i < n; ++i) {
    sigma(i, i) = s2 * (1.0 + model.tau2);
    for (int j = 0; j < i; ++j) {
      lag.h = data.coords.row(i) - data.coords.row(j);
      lag.u = data.times[i] - data.times[j];
      const double v = eval_base(model, lag);
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  }
  return sigma;
}

Eigen::MatrixXd jittered_cholesky(Eigen::MatrixXd sigma) {
  const double mean_diag = sigma.diagonal().mean();
  /* zero diagonal + positive semidefiniteness force the whole matrix to be
   * zero (degenerate sigma2 = 0 model); its factor is the zero matrix */
  if (mean_diag == 0.0) return Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols());
  double added = 0.0;
  std::vector<double> attempted;
  for (double rel : {0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4}) {
    const double target = rel * mean_diag;
    if (target > 0.0) {
      sigma.diagonal().array() += target - added;
      added = target;
      attempted.push_back(rel);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  std::ostringstream msg;
  msg << "covariance factorization failed; attempted jitters (x mean diagonal):";
  for (double rel : attempted) msg << " " << rel;
  throw conditioning_error(msg.str());
}

LoglikResult exact_loglik(const CovarianceModel& model, const SpaceTimeDataset& data,
                          MeanMode mean_mode) {
  const int n = data.size();
  const Eigen::MatrixXd L = jittered_cholesky(cov_matrix(model, data));

  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(L(i, i));

  /* Whitened data and ones: w = L^-1 y, t = L^-1 1. */
  const Eigen::VectorXd w = L.triangularView<Eigen::Lower>().solve(data.values);
  double mean_hat = 0.0;
  double quad;
  if (mean_mode == MeanMode::profiled_constant) {
    const Eigen::VectorXd t =
        L.triangularView<Eigen::Lower>().solve(Eigen::VectorXd::Ones(n));
    mean_hat = t.dot(w) / t.dot(t);
    quad = (w - mean_hat * t).squaredNorm();
  } else {
    quad = w.squaredNorm();
  }
  return {-0.5 * (n * kLog2Pi + logdet + quad), mean_hat};
}

Eigen::VectorXd simulate(const CovarianceModel& model, const Eigen::MatrixXd& coords,
                         const Eigen::VectorXd& times, std::uint64_t seed) {
  const int n = static_cast<int>(times.size());
  const SpaceTimeDataset data(coords, times, Eigen::VectorXd::Zero(n));
  const Eigen::MatrixXd L = jittered_cholesky(cov_matrix(model, data));
  NormalStream rng(seed);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.next();
  return L.triangularView<Eigen::Lower>() * z;
}

}  // namespace stcov
