#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

#include "stcov/dataset.hpp"
#include "stcov/kernels.hpp"

namespace stcov {

enum class MeanMode { zero, profiled_constant };

/* Raised when the covariance cannot be factorized even after the escalating
 * jitter policy; the message lists the jitter levels that were attempted. */
struct conditioning_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Pairwise covariance matrix: entry (i,j) is the kernel at the lag between
 * rows i and j; the nugget sigma2 tau2 is applied on the diagonal only, so
 * diagonal entries equal sigma2 (1 + tau2). */
Eigen::MatrixXd cov_matrix(const CovarianceModel& model, const SpaceTimeDataset& data);

struct LoglikResult {
  double loglik;
  double mean_hat;
};

/* Gaussian log-likelihood -1/2 [n ln 2pi + ln|S| + r' S^-1 r] with
 * r = values - mean_hat 1; profiled_constant uses the GLS estimate
 * mean_hat = (1' S^-1 y) / (1' S^-1 1). */
LoglikResult exact_loglik(const CovarianceModel& model, const SpaceTimeDataset& data,
                          MeanMode mean_mode);

/* y = L z with L the (jitter-repaired) Cholesky factor and z standard normals
 * from the counter-based stream keyed by seed; bit-reproducible. */
Eigen::VectorXd simulate(const CovarianceModel& model, const Eigen::MatrixXd& coords,
                         const Eigen::VectorXd& times, std::uint64_t seed);

/* Cholesky with the escalating-jitter repair policy (exposed for reuse by the
 * simulation and likelihood paths): attempts jitter 0, then 1e-8..1e-4 times
 * the mean diagonal, then raises conditioning_error. */
Eigen::MatrixXd jittered_cholesky(Eigen::MatrixXd sigma);

}  // namespace stcov
