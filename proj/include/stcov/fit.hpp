#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stcov/kernels.hpp"
#include "stcov/vecchia.hpp"

namespace stcov {

enum class Family { lgauss, lmatern, lch, lgh, gl_matern, gl_ch };

std::string family_name(Family family);
Family family_from_name(const std::string& name); /* throws invalid_argument */

enum class TransformKind { log_positive, angle_wrap, identity };

/* One scalar parameter of a family: its public name and the bijection used to
 * optimize it on the unconstrained scale. */
struct ParamDef {
  std::string name;
  TransformKind transform;
};

/* Parameter layout for a family with planar (d = 2) anisotropy.  Vectors of
 * natural-scale values used throughout fitting follow this order. */
std::vector<ParamDef> param_defs(Family family);
std::vector<std::string> param_names(Family family);

/* Assemble a d = 2 model from a natural-scale parameter vector in param_defs
 * order.  Throws invalid_argument on size mismatch or invalid values. */
CovarianceModel build_model(Family family, const Eigen::VectorXd& params);

/* Data-driven starting values: sample variance for sigma2, 20% of the scaled
 * span for range-like scales (inverted for the L-GH rate phi), small positive
 * velocity-spread entries, tau2 = 0.1. */
Eigen::VectorXd default_init(Family family, const SpaceTimeDataset& data);

/* Likelihood evaluation plan: exact dense Cholesky or ordered nearest-
 * neighbor (Vecchia) approximation; time_scale <= 0 selects the default. */
struct PlanConfig {
  enum class Kind { exact, vecchia };
  Kind kind = Kind::exact;
  int m = 30;
  double time_scale = 0.0;
};

struct FitOptions {
  int max_evals = 5000; /* objective-evaluation cap per start */
  double spread_tol = 1e-6;
  double diam_tol = 1e-6;
  int n_starts = 3; /* first start is the supplied init, others perturbed */
  std::uint64_t seed = 0;
  bool record_trace = false;
  MeanMode mean_mode = MeanMode::profiled_constant;
};

struct TracePoint {
  int eval;       /* objective evaluations consumed so far */
  double best_ll; /* best log-likelihood seen after this evaluation */
};

struct FitResult {
  Family family;
  std::vector<std::string> names;
  Eigen::VectorXd params_hat; /* natural scale, param_defs order */
  std::vector<bool> free_mask;
  std::vector<bool> at_bound; /* free positive parameter within 1e-6 of 0 */
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int n_obs = 0;
  int k_params = 0; /* number of free parameters */
  int n_evals = 0;  /* total objective evaluations across starts */
  bool converged = false;
  double mean_hat = 0.0;
  PlanConfig plan;
  std::vector<TracePoint> trace;
};

double aic_of(double loglik, int k);
double bic_of(double loglik, int k, double n_obs);

/* Initial objective could not be evaluated (invalid init or conditioning
 * failure at the starting point). */
class init_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* Maximize the selected log-likelihood over the free parameters with
 * Nelder-Mead on the transformed scale.  `init` is a full natural-scale
 * vector; entries with free[i] = false stay fixed at init[i].  Reports the
 * best point found even when the evaluation cap is hit. */
FitResult fit(const SpaceTimeDataset& data, Family family, const Eigen::VectorXd& init,
              const std::vector<bool>& free, const PlanConfig& plan_config,
              const FitOptions& options);

struct ComparisonRow {
  std::string label;
  double loglik, aic, bic;
  int k_params;
};

/* Rank fits of the same data under the same plan by AIC (ascending).  Mixed
 * plans throw invalid_argument. */
std::vector<ComparisonRow> compare(const std::vector<FitResult>& results,
                                   const std::vector<std::string>& labels);

}  // namespace stcov
