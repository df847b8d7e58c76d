#include "stcov/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "stcov/gp.hpp"
#include "stcov/rng.hpp"

namespace stcov {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBoundTol = 1e-6;

double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * kPi); /* [-pi, pi] */
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double to_unconstrained(double value, TransformKind kind) {
  switch (kind) {
    case TransformKind::log_positive:
      return std::log(value);
    case TransformKind::angle_wrap:
    case TransformKind::identity:
      return value;
  }
  return value;
}

double to_natural(double u, TransformKind kind) {
  switch (kind) {
    case TransformKind::log_positive:
      return std::exp(u);
    case TransformKind::angle_wrap:
      return wrap_angle(u);
    case TransformKind::identity:
      return u;
  }
  return u;
}

Eigen::Matrix2d spd_from_spectral(double l1, double l2, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  return R * Eigen::Vector2d(l1, l2).asDiagonal() * R.transpose();
}

/* Shared anisotropy block appended to every family's own parameters. */
void append_plane_defs(std::vector<ParamDef>& defs) {
  defs.push_back({"lambda0", TransformKind::log_positive});
  defs.push_back({"theta0", TransformKind::angle_wrap});
  defs.push_back({"lambda1", TransformKind::log_positive});
  defs.push_back({"lambda2", TransformKind::log_positive});
  defs.push_back({"theta1", TransformKind::angle_wrap});
}

}  // namespace

std::string family_name(Family family) {
  switch (family) {
    case Family::lgauss:
      return "lgauss";
    case Family::lmatern:
      return "lmatern";
    case Family::lch:
      return "lch";
    case Family::lgh:
      return "lgh";
    case Family::gl_matern:
      return "gl_matern";
    case Family::gl_ch:
      return "gl_ch";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "lgauss") return Family::lgauss;
  if (name == "lmatern") return Family::lmatern;
  if (name == "lch") return Family::lch;
  if (name == "lgh") return Family::lgh;
  if (name == "gl_matern") return Family::gl_matern;
  if (name == "gl_ch") return Family::gl_ch;
  throw std::invalid_argument("unknown family '" + name + "'");
}

std::vector<ParamDef> param_defs(Family family) {
  std::vector<ParamDef> defs;
  defs.push_back({"sigma2", TransformKind::log_positive});
  switch (family) {
    case Family::lgauss:
      defs.push_back({"rho", TransformKind::log_positive});
      break;
    case Family::lmatern:
      defs.push_back({"nu", TransformKind::log_positive});
      defs.push_back({"phi", TransformKind::log_positive});
      break;
    case Family::lch:
      defs.push_back({"nu", TransformKind::log_positive});
      defs.push_back({"alpha", TransformKind::log_positive});
      defs.push_back({"beta", TransformKind::log_positive});
      break;
    case Family::lgh:
      defs.push_back({"p", TransformKind::identity});
      defs.push_back({"phi", TransformKind::log_positive});
      defs.push_back({"beta", TransformKind::log_positive});
      break;
    case Family::gl_matern:
      defs.push_back({"nu", TransformKind::log_positive});
      defs.push_back({"phi", TransformKind::log_positive});
      defs.push_back({"a_exp", TransformKind::log_positive});
      break;
    case Family::gl_ch:
      defs.push_back({"nu", TransformKind::log_positive});
      defs.push_back({"alpha", TransformKind::log_positive});
      defs.push_back({"beta", TransformKind::log_positive});
      defs.push_back({"a_exp", TransformKind::log_positive});
      break;
  }
  append_plane_defs(defs);
  defs.push_back({"tau2", TransformKind::log_positive});
  return defs;
}

std::vector<std::string> param_names(Family family) {
  std::vector<std::string> names;
  for (const auto& d : param_defs(family)) names.push_back(d.name);
  return names;
}

CovarianceModel build_model(Family family, const Eigen::VectorXd& p) {
  const auto defs = param_defs(family);
  if (p.size() != static_cast<Eigen::Index>(defs.size()))
    throw std::invalid_argument("build_model: expected " + std::to_string(defs.size()) +
                                " parameters for " + family_name(family) + ", got " +
                                std::to_string(p.size()));
  const int na = static_cast<int>(defs.size()) - 6; /* anisotropy block offset */
  const double lambda0 = p[na], theta0 = p[na + 1];
  const double l1 = p[na + 2], l2 = p[na + 3], theta1 = p[na + 4];
  const double tau2 = p[na + 5];

  auto assemble = [&]() -> CovarianceModel {
    if (family == Family::lgauss) {
      Eigen::VectorXd mu_v(2);
      mu_v << lambda0 * std::cos(theta0), lambda0 * std::sin(theta0);
      return {LGaussParams(p[0], p[1], mu_v, spd_from_spectral(l1, l2, theta1)), tau2};
    }
    Anisotropy aniso = Anisotropy::plane(lambda0, theta0, l1, l2, theta1);
    switch (family) {
      case Family::lmatern:
        return {LMaternParams{p[0], p[1], p[2], std::move(aniso)}, tau2};
      case Family::lch:
        return {LCHParams{p[0], p[1], p[2], p[3], std::move(aniso)}, tau2};
      case Family::lgh:
        return {LGHParams(p[0], p[1], p[2], p[3], std::move(aniso)), tau2};
      case Family::gl_matern:
        return {GLParams{MaternBase{p[1], p[2]}, p[3], p[0], std::move(aniso)}, tau2};
      case Family::gl_ch:
        return {GLParams{CHBase{p[1], p[2], p[3]}, p[4], p[0], std::move(aniso)}, tau2};
      default:
        throw std::invalid_argument("build_model: unknown family");
    }
  };
  CovarianceModel model = assemble();
  validate(model);
  return model;
}

Eigen::VectorXd default_init(Family family, const SpaceTimeDataset& data) {
  double var = 1.0;
  if (data.size() > 1) {
    const double mean = data.values.mean();
    var = (data.values.array() - mean).square().sum() / (data.size() - 1);
    if (!(var > 0.0)) var = 1.0;
  }
  const double ts = default_time_scale(data);
  const Eigen::VectorXd lo = data.coords.colwise().minCoeff();
  const Eigen::VectorXd hi = data.coords.colwise().maxCoeff();
  const double trange = data.times.maxCoeff() - data.times.minCoeff();
  double span = std::sqrt((hi - lo).squaredNorm() + ts * ts * trange * trange);
  if (!(span > 0.0)) span = 1.0;
  const double scale = 0.2 * span;

  const auto defs = param_defs(family);
  Eigen::VectorXd init(defs.size());
  for (int i = 0; i < static_cast<int>(defs.size()); ++i) {
    const std::string& n = defs[i].name;
    if (n == "sigma2")
      init[i] = var;
    else if (n == "rho" || n == "beta")
      init[i] = scale;
    else if (n == "phi")
      init[i] = family == Family::lgh ? 1.0 / scale : scale;
    else if (n == "nu")
      init[i] = 0.5;
    else if (n == "alpha" || n == "a_exp")
      init[i] = 1.0;
    else if (n == "p")
      init[i] = 0.5;
    else if (n == "lambda0" || n == "lambda1" || n == "lambda2")
      init[i] = 0.01;
    else if (n == "theta0" || n == "theta1")
      init[i] = 0.0;
    else if (n == "tau2")
      init[i] = 0.1;
    else
      init[i] = 1.0;
  }
  return init;
}

double aic_of(double loglik, int k) { return 2.0 * k - 2.0 * loglik; }
double bic_of(double loglik, int k, double n_obs) {
  return k * std::log(n_obs) - 2.0 * loglik;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/* Nelder-Mead state shared across restarts: counts every objective
 * evaluation and records the running best log-likelihood. */
struct Objective {
  std::function<double(const Eigen::VectorXd&)> f;
  int evals = 0;
  double best_f = kInf;
  bool record = false;
  std::vector<TracePoint>* trace = nullptr;

  double operator()(const Eigen::VectorXd& u) {
    const double v = f(u);
    ++evals;
    if (v < best_f) best_f = v;
    if (record) trace->push_back({evals, -best_f});
    return v;
  }
};

struct NmOutcome {
  Eigen::VectorXd u;
  double f = kInf;
  bool converged = false;
};

NmOutcome nelder_mead(Objective& obj, const Eigen::VectorXd& u0, const FitOptions& opt) {
  const int k = static_cast<int>(u0.size());
  const int budget = obj.evals + opt.max_evals;
  auto spent = [&] { return obj.evals >= budget; };

  std::vector<Eigen::VectorXd> x(k + 1, u0);
  std::vector<double> fx(k + 1, kInf);
  for (int j = 0; j < k; ++j) x[j + 1][j] += std::max(0.1, 0.1 * std::abs(u0[j]));
  for (int j = 0; j <= k && !spent(); ++j) fx[j] = obj(x[j]);

  std::vector<int> ord(k + 1);
  std::iota(ord.begin(), ord.end(), 0);
  auto reorder = [&] {
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return fx[a] < fx[b]; });
  };
  auto best_outcome = [&] {
    reorder();
    return NmOutcome{x[ord[0]], fx[ord[0]], false};
  };
  if (spent()) return best_outcome();

  while (true) {
    reorder();
    const int ib = ord[0], iw = ord[k], is = ord[k - 1];
    double diam = 0.0;
    for (int j = 1; j <= k; ++j)
      diam = std::max(diam, (x[ord[j]] - x[ib]).lpNorm<Eigen::Infinity>());
    if (fx[iw] - fx[ib] < opt.spread_tol && diam < opt.diam_tol)
      return {x[ib], fx[ib], true};
    if (spent()) return {x[ib], fx[ib], false};

    Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
    for (int j = 0; j <= k; ++j)
      if (j != iw) c += x[j];
    c /= k;

    const Eigen::VectorXd xr = c + (c - x[iw]);
    const double fr = obj(xr);
    if (fr < fx[ib]) {
      if (spent()) {
        x[iw] = xr;
        fx[iw] = fr;
        return best_outcome();
      }
      const Eigen::VectorXd xe = c + 2.0 * (c - x[iw]);
      const double fe = obj(xe);
      if (fe < fr) {
        x[iw] = xe;
        fx[iw] = fe;
      } else {
        x[iw] = xr;
        fx[iw] = fr;
      }
    } else if (fr < fx[is]) {
      x[iw] = xr;
      fx[iw] = fr;
    } else {
      if (spent()) return best_outcome();
      if (fr < fx[iw]) { /* outside contraction */
        const Eigen::VectorXd xc = c + 0.5 * (xr - c);
        const double fc = obj(xc);
        if (fc <= fr) {
          x[iw] = xc;
          fx[iw] = fc;
        } else {
          goto shrink;
        }
      } else { /* inside contraction */
        const Eigen::VectorXd xc = c + 0.5 * (x[iw] - c);
        const double fc = obj(xc);
        if (fc < fx[iw]) {
          x[iw] = xc;
          fx[iw] = fc;
        } else {
          goto shrink;
        }
      }
    }
    continue;
  shrink:
    for (int j = 0; j <= k; ++j) {
      if (j == ord[0]) continue;
      x[j] = x[ord[0]] + 0.5 * (x[j] - x[ord[0]]);
      if (spent()) return best_outcome();
      fx[j] = obj(x[j]);
    }
  }
}

}  // namespace

FitResult fit(const SpaceTimeDataset& data, Family family, const Eigen::VectorXd& init,
              const std::vector<bool>& free, const PlanConfig& plan_config,
              const FitOptions& options) {
  const auto defs = param_defs(family);
  const int np = static_cast<int>(defs.size());
  if (init.size() != np)
    throw std::invalid_argument("fit: init has " + std::to_string(init.size()) +
                                " entries, expected " + std::to_string(np));
  if (static_cast<int>(free.size()) != np)
    throw std::invalid_argument("fit: free mask size mismatch");
  if (data.dim() != 2) throw std::invalid_argument("fit: planar families need d = 2 data");

  /* Working copy: wrap angles, nudge free positive parameters off zero so the
   * log transform has a finite starting point.  Negative starting values are
   * not rescued; they surface as an init error below. */
  Eigen::VectorXd work = init;
  for (int i = 0; i < np; ++i) {
    if (defs[i].transform == TransformKind::angle_wrap) work[i] = wrap_angle(work[i]);
    if (free[i] && defs[i].transform == TransformKind::log_positive && work[i] >= 0.0 &&
        work[i] < 1e-8)
      work[i] = 1e-6;
  }
  std::vector<int> free_idx;
  for (int i = 0; i < np; ++i)
    if (free[i]) free_idx.push_back(i);
  const int k = static_cast<int>(free_idx.size());

  VecchiaPlan plan;
  if (plan_config.kind == PlanConfig::Kind::vecchia)
    plan = make_plan(data, plan_config.m, plan_config.time_scale);

  auto eval_ll = [&](const CovarianceModel& model) {
    return plan_config.kind == PlanConfig::Kind::exact
               ? exact_loglik(model, data, options.mean_mode)
               : vecchia_loglik(model, data, plan, options.mean_mode);
  };
  auto natural_full = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd p = work;
    for (int j = 0; j < k; ++j) p[free_idx[j]] = to_natural(u[j], defs[free_idx[j]].transform);
    return p;
  };

  FitResult result;
  result.family = family;
  result.names = param_names(family);
  result.free_mask = free;
  result.plan = plan_config;
  result.n_obs = data.size();
  result.k_params = k;

  Objective obj;
  obj.record = options.record_trace;
  obj.trace = &result.trace;
  obj.f = [&](const Eigen::VectorXd& u) -> double {
    try {
      return -eval_ll(build_model(family, natural_full(u))).loglik;
    } catch (const conditioning_error&) {
      return kInf;
    } catch (const std::invalid_argument&) {
      return kInf;
    } catch (const std::domain_error&) {
      return kInf;
    } catch (const std::overflow_error&) {
      return kInf;
    } catch (const std::range_error&) {
      return kInf;
    }
  };

  Eigen::VectorXd u0(k);
  for (int j = 0; j < k; ++j) u0[j] = to_unconstrained(work[free_idx[j]], defs[free_idx[j]].transform);

  const double f0 = obj(u0);
  if (!std::isfinite(f0))
    throw init_error("fit: objective not finite at the initial parameters for " +
                     family_name(family));

  Eigen::VectorXd best_u = u0;
  double best_f = f0;
  bool best_converged = k == 0;

  if (k > 0) {
    NormalStream perturb(options.seed ^ 0x9E3779B97F4A7C15ull);
    for (int s = 0; s < std::max(1, options.n_starts); ++s) {
      Eigen::VectorXd us = u0;
      if (s > 0) {
        for (int j = 0; j < k; ++j) us[j] += 0.5 * perturb.next();
        if (!std::isfinite(obj(us))) continue; /* unusable restart; skip */
      }
      NmOutcome out = nelder_mead(obj, us, options);
      if (out.f < best_f) {
        best_f = out.f;
        best_u = out.u;
        best_converged = out.converged;
      } else if (out.f == best_f && out.converged) {
        best_converged = true;
      }
    }
  }

  result.params_hat = natural_full(best_u);
  result.n_evals = obj.evals;
  result.converged = best_converged;
  const LoglikResult ll = eval_ll(build_model(family, result.params_hat));
  result.loglik = ll.loglik;
  result.mean_hat = ll.mean_hat;
  result.aic = aic_of(result.loglik, k);
  result.bic = bic_of(result.loglik, k, result.n_obs);
  result.at_bound.assign(np, false);
  for (int i = 0; i < np; ++i)
    result.at_bound[i] = free[i] && defs[i].transform == TransformKind::log_positive &&
                         result.params_hat[i] <= kBoundTol;
  return result;
}

std::vector<ComparisonRow> compare(const std::vector<FitResult>& results,
                                   const std::vector<std::string>& labels) {
  if (results.size() != labels.size())
    throw std::invalid_argument("compare: results/labels size mismatch");
  for (size_t i = 1; i < results.size(); ++i) {
    const auto& a = results[0].plan;
    const auto& b = results[i].plan;
    const bool same = a.kind == b.kind &&
                      (a.kind == PlanConfig::Kind::exact ||
                       (a.m == b.m && a.time_scale == b.time_scale));
    if (!same) throw std::invalid_argument("compare: results use different likelihood plans");
  }
  std::vector<ComparisonRow> rows;
  for (size_t i = 0; i < results.size(); ++i)
    rows.push_back({labels[i], results[i].loglik, results[i].aic, results[i].bic,
                    results[i].k_params});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) { return a.aic < b.aic; });
  return rows;
}

}  // namespace stcov
