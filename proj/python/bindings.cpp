#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "stcov/diagnostics.hpp"
#include "stcov/fit.hpp"
#include "stcov/gp.hpp"
#include "stcov/vecchia.hpp"

namespace py = pybind11;
using namespace stcov;

namespace {

MeanMode mean_from_name(const std::string& name) {
  if (name == "zero") return MeanMode::zero;
  if (name == "profiled") return MeanMode::profiled_constant;
  throw std::invalid_argument("mean must be 'zero' or 'profiled'");
}

PlanConfig plan_config(int vecchia_m, double time_scale) {
  PlanConfig plan;
  if (vecchia_m >= 0) {
    plan.kind = PlanConfig::Kind::vecchia;
    plan.m = vecchia_m;
    plan.time_scale = time_scale;
  }
  return plan;
}

LoglikResult run_loglik(const CovarianceModel& model, const SpaceTimeDataset& data,
                        const PlanConfig& plan, MeanMode mode) {
  if (plan.kind == PlanConfig::Kind::exact) return exact_loglik(model, data, mode);
  return vecchia_loglik(model, data, make_plan(data, plan.m, plan.time_scale), mode);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Asymmetric space-time covariance models: evaluation, simulation, "
            "likelihoods, fitting, and asymmetry diagnostics.";

  py::register_exception<conditioning_error>(m, "ConditioningError", PyExc_RuntimeError);
  py::register_exception<init_error>(m, "InitError", PyExc_RuntimeError);
  py::register_exception<insufficient_data_error>(m, "InsufficientDataError",
                                                  PyExc_RuntimeError);

  m.def("family_names", [] {
    return std::vector<std::string>{"lgauss", "lmatern", "lch", "lgh", "gl_matern", "gl_ch"};
  });

  m.def("param_names",
        [](const std::string& family) { return param_names(family_from_name(family)); },
        py::arg("family"),
        "Natural-scale parameter order used by eval_cov, simulate, loglik, and fit.");

  m.def(
      "default_init",
      [](const std::string& family, const Eigen::MatrixXd& coords,
         const Eigen::VectorXd& times, const Eigen::VectorXd& values) {
        const SpaceTimeDataset data(coords, times, values);
        return default_init(family_from_name(family), data);
      },
      py::arg("family"), py::arg("coords"), py::arg("times"), py::arg("values"),
      "Data-driven starting values in param_names order.");

  m.def(
      "eval_cov",
      [](const std::string& family, const Eigen::VectorXd& params, const Eigen::MatrixXd& h,
         const Eigen::VectorXd& u) {
        if (h.rows() != u.size())
          throw std::invalid_argument("eval_cov: h and u must have matching lengths");
        const auto model = build_model(family_from_name(family), params);
        Eigen::VectorXd out(h.rows());
        for (Eigen::Index i = 0; i < h.rows(); ++i)
          out[i] = eval(model, {h.row(i).transpose(), u[i]});
        return out;
      },
      py::arg("family"), py::arg("params"), py::arg("h"), py::arg("u"),
      "Covariance at spatial lags h (rows) and time lags u; includes the nugget "
      "at exactly zero lag.");

  m.def(
      "cov_matrix",
      [](const std::string& family, const Eigen::VectorXd& params,
         const Eigen::MatrixXd& coords, const Eigen::VectorXd& times) {
        const auto model = build_model(family_from_name(family), params);
        const SpaceTimeDataset data(coords, times, Eigen::VectorXd::Zero(coords.rows()));
        return cov_matrix(model, data);
      },
      py::arg("family"), py::arg("params"), py::arg("coords"), py::arg("times"),
      "Dense covariance matrix of the point set, nugget on the diagonal.");

  m.def(
      "simulate",
      [](const std::string& family, const Eigen::VectorXd& params,
         const Eigen::MatrixXd& coords, const Eigen::VectorXd& times, std::uint64_t seed) {
        const auto model = build_model(family_from_name(family), params);
        return simulate(model, coords, times, seed);
      },
      py::arg("family"), py::arg("params"), py::arg("coords"), py::arg("times"),
      py::arg("seed"),
      "Draw one zero-mean Gaussian field realization at the given points.");

  m.def(
      "loglik",
      [](const std::string& family, const Eigen::VectorXd& params,
         const Eigen::MatrixXd& coords, const Eigen::VectorXd& times,
         const Eigen::VectorXd& values, const std::string& mean, int vecchia_m,
         double time_scale) {
        const auto model = build_model(family_from_name(family), params);
        const SpaceTimeDataset data(coords, times, values);
        const auto res = run_loglik(model, data, plan_config(vecchia_m, time_scale),
                                    mean_from_name(mean));
        py::dict d;
        d["loglik"] = res.loglik;
        d["mean_hat"] = res.mean_hat;
        return d;
      },
      py::arg("family"), py::arg("params"), py::arg("coords"), py::arg("times"),
      py::arg("values"), py::arg("mean") = "profiled", py::arg("vecchia_m") = -1,
      py::arg("time_scale") = 0.0,
      "Gaussian log-likelihood; vecchia_m >= 0 switches to the ordered "
      "nearest-neighbor approximation.");

  m.def(
      "fit",
      [](const std::string& family_s, const Eigen::MatrixXd& coords,
         const Eigen::VectorXd& times, const Eigen::VectorXd& values,
         std::optional<Eigen::VectorXd> init, std::optional<std::vector<bool>> free,
         const std::string& mean, int vecchia_m, double time_scale, int starts,
         int max_evals, std::uint64_t seed) {
        const Family family = family_from_name(family_s);
        const SpaceTimeDataset data(coords, times, values);
        const Eigen::VectorXd x0 = init ? *init : default_init(family, data);
        const std::vector<bool> mask =
            free ? *free : std::vector<bool>(param_names(family).size(), true);

        FitOptions opts;
        opts.mean_mode = mean_from_name(mean);
        opts.n_starts = starts;
        opts.max_evals = max_evals;
        opts.seed = seed;
        const auto res = fit(data, family, x0, mask, plan_config(vecchia_m, time_scale), opts);

        py::dict d;
        d["family"] = family_name(res.family);
        d["names"] = res.names;
        d["params"] = res.params_hat;
        d["free"] = res.free_mask;
        d["at_bound"] = res.at_bound;
        d["loglik"] = res.loglik;
        d["aic"] = res.aic;
        d["bic"] = res.bic;
        d["n_obs"] = res.n_obs;
        d["k_params"] = res.k_params;
        d["n_evals"] = res.n_evals;
        d["converged"] = res.converged;
        d["mean_hat"] = res.mean_hat;
        return d;
      },
      py::arg("family"), py::arg("coords"), py::arg("times"), py::arg("values"),
      py::arg("init") = std::nullopt, py::arg("free") = std::nullopt,
      py::arg("mean") = "profiled", py::arg("vecchia_m") = -1, py::arg("time_scale") = 0.0,
      py::arg("starts") = 3, py::arg("max_evals") = 5000, py::arg("seed") = 0,
      "Maximum-likelihood fit via Nelder-Mead multistart.  init defaults to "
      "default_init, free to all-free; entries with free[i] = False stay fixed "
      "at init[i].");

  m.def(
      "asymmetry",
      [](const Eigen::MatrixXd& stations, const std::vector<std::int64_t>& time_index,
         const Eigen::MatrixXd& z,
         const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& observed,
         const std::vector<int>& lags) {
        const StationGrid grid(stations, time_index, z, observed);
        const int ns = grid.n_stations();
        std::vector<Eigen::MatrixXd> deltas;
        Eigen::MatrixXd bars(ns, static_cast<Eigen::Index>(lags.size()));
        for (size_t li = 0; li < lags.size(); ++li) {
          Eigen::MatrixXd D(ns, ns);
          for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j) D(i, j) = delta(grid, i, j, lags[li]);
          deltas.push_back(std::move(D));
          for (int j = 0; j < ns; ++j) bars(j, static_cast<Eigen::Index>(li)) =
              delta_bar(grid, j, lags[li]);
        }
        py::dict d;
        d["lags"] = lags;
        d["delta"] = deltas;
        d["delta_bar"] = bars;
        return d;
      },
      py::arg("stations"), py::arg("time_index"), py::arg("z"), py::arg("observed"),
      py::arg("lags"),
      "Directional semivariogram differences on a station-by-time panel: "
      "delta[k][i, j] = g(i, j; k) - g(j, i; k) and its per-station average.");
}
