#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "csv_io.hpp"
#include "json.hpp"
#include "run_config.hpp"
#include "stcov/diagnostics.hpp"
#include "stcov/fit.hpp"
#include "stcov/gp.hpp"

namespace {

using namespace stcov;
using namespace stcov_cli;

/* Kernel-parameter keys shared by eval-grid/simulate (concrete defaults) and
 * fit (sentinel `auto` = data-driven starting value). */
const std::vector<std::pair<std::string, std::string>> kParamDefaults = {
    {"sigma2", "1"},  {"rho", "1"},     {"nu", "0.5"},     {"phi", "1"},
    {"alpha", "1"},   {"beta", "1"},    {"p", "0.5"},      {"a_exp", "1"},
    {"lambda0", "0"}, {"theta0", "0"},  {"lambda1", "0.1"}, {"lambda2", "0.1"},
    {"theta1", "0"},  {"tau2", "0"}};

void define_param_keys(RunConfig& cfg, bool for_fit) {
  for (const auto& [key, dflt] : kParamDefaults)
    cfg.define(key, for_fit ? "auto" : dflt,
               for_fit ? "starting value for " + key : "model parameter " + key);
  if (for_fit)
    for (const auto& [key, dflt] : kParamDefaults)
      cfg.define("fix_" + key, "0", "hold " + key + " at its starting value (0/1)");
}

Eigen::VectorXd params_from_config(Family family, const RunConfig& cfg) {
  const auto names = param_names(family);
  Eigen::VectorXd p(names.size());
  for (size_t i = 0; i < names.size(); ++i) p[i] = cfg.num(names[i]);
  return p;
}

std::ofstream open_output(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output file '" + path + "'");
  for (const auto& line : cfg.echo_lines()) out << line << "\n";
  return out;
}

void echo_to_stdout(const RunConfig& cfg) {
  for (const auto& line : cfg.echo_lines()) std::printf("%s\n", line.c_str());
}

std::vector<double> axis(double lo, double hi, long long steps, const std::string& key) {
  if (steps < 1) throw config_error("'" + key + "' must be >= 1");
  std::vector<double> v;
  for (long long i = 0; i < steps; ++i)
    v.push_back(steps == 1 ? lo : lo + i * (hi - lo) / static_cast<double>(steps - 1));
  return v;
}

int run_eval_grid(const std::vector<std::string>& args) {
  RunConfig cfg("eval-grid");
  cfg.define_required("family", "lgauss|lmatern|lch|lgh|gl_matern|gl_ch");
  define_param_keys(cfg, false);
  cfg.define("h1_min", "-2", "first spatial-lag axis start");
  cfg.define("h1_max", "2", "first spatial-lag axis end");
  cfg.define("h1_steps", "41", "first spatial-lag axis node count");
  cfg.define("h2", "0", "fixed second spatial-lag coordinate");
  cfg.define("u_min", "-2", "temporal-lag axis start");
  cfg.define("u_max", "2", "temporal-lag axis end");
  cfg.define("u_steps", "41", "temporal-lag axis node count");
  cfg.define("out", "grid.csv", "output CSV path");
  if (!cfg.parse(args)) return 0;
  echo_to_stdout(cfg);

  const Family family = family_from_name(cfg.str("family"));
  const CovarianceModel model = build_model(family, params_from_config(family, cfg));
  const auto h1 = axis(cfg.num("h1_min"), cfg.num("h1_max"), cfg.integer("h1_steps"), "h1_steps");
  const auto u = axis(cfg.num("u_min"), cfg.num("u_max"), cfg.integer("u_steps"), "u_steps");
  const double h2 = cfg.num("h2");

  std::ofstream out = open_output(cfg.str("out"), cfg);
  out << "h1,h2,u,value\n";
  SpaceTimeLag lag;
  lag.h.resize(2);
  for (double uv : u)
    for (double h1v : h1) {
      lag.h << h1v, h2;
      lag.u = uv;
      out << format_double(h1v) << ',' << format_double(h2) << ',' << format_double(uv)
          << ',' << format_double(eval(model, lag)) << "\n";
    }
  std::printf("wrote %s (%zu rows)\n", cfg.str("out").c_str(), h1.size() * u.size());
  return 0;
}

int run_simulate(const std::vector<std::string>& args) {
  RunConfig cfg("simulate");
  cfg.define_required("family", "lgauss|lmatern|lch|lgh|gl_matern|gl_ch");
  define_param_keys(cfg, false);
  cfg.define("seed", "0", "random seed");
  cfg.define("points", "", "design CSV (header x,y,t); overrides the lattice keys");
  cfg.define("nx", "4", "lattice node count, first spatial axis");
  cfg.define("ny", "4", "lattice node count, second spatial axis");
  cfg.define("nt", "4", "lattice node count, time axis");
  cfg.define("dx", "1", "lattice spacing, first spatial axis");
  cfg.define("dy", "1", "lattice spacing, second spatial axis");
  cfg.define("dt", "1", "lattice spacing, time axis");
  cfg.define("out", "sim.csv", "output CSV path");
  if (!cfg.parse(args)) return 0;
  echo_to_stdout(cfg);

  const Family family = family_from_name(cfg.str("family"));
  const CovarianceModel model = build_model(family, params_from_config(family, cfg));

  Eigen::MatrixXd coords;
  Eigen::VectorXd times;
  if (!cfg.str("points").empty()) {
    DesignCsv design = read_design_csv(cfg.str("points"));
    coords = std::move(design.coords);
    times = std::move(design.times);
  } else {
    const long long nx = cfg.integer("nx"), ny = cfg.integer("ny"), nt = cfg.integer("nt");
    if (nx < 1 || ny < 1 || nt < 1)
      throw config_error("lattice sizes nx, ny, nt must be >= 1");
    const double dx = cfg.num("dx"), dy = cfg.num("dy"), dt = cfg.num("dt");
    const long long n = nx * ny * nt;
    coords.resize(n, 2);
    times.resize(n);
    long long r = 0;
    for (long long k = 0; k < nt; ++k)
      for (long long j = 0; j < ny; ++j)
        for (long long i = 0; i < nx; ++i, ++r) {
          coords(r, 0) = i * dx;
          coords(r, 1) = j * dy;
          times[r] = k * dt;
        }
  }

  const Eigen::VectorXd y =
      simulate(model, coords, times, static_cast<std::uint64_t>(cfg.integer("seed")));
  std::ofstream out = open_output(cfg.str("out"), cfg);
  out << "x,y,t,value\n";
  for (Eigen::Index i = 0; i < y.size(); ++i)
    out << format_double(coords(i, 0)) << ',' << format_double(coords(i, 1)) << ','
        << format_double(times[i]) << ',' << format_double(y[i]) << "\n";
  std::printf("wrote %s (%lld rows)\n", cfg.str("out").c_str(),
              static_cast<long long>(y.size()));
  return 0;
}

int run_fit(const std::vector<std::string>& args) {
  RunConfig cfg("fit");
  cfg.define_required("family", "lgauss|lmatern|lch|lgh|gl_matern|gl_ch");
  cfg.define_required("data", "input CSV (header x,y,t,value[,station])");
  define_param_keys(cfg, true);
  cfg.define("vecchia_m", "30", "neighbor count; 0 selects the exact likelihood");
  cfg.define("time_scale", "0", "space-time metric scaling; 0 selects the default");
  cfg.define("mean", "profiled", "mean handling: zero | profiled");
  cfg.define("seed", "0", "seed for optimizer restarts");
  cfg.define("starts", "3", "number of optimizer starts");
  cfg.define("max_evals", "5000", "objective evaluation cap per start");
  cfg.define("out", "fit_result.txt", "result path (JSON mirror at <out>.json)");
  if (!cfg.parse(args)) return 0;
  echo_to_stdout(cfg);

  const Family family = family_from_name(cfg.str("family"));
  const PointsCsv table = read_points_csv(cfg.str("data"), false);
  const SpaceTimeDataset data(table.coords, table.times, table.values);
  if (data.has_duplicates())
    throw csv_error("fit: data file contains duplicate (x, y, t) rows");

  const auto names = param_names(family);
  Eigen::VectorXd init = default_init(family, data);
  std::vector<bool> free_mask(names.size(), true);
  for (size_t i = 0; i < names.size(); ++i) {
    if (const auto v = cfg.maybe_num(names[i])) init[i] = *v;
    free_mask[i] = cfg.integer("fix_" + names[i]) == 0;
  }

  PlanConfig plan;
  const long long m = cfg.integer("vecchia_m");
  if (m < 0) throw config_error("'vecchia_m' must be >= 0");
  plan.kind = m == 0 ? PlanConfig::Kind::exact : PlanConfig::Kind::vecchia;
  plan.m = static_cast<int>(m);
  plan.time_scale = cfg.num("time_scale");

  FitOptions options;
  options.max_evals = static_cast<int>(cfg.integer("max_evals"));
  options.n_starts = static_cast<int>(cfg.integer("starts"));
  options.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  if (cfg.str("mean") == "zero")
    options.mean_mode = MeanMode::zero;
  else if (cfg.str("mean") == "profiled")
    options.mean_mode = MeanMode::profiled_constant;
  else
    throw config_error("'mean' must be zero or profiled");

  const FitResult result = fit(data, family, init, free_mask, plan, options);

  /* Summary table. */
  std::printf("\n%-10s %s\n", "family", family_name(family).c_str());
  std::printf("%-10s %d\n", "n", result.n_obs);
  if (plan.kind == PlanConfig::Kind::exact)
    std::printf("%-10s exact\n", "plan");
  else
    std::printf("%-10s vecchia m=%d\n", "plan", plan.m);
  std::printf("%-10s %.6f\n", "loglik", result.loglik);
  std::printf("%-10s %.6f\n", "aic", result.aic);
  std::printf("%-10s %.6f\n", "bic", result.bic);
  std::printf("%-10s %s\n", "converged", result.converged ? "yes" : "no");
  std::printf("%-10s %d\n", "n_evals", result.n_evals);
  std::printf("%-10s %.6g\n", "mean_hat", result.mean_hat);
  std::printf("\n%-10s %-22s %s\n", "param", "estimate", "note");
  for (size_t i = 0; i < names.size(); ++i) {
    std::string note;
    if (!result.free_mask[i]) note = "fixed";
    if (result.at_bound[i]) note += note.empty() ? "at bound" : ", at bound";
    std::printf("%-10s %-22.10g %s\n", names[i].c_str(), result.params_hat[i], note.c_str());
  }

  std::ofstream out = open_output(cfg.str("out"), cfg);
  out << "family = " << family_name(family) << "\n";
  for (size_t i = 0; i < names.size(); ++i)
    out << names[i] << " = " << format_double(result.params_hat[i]) << "\n";
  out << "loglik = " << format_double(result.loglik) << "\n";
  out << "aic = " << format_double(result.aic) << "\n";
  out << "bic = " << format_double(result.bic) << "\n";
  out << "n = " << result.n_obs << "\n";
  out << "m = " << plan.m << "\n";
  out << "k_params = " << result.k_params << "\n";
  out << "converged = " << (result.converged ? 1 : 0) << "\n";
  out << "n_evals = " << result.n_evals << "\n";
  out << "seed = " << cfg.integer("seed") << "\n";
  out << "mean_hat = " << format_double(result.mean_hat) << "\n";

  nlohmann::json j;
  j["family"] = family_name(family);
  for (size_t i = 0; i < names.size(); ++i) {
    j["params"][names[i]] = result.params_hat[i];
    j["free"][names[i]] = static_cast<bool>(result.free_mask[i]);
    j["at_bound"][names[i]] = static_cast<bool>(result.at_bound[i]);
  }
  j["loglik"] = result.loglik;
  j["aic"] = result.aic;
  j["bic"] = result.bic;
  j["n"] = result.n_obs;
  j["m"] = plan.m;
  j["k_params"] = result.k_params;
  j["converged"] = result.converged;
  j["n_evals"] = result.n_evals;
  j["seed"] = cfg.integer("seed");
  j["mean_hat"] = result.mean_hat;
  std::ofstream jout(cfg.str("out") + ".json");
  if (!jout) throw config_error("cannot open output file '" + cfg.str("out") + ".json'");
  jout << j.dump(2) << "\n";

  std::printf("\nwrote %s and %s.json\n", cfg.str("out").c_str(), cfg.str("out").c_str());
  return 0;
}

/* Station panel assembly: exact-duplicate station coordinates, integer day
 * stamps, dense day range, one observation per station-day. */
StationGrid grid_from_table(const PointsCsv& table, const std::vector<std::string>& keep,
                            std::vector<std::string>& labels) {
  std::map<std::string, int> index;
  labels.clear();
  const int n = static_cast<int>(table.values.size());
  std::vector<long long> days(n);
  long long dmin = 0, dmax = 0;
  for (int r = 0; r < n; ++r) {
    const double t = table.times[r];
    const double rounded = std::round(t);
    if (std::abs(t - rounded) > 1e-9)
      throw csv_error("diagnose needs integer day stamps; row " + std::to_string(r + 1) +
                      " has t = " + format_double(t));
    days[r] = static_cast<long long>(rounded);
  }

  std::vector<char> selected(n, 1);
  if (!keep.empty()) {
    std::map<std::string, int> wanted;
    for (const auto& s : keep) wanted[s] = 0;
    for (int r = 0; r < n; ++r) {
      auto it = wanted.find(table.stations[r]);
      selected[r] = it != wanted.end();
      if (selected[r]) it->second = 1;
    }
    for (const auto& [label, seen] : wanted)
      if (!seen) throw config_error("station '" + label + "' not present in the data");
  }

  bool first = true;
  for (int r = 0; r < n; ++r) {
    if (!selected[r]) continue;
    if (index.emplace(table.stations[r], static_cast<int>(labels.size())).second)
      labels.push_back(table.stations[r]);
    if (first || days[r] < dmin) dmin = days[r];
    if (first || days[r] > dmax) dmax = days[r];
    first = false;
  }
  if (first) throw csv_error("diagnose: no rows selected");
  const int ns = static_cast<int>(labels.size());
  const long long nt_ll = dmax - dmin + 1;
  if (nt_ll > 2000000) throw csv_error("diagnose: day range too wide (" +
                                       std::to_string(nt_ll) + " days)");
  const int nt = static_cast<int>(nt_ll);

  Eigen::MatrixXd stations(ns, 2);
  std::vector<char> have_coord(ns, 0);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(ns, nt);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed(ns, nt);
  observed.setConstant(false);
  for (int r = 0; r < n; ++r) {
    if (!selected[r]) continue;
    const int s = index[table.stations[r]];
    if (!have_coord[s]) {
      stations.row(s) = table.coords.row(r);
      have_coord[s] = 1;
    } else if (stations(s, 0) != table.coords(r, 0) || stations(s, 1) != table.coords(r, 1)) {
      throw csv_error("station '" + table.stations[r] + "' has inconsistent coordinates");
    }
    const int t = static_cast<int>(days[r] - dmin);
    if (observed(s, t))
      throw csv_error("duplicate observation for station '" + table.stations[r] +
                      "' on day " + std::to_string(days[r]));
    observed(s, t) = true;
    z(s, t) = table.values[r];
  }
  return StationGrid(std::move(stations), [&] {
    std::vector<std::int64_t> idx(nt);
    for (int t = 0; t < nt; ++t) idx[t] = dmin + t;
    return idx;
  }(), std::move(z), std::move(observed));
}

int run_diagnose(const std::vector<std::string>& args) {
  RunConfig cfg("diagnose");
  cfg.define_required("data", "input CSV (header x,y,t,value,station; integer t)");
  cfg.define("lags", "1,2,3", "comma-separated temporal lags");
  cfg.define("stations", "", "comma-separated station subset; empty keeps all");
  cfg.define("out_delta", "delta.csv", "pairwise asymmetry output CSV");
  cfg.define("out_delta_bar", "delta_bar.csv", "station-average asymmetry output CSV");
  if (!cfg.parse(args)) return 0;
  echo_to_stdout(cfg);

  const PointsCsv table = read_points_csv(cfg.str("data"), true);
  std::vector<std::string> keep;
  if (!cfg.str("stations").empty())
    for (const auto& s : split_csv_line(cfg.str("stations")))
      if (!s.empty()) keep.push_back(s);

  std::vector<std::string> labels;
  const StationGrid grid = grid_from_table(table, keep, labels);

  std::vector<int> lags;
  for (const auto& s : split_csv_line(cfg.str("lags"))) {
    const long long k = parse_int(s, "lags");
    if (k < 0 || k >= grid.n_times())
      throw config_error("lag " + std::to_string(k) + " outside [0, " +
                         std::to_string(grid.n_times() - 1) + "]");
    lags.push_back(static_cast<int>(k));
  }
  if (lags.empty()) throw config_error("'lags' must name at least one lag");

  const int ns = grid.n_stations();
  std::ofstream dout = open_output(cfg.str("out_delta"), cfg);
  dout << "station_i,station_j,k,dx,dy,delta\n";
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j) {
      if (i == j) continue;
      for (int k : lags)
        dout << labels[i] << ',' << labels[j] << ',' << k << ','
             << format_double(grid.stations(i, 0) - grid.stations(j, 0)) << ','
             << format_double(grid.stations(i, 1) - grid.stations(j, 1)) << ','
             << format_double(delta(grid, i, j, k)) << "\n";
    }

  std::ofstream bout = open_output(cfg.str("out_delta_bar"), cfg);
  bout << "station,k,delta_bar\n";
  for (int j = 0; j < ns; ++j)
    for (int k : lags)
      bout << labels[j] << ',' << k << ',' << format_double(delta_bar(grid, j, k)) << "\n";

  std::printf("wrote %s and %s (%d stations, %zu lags)\n", cfg.str("out_delta").c_str(),
              cfg.str("out_delta_bar").c_str(), ns, lags.size());
  return 0;
}

void print_main_usage() {
  std::printf(
      "usage: stcov <command> [--key value ...]\n"
      "\n"
      "commands:\n"
      "  eval-grid   evaluate a covariance family on an (h1, u) grid -> CSV\n"
      "  simulate    draw a Gaussian realization on a lattice or point list -> CSV\n"
      "  fit         maximum-likelihood fit of a family to x,y,t,value data\n"
      "  diagnose    empirical semivariogram asymmetry statistics by station\n"
      "\n"
      "run `stcov <command> --help` for the command's keys.\n");
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("STCOV_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) Eigen::setNbThreads(n);
  }
  if (argc < 2) {
    print_main_usage();
    return 2;
  }
  const std::string command = argv[1];
  if (command == "--help" || command == "-h" || command == "help") {
    print_main_usage();
    return 0;
  }
  std::vector<std::string> args(argv + 2, argv + argc);
  try {
    if (command == "eval-grid") return run_eval_grid(args);
    if (command == "simulate") return run_simulate(args);
    if (command == "fit") return run_fit(args);
    if (command == "diagnose") return run_diagnose(args);
    std::fprintf(stderr, "stcov: unknown command '%s'\n", command.c_str());
    print_main_usage();
    return 2;
  } catch (const conditioning_error& e) {
    std::fprintf(stderr, "stcov %s: %s\n", command.c_str(), e.what());
    return 3;
  } catch (const init_error& e) {
    std::fprintf(stderr, "stcov %s: %s\n", command.c_str(), e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "stcov %s: %s\n", command.c_str(), e.what());
    return 2;
  }
}
