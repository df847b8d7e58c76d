#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = STCOV_CLI_PATH;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "stcov_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

RunResult run(const std::string& args) {
  const fs::path so = scratch() / "run_stdout.txt";
  const fs::path se = scratch() / "run_stderr.txt";
  const std::string cmd =
      kCli + " " + args + " > " + so.string() + " 2> " + se.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

/* data rows of a CSV produced by the tool: comment and header lines dropped */
std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

std::string kv_value(const std::string& text, const std::string& key) {
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  }
  return "";
}

}  // namespace

TEST_CASE("bad invocations exit with the input error code") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("eval-grid --family lmatern --no_such_key 1").code == 2);
  CHECK(run("eval-grid --family martian").code == 2);
  CHECK(run("fit --family lmatern").code == 2); /* missing required data */
  CHECK(run("eval-grid --family lmatern --h1_steps 0").code == 2);
  CHECK(run("eval-grid --family lmatern --nu not_a_number").code == 2);
  CHECK(run("fit --family lmatern --data /no/such/file.csv").code == 2);
}

TEST_CASE("help exits cleanly") {
  CHECK(run("eval-grid --help").code == 0);
  CHECK(run("fit --help").code == 0);
}

TEST_CASE("eval-grid writes the declared lattice") {
  const fs::path out = scratch() / "grid.csv";
  const auto r = run(
      "eval-grid --family lmatern --sigma2 2 --nu 0.5 --phi 0.5 --tau2 0.5"
      " --lambda0 0 --lambda1 0.3 --lambda2 0.3"
      " --h1_min -1 --h1_max 1 --h1_steps 5 --h2 0 --u_min -2 --u_max 2 --u_steps 3"
      " --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# command = eval-grid") != std::string::npos);
  CHECK(r.out.find("# family = lmatern") != std::string::npos);

  const auto rows = csv_rows(out);
  REQUIRE(rows.size() == 15);
  REQUIRE(rows[0].size() == 4);

  /* row order: u outer, h1 inner; origin sits mid-grid */
  CHECK(std::stod(rows[0][0]) == -1.0);
  CHECK(std::stod(rows[1][0]) == -0.5);
  CHECK(std::stod(rows[0][2]) == -2.0);
  CHECK(std::stod(rows[5][2]) == 0.0);

  /* value at the exact origin includes the nugget: 2 * 1.5 */
  CHECK(std::stod(rows[7][0]) == 0.0);
  CHECK(std::stod(rows[7][2]) == 0.0);
  CHECK(std::stod(rows[7][3]) == doctest::Approx(3.0).epsilon(1e-14));

  /* with zero drift the slice is symmetric in h1 at fixed u */
  for (int u = 0; u < 3; ++u) {
    for (int i = 0; i < 2; ++i) {
      const double a = std::stod(rows[u * 5 + i][3]);
      const double b = std::stod(rows[u * 5 + (4 - i)][3]);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("eval-grid reruns are byte identical") {
  const fs::path out = scratch() / "det.csv";
  const std::string args =
      "eval-grid --family lch --sigma2 1 --nu 0.7 --alpha 1.1 --beta 0.4"
      " --lambda0 0.4 --h1_steps 7 --u_steps 5 --out " + out.string();
  REQUIRE(run(args).code == 0);
  const std::string first = slurp(out);
  REQUIRE(run(args).code == 0);
  CHECK(first == slurp(out));
  CHECK(!first.empty());
}

TEST_CASE("simulate lattice mode") {
  const fs::path out = scratch() / "sim.csv";
  const std::string base =
      "simulate --family lmatern --sigma2 1 --nu 0.5 --phi 1 --lambda0 0.3"
      " --nx 3 --ny 2 --nt 2 --dx 0.5 --dy 0.5 --dt 1 --out " + out.string();
  REQUIRE(run(base + " --seed 7").code == 0);
  const auto rows = csv_rows(out);
  REQUIRE(rows.size() == 12);
  /* x varies fastest, then y, then t */
  CHECK(std::stod(rows[0][0]) == 0.0);
  CHECK(std::stod(rows[1][0]) == 0.5);
  CHECK(std::stod(rows[2][0]) == 1.0);
  CHECK(std::stod(rows[3][1]) == 0.5);
  CHECK(std::stod(rows[6][2]) == 1.0);

  const std::string first = slurp(out);
  REQUIRE(run(base + " --seed 7").code == 0);
  CHECK(first == slurp(out));
  REQUIRE(run(base + " --seed 8").code == 0);
  CHECK(first != slurp(out));
}

TEST_CASE("simulate with a degenerate amplitude returns the zero field") {
  const fs::path out = scratch() / "zero.csv";
  const auto r = run(
      "simulate --family lgauss --sigma2 0 --rho 1 --tau2 0 --nx 2 --ny 2 --nt 2 --out " +
      out.string());
  REQUIRE(r.code == 0);
  for (const auto& row : csv_rows(out)) {
    CHECK(std::stod(row[3]) == 0.0);
  }
}

TEST_CASE("simulate honors an explicit design file") {
  const fs::path pts = scratch() / "pts.csv";
  spit(pts, "x,y,t\n0.1,0.2,0\n1.4,-0.3,2\n");
  const fs::path out = scratch() / "simpts.csv";
  const auto r = run("simulate --family lmatern --sigma2 1 --nu 0.5 --phi 1 --points " +
                     pts.string() + " --out " + out.string());
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][0]) == 1.4);
  CHECK(std::stod(rows[1][2]) == 2.0);
}

TEST_CASE("config file values are applied and overridden by flags") {
  const fs::path conf = scratch() / "job.conf";
  spit(conf,
       "# lattice description\n"
       "family = lmatern\n"
       "sigma2 = 2.0\n"
       "nu = 0.6\n"
       "h1_steps = 3\n"
       "u_steps = 3\n");
  const fs::path out = scratch() / "conf_grid.csv";
  const auto r = run("eval-grid --config " + conf.string() + " --nu 0.7 --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# sigma2 = 2.0") != std::string::npos);
  CHECK(r.out.find("# nu = 0.7") != std::string::npos); /* flag wins */
  CHECK(csv_rows(out).size() == 9);
}

TEST_CASE("fit recovers a plausible model and reports it consistently") {
  /* simulate a small record, then fit amplitude and range only */
  const fs::path simcsv = scratch() / "fit_input.csv";
  REQUIRE(run("simulate --family lgauss --sigma2 1.5 --rho 1 --lambda0 0.2 --tau2 0.1"
              " --nx 4 --ny 3 --nt 3 --dx 0.6 --dy 0.6 --dt 0.8 --seed 3 --out " +
              simcsv.string()).code == 0);

  const fs::path out = scratch() / "fit_out.txt";
  const std::string args =
      "fit --family lgauss --data " + simcsv.string() +
      " --sigma2 1 --rho 0.8 --lambda0 0.2 --tau2 0.1"
      " --fix_lambda0 1 --fix_theta0 1 --fix_lambda1 1 --fix_lambda2 1 --fix_theta1 1"
      " --fix_tau2 1 --vecchia_m 0 --starts 1 --max_evals 400 --out " + out.string();
  const auto r = run(args);
  REQUIRE(r.code == 0);

  const std::string body = slurp(out);
  CHECK(kv_value(body, "family") == "lgauss");
  CHECK(kv_value(body, "n") == "36");
  CHECK(kv_value(body, "m") == "0");
  CHECK(kv_value(body, "k_params") == "2");
  CHECK(kv_value(body, "converged") == "1");
  const double s2 = std::stod(kv_value(body, "sigma2"));
  CHECK(s2 > 0.2);
  CHECK(s2 < 8.0);

  /* JSON mirror matches the flat file */
  const auto j = nlohmann::json::parse(slurp(out.string() + ".json"));
  CHECK(j["family"] == "lgauss");
  CHECK(j["n"] == 36);
  CHECK(j["k_params"] == 2);
  CHECK(j["params"]["sigma2"].get<double>() == doctest::Approx(s2).epsilon(1e-15));
  CHECK(j["free"]["rho"].get<bool>());
  CHECK_FALSE(j["free"]["tau2"].get<bool>());

  /* identical rerun, identical bytes */
  const std::string snapshot = slurp(out);
  REQUIRE(run(args).code == 0);
  CHECK(snapshot == slurp(out));
}

TEST_CASE("fit rejects duplicate observation rows") {
  const fs::path dup = scratch() / "dup.csv";
  spit(dup, "x,y,t,value\n0,0,0,1.0\n0,0,0,2.0\n1,0,0,0.5\n");
  const auto r = run("fit --family lmatern --data " + dup.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("duplicate") != std::string::npos);
}

TEST_CASE("unusable starting values exit with the init error code") {
  const fs::path simcsv = scratch() / "init_err.csv";
  REQUIRE(run("simulate --family lmatern --sigma2 1 --nu 0.5 --phi 1"
              " --nx 3 --ny 3 --nt 2 --seed 5 --out " + simcsv.string()).code == 0);
  const auto r = run("fit --family lmatern --data " + simcsv.string() +
                     " --sigma2 -1 --starts 1");
  CHECK(r.code == 4);
}

TEST_CASE("diagnose computes the asymmetry tables") {
  const fs::path data = scratch() / "panel.csv";
  /* two stations, four days; station b runs one day behind station a */
  spit(data,
       "x,y,t,value,station\n"
       "0,0,0,1.0,a\n0,0,1,2.0,a\n0,0,2,4.0,a\n0,0,3,3.0,a\n"
       "1,0,0,0.5,b\n1,0,1,1.0,b\n1,0,2,2.0,b\n1,0,3,4.0,b\n");
  const fs::path d1 = scratch() / "delta.csv";
  const fs::path d2 = scratch() / "delta_bar.csv";
  const auto r = run("diagnose --data " + data.string() + " --lags 1,2 --out_delta " +
                     d1.string() + " --out_delta_bar " + d2.string());
  REQUIRE(r.code == 0);

  /* delta rows: ordered station pairs (a,b) and (b,a) for each lag */
  const auto delta_rows = csv_rows(d1);
  REQUIRE(delta_rows.size() == 4);
  /* g(a,b;1) = ((2-0.5)^2+(4-1)^2+(3-2)^2)/6; g(b,a;1) = ((1-1)^2+(2-2)^2+(4-4)^2)/6 */
  const double g_ab = (1.5 * 1.5 + 9.0 + 1.0) / 6.0;
  double found = 0.0;
  for (const auto& row : delta_rows) {
    if (row[0] == "a" && row[1] == "b" && row[2] == "1") found = std::stod(row[5]);
  }
  CHECK(found == doctest::Approx(g_ab - 0.0).epsilon(1e-13));

  const auto bar_rows = csv_rows(d2);
  REQUIRE(bar_rows.size() == 4); /* 2 stations x 2 lags */
  for (const auto& row : bar_rows) {
    if (row[0] == "b" && row[1] == "1") {
      CHECK(std::stod(row[2]) == doctest::Approx(g_ab / 2.0).epsilon(1e-13));
    }
  }

  /* determinism */
  const std::string snap1 = slurp(d1), snap2 = slurp(d2);
  REQUIRE(run("diagnose --data " + data.string() + " --lags 1,2 --out_delta " + d1.string() +
              " --out_delta_bar " + d2.string()).code == 0);
  CHECK(snap1 == slurp(d1));
  CHECK(snap2 == slurp(d2));
}

TEST_CASE("diagnose input validation") {
  const fs::path bad_day = scratch() / "bad_day.csv";
  spit(bad_day, "x,y,t,value,station\n0,0,0.5,1.0,a\n1,0,1,2.0,b\n");
  CHECK(run("diagnose --data " + bad_day.string()).code == 2);

  const fs::path dup_day = scratch() / "dup_day.csv";
  spit(dup_day,
       "x,y,t,value,station\n0,0,0,1.0,a\n0,0,0,1.5,a\n0,0,1,2.0,a\n1,0,0,2.0,b\n1,0,1,1.0,b\n");
  CHECK(run("diagnose --data " + dup_day.string()).code == 2);

  const fs::path moved = scratch() / "moved.csv";
  spit(moved,
       "x,y,t,value,station\n0,0,0,1.0,a\n0.5,0,1,2.0,a\n1,0,0,2.0,b\n1,0,1,1.0,b\n");
  CHECK(run("diagnose --data " + moved.string()).code == 2);

  const fs::path ok = scratch() / "ok_panel.csv";
  spit(ok,
       "x,y,t,value,station\n0,0,0,1.0,a\n0,0,1,2.0,a\n1,0,0,2.0,b\n1,0,1,1.0,b\n"
       "2,2,0,0.5,c\n2,2,1,0.7,c\n");
  /* unknown station in the subset */
  CHECK(run("diagnose --data " + ok.string() + " --stations a,zzz").code == 2);
  /* subset keeps only the listed stations */
  const fs::path d1 = scratch() / "sub_delta.csv";
  const fs::path d2 = scratch() / "sub_bar.csv";
  REQUIRE(run("diagnose --data " + ok.string() + " --stations a,c --lags 1 --out_delta " +
              d1.string() + " --out_delta_bar " + d2.string()).code == 0);
  const auto rows = csv_rows(d1);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row[0] != "b");
    CHECK(row[1] != "b");
  }
  /* a lag beyond the record cannot be computed */
  CHECK(run("diagnose --data " + ok.string() + " --lags 5").code == 2);
}
