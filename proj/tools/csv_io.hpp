#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace stcov_cli {

class csv_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* Observation table: header `x,y,t,value` with an optional trailing `station`
 * column; `#` lines and blank lines are skipped. */
struct PointsCsv {
  Eigen::MatrixXd coords; /* n x 2 */
  Eigen::VectorXd times;
  Eigen::VectorXd values;
  std::vector<std::string> stations; /* empty when the column is absent */
  bool has_stations() const { return !stations.empty(); }
};

PointsCsv read_points_csv(const std::string& path, bool require_station);

/* Simulation design: header `x,y,t`. */
struct DesignCsv {
  Eigen::MatrixXd coords;
  Eigen::VectorXd times;
};

DesignCsv read_design_csv(const std::string& path);

/* Shortest decimal form that round-trips a double (17 significant digits). */
std::string format_double(double v);

std::string trim(const std::string& s);
std::vector<std::string> split_csv_line(const std::string& line);
double parse_double(const std::string& field, const std::string& context);
long long parse_int(const std::string& field, const std::string& context);

}  // namespace stcov_cli
