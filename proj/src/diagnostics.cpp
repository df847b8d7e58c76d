#include "stcov/diagnostics.hpp"

#include <cmath>
#include <string>

namespace stcov {

StationGrid::StationGrid(Eigen::MatrixXd stations_in, std::vector<std::int64_t> time_index_in,
                         Eigen::MatrixXd z_in,
                         Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed_in)
    : stations(std::move(stations_in)),
      time_index(std::move(time_index_in)),
      z(std::move(z_in)),
      observed(std::move(observed_in)) {
  const int ns = static_cast<int>(stations.rows());
  const int nt = static_cast<int>(time_index.size());
  if (ns < 2) throw std::invalid_argument("StationGrid: need at least 2 stations");
  if (nt < 2) throw std::invalid_argument("StationGrid: need at least 2 time points");
  if (z.rows() != ns || z.cols() != nt || observed.rows() != ns || observed.cols() != nt)
    throw std::invalid_argument("StationGrid: inconsistent shapes");
  if (!stations.allFinite()) throw std::invalid_argument("StationGrid: non-finite station");
  for (int t = 1; t < nt; ++t)
    if (time_index[t] <= time_index[t - 1])
      throw std::invalid_argument("StationGrid: time grid must be strictly increasing");
  for (int s = 0; s < ns; ++s) {
    int count = 0;
    for (int t = 0; t < nt; ++t) {
      if (!observed(s, t)) continue;
      ++count;
      if (!std::isfinite(z(s, t)))
        throw std::invalid_argument("StationGrid: non-finite observed value at station " +
                                    std::to_string(s));
    }
    if (count == 0)
      throw std::invalid_argument("StationGrid: station " + std::to_string(s) +
                                  " has no observations");
  }
}

double emp_semivariogram(const StationGrid& grid, int i, int j, int k) {
  const int ns = grid.n_stations(), nt = grid.n_times();
  if (i < 0 || i >= ns || j < 0 || j >= ns)
    throw std::invalid_argument("emp_semivariogram: station index out of range");
  if (k < 0 || k >= nt) throw std::invalid_argument("emp_semivariogram: lag out of range");
  double sum = 0.0;
  int count = 0;
  for (int t = 0; t + k < nt; ++t) {
    if (!grid.observed(i, t + k) || !grid.observed(j, t)) continue;
    const double d = grid.z(i, t + k) - grid.z(j, t);
    sum += d * d;
    ++count;
  }
  if (count == 0)
    throw insufficient_data_error("emp_semivariogram: no jointly observed pair for stations " +
                                  std::to_string(i) + "," + std::to_string(j) + " at lag " +
                                  std::to_string(k));
  return sum / (2.0 * count);
}

double delta(const StationGrid& grid, int i, int j, int k) {
  return emp_semivariogram(grid, i, j, k) - emp_semivariogram(grid, j, i, k);
}

double delta_bar(const StationGrid& grid, int j, int k) {
  double sum = 0.0;
  for (int i = 0; i < grid.n_stations(); ++i) sum += delta(grid, i, j, k);
  return sum / grid.n_stations();
}

}  // namespace stcov
