#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stcov {

/* No jointly observed time pairs at the requested lag. */
class insufficient_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* Station-by-time panel on a common integer time grid, with a per-entry
 * observation mask for irregular records. */
struct StationGrid {
  Eigen::MatrixXd stations;            /* n_s x d locations */
  std::vector<std::int64_t> time_index; /* strictly increasing, length n_t */
  Eigen::MatrixXd z;                   /* n_s x n_t values */
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed;

  /* Validates n_s >= 2, n_t >= 2, consistent shapes, strictly increasing
   * times, finite observed values, and >= 1 observation per station. */
  StationGrid(Eigen::MatrixXd stations, std::vector<std::int64_t> time_index,
              Eigen::MatrixXd z, Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed);

  int n_stations() const { return static_cast<int>(stations.rows()); }
  int n_times() const { return static_cast<int>(z.cols()); }
};

/* Empirical space-time semivariogram g(i, j; k): half the mean squared
 * difference z(i, t+k) - z(j, t) over time positions where both entries are
 * observed.  Throws insufficient_data_error when no such pair exists. */
double emp_semivariogram(const StationGrid& grid, int i, int j, int k);

/* Asymmetry difference g(i, j; k) - g(j, i; k); antisymmetric in (i, j) by
 * construction. */
double delta(const StationGrid& grid, int i, int j, int k);

/* Average of delta(i, j, k) over all stations i (the i = j term is 0). */
double delta_bar(const StationGrid& grid, int j, int k);

}  // namespace stcov
