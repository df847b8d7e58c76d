#include "stcov/dataset.hpp"

#include <algorithm>
#include <stdexcept>

namespace stcov {

SpaceTimeDataset::SpaceTimeDataset(Eigen::MatrixXd coords_in, Eigen::VectorXd times_in,
                                   Eigen::VectorXd values_in,
                                   std::vector<std::string> station_ids_in)
    : coords(std::move(coords_in)),
      times(std::move(times_in)),
      values(std::move(values_in)),
      station_ids(std::move(station_ids_in)) {
  const auto n = times.size();
  if (n < 1) throw std::invalid_argument("SpaceTimeDataset: need at least one row");
  if (coords.rows() != n || values.size() != n)
    throw std::invalid_argument("SpaceTimeDataset: coords/times/values size mismatch");
  if (coords.cols() < 1)
    throw std::invalid_argument("SpaceTimeDataset: spatial dimension must be >= 1");
  if (!station_ids.empty() && static_cast<Eigen::Index>(station_ids.size()) != n)
    throw std::invalid_argument("SpaceTimeDataset: station_ids size mismatch");
  if (!coords.allFinite() || !times.allFinite() || !values.allFinite())
    throw std::invalid_argument("SpaceTimeDataset: non-finite entries");
}

bool SpaceTimeDataset::has_duplicates() const {
  const int n = size();
  /* Sort row indices lexicographically by (time, coords), then compare
   * neighbors; O(n log n). */
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  auto less = [this](int a, int b) {
    if (times[a] != times[b]) return times[a] < times[b];
    for (int c = 0; c < coords.cols(); ++c)
      if (coords(a, c) != coords(b, c)) return coords(a, c) < coords(b, c);
    return false;
  };
  std::sort(idx.begin(), idx.end(), less);
  for (int i = 0; i + 1 < n; ++i) {
    const int a = idx[i], b = idx[i + 1];
    if (times[a] == times[b] && coords.row(a) == coords.row(b)) return true;
  }
  return false;
}

}  // namespace stcov
