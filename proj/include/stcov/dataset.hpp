#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace stcov {

/* n space-time observations: coords is n x d, times and values length n,
 * optional per-row station labels (empty or length n).  Construction rejects
 * non-finite entries and size mismatches; duplicate (coord, time) rows are
 * permitted in memory (file ingestion rejects them — see has_duplicates). */
struct SpaceTimeDataset {
  Eigen::MatrixXd coords;
  Eigen::VectorXd times;
  Eigen::VectorXd values;
  std::vector<std::string> station_ids;

  SpaceTimeDataset(Eigen::MatrixXd coords_in, Eigen::VectorXd times_in,
                   Eigen::VectorXd values_in,
                   std::vector<std::string> station_ids_in = {});

  int size() const { return static_cast<int>(times.size()); }
  int dim() const { return static_cast<int>(coords.cols()); }

  /* True when two rows share the exact same coordinates and time. */
  bool has_duplicates() const;
};

}  // namespace stcov
