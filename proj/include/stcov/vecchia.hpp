#pragma once

#include <vector>

#include "stcov/gp.hpp"

namespace stcov {

/* Ordered nearest-neighbor conditioning plan (ungrouped Vecchia).  `order` is
 * a maximin permutation of 0..n-1; neighbors[i] holds the min(i, m)
 * earlier-ordered points (original indices, ascending) nearest to order[i] in
 * the scaled metric |ds|^2 + (time_scale dt)^2. */
struct VecchiaPlan {
  std::vector<int> order;
  std::vector<std::vector<int>> neighbors;
  int m = 0;
  double time_scale = 1.0;
};

/* Spatial bounding-box diagonal divided by the time range; 1 when either
 * range is degenerate. */
double default_time_scale(const SpaceTimeDataset& data);

/* Maximin ordering: start at the point closest to the centroid, then always
 * take the point with the largest minimum scaled distance to everything
 * already ordered; ties broken by smallest original index. */
std::vector<int> maximin_order(const SpaceTimeDataset& data, double time_scale);

/* For each ordered position, the min(i, m) earlier points nearest in the
 * scaled metric; ties by smaller original index.  Returned sets are sorted by
 * original index. */
std::vector<std::vector<int>> nearest_neighbors(const SpaceTimeDataset& data,
                                                const std::vector<int>& order, int m,
                                                double time_scale);

/* Convenience: maximin order + neighbor sets; time_scale <= 0 selects the
 * default scale. */
VecchiaPlan make_plan(const SpaceTimeDataset& data, int m, double time_scale = 0.0);

/* Sum of ordered univariate conditional log-densities.  ProfiledConstant
 * estimates the mean from the Vecchia-implied precision via the accumulated
 * conditional residual/indicator scalars, keeping the approximation
 * self-consistent.  Plans whose order is not a permutation of the data or
 * whose neighbor sets reference non-preceding points are rejected with
 * std::invalid_argument. */
LoglikResult vecchia_loglik(const CovarianceModel& model, const SpaceTimeDataset& data,
                            const VecchiaPlan& plan, MeanMode mean_mode);

}  // namespace stcov
