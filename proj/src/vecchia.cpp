#include "stcov/vecchia.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stcov {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356;

/* Squared scaled space-time distance between rows a and b. */
inline double sqdist(const SpaceTimeDataset& d, int a, int b, double ts) {
  const double dt = ts * (d.times[a] - d.times[b]);
  return (d.coords.row(a) - d.coords.row(b)).squaredNorm() + dt * dt;
}

}  // namespace

double default_time_scale(const SpaceTimeDataset& data) {
  const Eigen::VectorXd lo = data.coords.colwise().minCoeff();
  const Eigen::VectorXd hi = data.coords.colwise().maxCoeff();
  const double space_range = (hi - lo).norm();
  const double time_range = data.times.maxCoeff() - data.times.minCoeff();
  if (!(space_range > 0.0) || !(time_range > 0.0)) return 1.0;
  return space_range / time_range;
}

std::vector<int> maximin_order(const SpaceTimeDataset& data, double time_scale) {
  const int n = data.size();
  if (time_scale <= 0.0) throw std::invalid_argument("maximin_order: time_scale must be > 0");

  /* First point: closest to the centroid in the scaled metric. */
  const Eigen::RowVectorXd c_coord = data.coords.colwise().mean();
  const double c_time = data.times.mean();
  int first = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double dt = time_scale * (data.times[i] - c_time);
    const double d2 = (data.coords.row(i) - c_coord).squaredNorm() + dt * dt;
    if (d2 < best) {
      best = d2;
      first = i;
    }
  }

  std::vector<int> order;
  order.reserve(n);
  order.push_back(first);
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  std::vector<char> used(n, 0);
  used[first] = 1;
  for (int i = 0; i < n; ++i)
    if (!used[i]) min_d2[i] = sqdist(data, i, first, time_scale);

  while (static_cast<int>(order.size()) < n) {
    int pick = -1;
    double best_d2 = -1.0;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (min_d2[i] > best_d2) { /* ties keep the smallest index */
        best_d2 = min_d2[i];
        pick = i;
      }
    }
    used[pick] = 1;
    order.push_back(pick);
    for (int i = 0; i < n; ++i)
      if (!used[i]) min_d2[i] = std::min(min_d2[i], sqdist(data, i, pick, time_scale));
  }
  return order;
}

std::vector<std::vector<int>> nearest_neighbors(const SpaceTimeDataset& data,
                                                const std::vector<int>& order, int m,
                                                double time_scale) {
  const int n = data.size();
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("nearest_neighbors: order size mismatch");
  if (m < 0) throw std::invalid_argument("nearest_neighbors: m must be >= 0");
  std::vector<std::vector<int>> nbrs(n);
  std::vector<std::pair<double, int>> cand; /* (distance, original index) */
  for (int i = 0; i < n; ++i) {
    const int q = std::min(i, m);
    if (q == 0) continue;
    cand.clear();
    for (int j = 0; j < i; ++j)
      cand.push_back({sqdist(data, order[i], order[j], time_scale), order[j]});
    std::partial_sort(cand.begin(), cand.begin() + q, cand.end());
    auto& out = nbrs[i];
    out.reserve(q);
    for (int k = 0; k < q; ++k) out.push_back(cand[k].second);
    std::sort(out.begin(), out.end());
  }
  return nbrs;
}

VecchiaPlan make_plan(const SpaceTimeDataset& data, int m, double time_scale) {
  VecchiaPlan plan;
  plan.time_scale = time_scale > 0.0 ? time_scale : default_time_scale(data);
  plan.m = m;
  plan.order = maximin_order(data, plan.time_scale);
  plan.neighbors = nearest_neighbors(data, plan.order, m, plan.time_scale);
  return plan;
}

LoglikResult vecchia_loglik(const CovarianceModel& model, const SpaceTimeDataset& data,
                            const VecchiaPlan& plan, MeanMode mean_mode) {
  validate(model);
  const int n = data.size();
  const int d = data.dim();
  if (static_cast<int>(plan.order.size()) != n ||
      static_cast<int>(plan.neighbors.size()) != n)
    throw std::invalid_argument("vecchia_loglik: plan/data size mismatch");
  if (d != dim(model))
    throw std::invalid_argument("vecchia_loglik: model/data dimension mismatch");

  /* plan.order must be a permutation and every neighbor must come earlier in it */
  std::vector<int> pos(n, -1);
  for (int i = 0; i < n; ++i) {
    const int p = plan.order[i];
    if (p < 0 || p >= n || pos[p] != -1)
      throw std::invalid_argument("vecchia_loglik: order is not a permutation");
    pos[p] = i;
  }
  for (int i = 0; i < n; ++i)
    for (int nb : plan.neighbors[i])
      if (nb < 0 || nb >= n || pos[nb] >= i)
        throw std::invalid_argument("vecchia_loglik: neighbor does not precede its point");
  const double s2 = sigma2_of(model);
  const double diag = s2 * (1.0 + model.tau2);

  const int mmax = plan.m + 1;
  Eigen::MatrixXd C(mmax, mmax);
  Eigen::VectorXd y(mmax), ones(mmax);
  std::vector<int> idx(mmax);
  SpaceTimeLag lag;
  lag.h.resize(d);

  double sum_logl = 0.0; /* sum of ln L_qq over points */
  double acc_a2 = 0.0;   /* sum of squared whitened residuals */
  double acc_b2 = 0.0;   /* sum of squared whitened ones */
  double acc_ab = 0.0;
  for (int i = 0; i < n; ++i) {
    const int q = static_cast<int>(plan.neighbors[i].size());
    if (q != std::min(i, plan.m))
      throw std::invalid_argument("vecchia_loglik: malformed neighbor set");
    for (int k = 0; k < q; ++k) idx[k] = plan.neighbors[i][k];
    idx[q] = plan.order[i];

    auto Cb = C.topLeftCorner(q + 1, q + 1);
    for (int r = 0; r <= q; ++r) {
      Cb(r, r) = diag;
      for (int c = 0; c < r; ++c) {
        lag.h = data.coords.row(idx[r]) - data.coords.row(idx[c]);
        lag.u = data.times[idx[r]] - data.times[idx[c]];
        const double v = eval_base(model, lag);
        Cb(r, c) = v;
        Cb(c, r) = v;
      }
    }
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(Cb);
    if (llt.info() != Eigen::Success)
      throw conditioning_error("vecchia_loglik: local factorization failed at ordered index " +
                               std::to_string(i));
    for (int r = 0; r <= q; ++r) {
      y[r] = data.values[idx[r]];
      ones[r] = 1.0;
    }
    auto yb = y.head(q + 1);
    auto ob = ones.head(q + 1);
    llt.matrixL().solveInPlace(yb);
    llt.matrixL().solveInPlace(ob);
    const double alpha = yb[q]; /* conditional residual / sqrt(var) */
    const double beta = ob[q];
    sum_logl += std::log(Cb(q, q)); /* LLT stored in-place: L_qq */
    acc_a2 += alpha * alpha;
    acc_b2 += beta * beta;
    acc_ab += alpha * beta;
  }

  double mean_hat = 0.0;
  double quad = acc_a2;
  if (mean_mode == MeanMode::profiled_constant) {
    mean_hat = acc_ab / acc_b2;
    quad = acc_a2 - acc_ab * acc_ab / acc_b2;
  }
  return {-0.5 * n * kLog2Pi - sum_logl - 0.5 * quad, mean_hat};
}

}  // namespace stcov
