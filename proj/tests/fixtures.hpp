#pragma once

// Builders for hand-made and random cluster statistics.

#include <Eigen/Dense>
#include <vector>

#include "couponalloc/core.hpp"
#include "couponalloc/segmentation.hpp"

namespace fixtures {

using couponalloc::CustomerId;
using couponalloc::segmentation::ClusterStats;

/// Cluster k holds consecutive customer ids starting after the previous
/// clusters; cov defaults to diag(stderr^2).
inline ClusterStats make_stats(const std::vector<std::size_t>& sizes,
                               const Eigen::MatrixXd& means,
                               const Eigen::MatrixXd& stderrs,
                               Eigen::MatrixXd cov = {}) {
  ClusterStats st;
  st.sizes = sizes;
  st.means = means;
  st.stderrs = stderrs;
  const auto K = static_cast<Eigen::Index>(sizes.size());
  const auto J = means.cols();
  if (cov.size() == 0) {
    cov = Eigen::MatrixXd::Zero(K * J, K * J);
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index j = 0; j < J; ++j) cov(k * J + j, k * J + j) = stderrs(k, j) * stderrs(k, j);
    }
  }
  st.cov = cov;
  st.assignment.num_clusters = sizes.size();
  st.members.resize(sizes.size());
  CustomerId id = 1;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    for (std::size_t t = 0; t < sizes[k]; ++t) {
      st.members[k].push_back(id);
      st.assignment.customer_ids.push_back(id);
      st.assignment.cluster.push_back(static_cast<int>(k));
      ++id;
    }
  }
  return st;
}

/// Catalog with the given integer unit costs.
inline couponalloc::CouponCatalog catalog(const std::vector<double>& costs) {
  std::vector<couponalloc::Coupon> c;
  for (std::size_t j = 0; j < costs.size(); ++j) {
    c.push_back({static_cast<int>(j + 1), "c" + std::to_string(j + 1), costs[j]});
  }
  return couponalloc::CouponCatalog(c);
}

struct RandomInstance {
  ClusterStats stats;
  couponalloc::CouponCatalog cat;
  double budget = 0.0;
};

/// Random robust-allocation instance: K <= max_k clusters, J <= max_j
/// coupons, integer costs in [1, 15], sizes in [1, 50], means in [-1, 3],
/// stderrs in [0, 1]; the budget is a random share of the cost of serving
/// everyone with the average coupon.
inline RandomInstance random_instance(couponalloc::Rng& rng, std::size_t max_k, std::size_t max_j) {
  const std::size_t K = 1 + rng.uniform_index(max_k);
  const std::size_t J = 1 + rng.uniform_index(max_j);
  std::vector<double> costs(J);
  for (auto& c : costs) c = static_cast<double>(1 + rng.uniform_index(15));
  std::vector<std::size_t> sizes(K);
  for (auto& s : sizes) s = 1 + rng.uniform_index(50);
  Eigen::MatrixXd means(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(J));
  Eigen::MatrixXd se(means.rows(), means.cols());
  for (Eigen::Index k = 0; k < means.rows(); ++k) {
    for (Eigen::Index j = 0; j < means.cols(); ++j) {
      means(k, j) = -1.0 + 4.0 * rng.uniform();
      se(k, j) = rng.uniform();
    }
  }
  RandomInstance inst{make_stats(sizes, means, se), catalog(costs), 0.0};
  double full = 0.0;
  for (auto s : sizes) full += static_cast<double>(s);
  inst.budget = rng.uniform() * full * inst.cat.mean_cost();
  return inst;
}

}  // namespace fixtures
