#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "couponalloc/cate_matrix.hpp"
#include "couponalloc/core.hpp"

namespace couponalloc::segmentation {

struct GmmComponent {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Full-covariance Gaussian mixture.
struct GmmModel {
  std::vector<GmmComponent> components;
  /// Mean per-row log-likelihood after each EM iteration.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;

  std::size_t num_components() const { return components.size(); }
  std::size_t dim() const {
    return components.empty() ? 0
                              : static_cast<std::size_t>(components[0].mean.size());
  }
  /// log(w_k) + log N(x_i | mu_k, Sigma_k), n x K.
  Eigen::MatrixXd weighted_log_density(const Eigen::MatrixXd& x) const;
  /// Posterior membership probabilities, rows sum to 1.
  Eigen::MatrixXd responsibilities(const Eigen::MatrixXd& x) const;
};

struct GmmOptions {
  int max_iter = 200;
  double tol = 1e-6;
  int restarts = 3;
  double reg = 1e-6;
};

/// EM with k-means++ seeding; keeps the restart with the best likelihood.
/// Throws Error if K == 0 or K exceeds the number of rows.
GmmModel fit_gmm(const Eigen::MatrixXd& x, std::size_t K, std::uint64_t seed,
                 const GmmOptions& options = {});
GmmModel fit_gmm(const CateMatrix& cate, std::size_t K, std::uint64_t seed,
                 const GmmOptions& options = {});

/// Hard cluster labels aligned with the rows of a CateMatrix.
struct Assignment {
  std::vector<CustomerId> customer_ids;
  std::vector<int> cluster;
  std::size_t num_clusters = 0;

  std::size_t size() const { return cluster.size(); }
  std::vector<std::size_t> sizes() const;
};

/// Argmax responsibility per customer, lowest k on exact ties.
Assignment assign_clusters(const GmmModel& model, const CateMatrix& cate);

/// Drops clusters with no members and renumbers the rest densely, keeping
/// their relative order.
Assignment compact(const Assignment& a);

struct ClusterStats {
  std::vector<std::size_t> sizes;
  Eigen::MatrixXd means;    // K x J
  Eigen::MatrixXd stderrs;  // K x J
  /// Bootstrap covariance of cluster means, index (k, j) -> k*J + (j-1).
  Eigen::MatrixXd cov;
  Assignment assignment;
  /// Customer ids of each cluster in CateMatrix row order.
  std::vector<std::vector<CustomerId>> members;

  std::size_t num_clusters() const { return sizes.size(); }
  std::size_t num_coupons() const { return static_cast<std::size_t>(means.cols()); }
  std::size_t total_customers() const;
  Eigen::Index index(std::size_t k, CouponId j) const {
    return static_cast<Eigen::Index>(k * num_coupons() +
                                     static_cast<std::size_t>(j - 1));
  }
  void validate() const;
};

/// Throws Error on an empty cluster or a row count mismatch.
ClusterStats cluster_stats(const CateMatrix& cate, const Assignment& assignment,
                           int n_bootstrap, std::uint64_t seed);

/// Per cluster x coupon mean and standard error of the transformed-outcome
/// term, treating every cluster member as hypothetically given the coupon.
struct UpliftTable {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd stderr_;
  std::vector<std::size_t> sizes;

  std::string to_text(const CouponCatalog& cat, double scale = 1.0) const;
};

UpliftTable table2_report(const ClusterStats& stats, const ExperimentDataset& ds,
                          double p);

}  // namespace couponalloc::segmentation
