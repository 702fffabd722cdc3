#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "couponalloc/cate_matrix.hpp"
#include "couponalloc/core.hpp"
#include "couponalloc/regressor.hpp"

namespace couponalloc::uplift {

/// Single-model metalearner: one regressor over features with the arm
/// appended as a one-hot over {0} + J. CATE estimates are differences of
/// predictions against the control arm.
class SLearner {
 public:
  explicit SLearner(std::unique_ptr<BaseRegressor> base);

  /// Throws Error naming the arm if any arm has no rows.
  void fit(const ExperimentDataset& ds, const CouponCatalog& cat,
           std::uint64_t seed);

  bool fitted() const { return fitted_; }
  std::size_t num_coupons() const { return num_coupons_; }
  const BaseRegressor& base() const { return *base_; }

  /// Predicted outcome for every row of ds under `arm`.
  Eigen::VectorXd predict_outcome(const ExperimentDataset& ds,
                                  CouponId arm) const;

  /// Entry (i, j) = prediction under coupon j minus prediction under control.
  CateMatrix estimate_cate(const ExperimentDataset& ds) const;

 private:
  Eigen::MatrixXd design(const ExperimentDataset& ds, CouponId arm) const;

  std::unique_ptr<BaseRegressor> base_;
  std::size_t num_coupons_ = 0;
  std::size_t feature_dim_ = 0;
  bool fitted_ = false;
};

/// Design matrix [features, one-hot(arm over 0..|J|)] for given arms.
Eigen::MatrixXd augment(const ExperimentDataset& ds, std::size_t num_coupons,
                        std::span<const CouponId> arms);

enum class LearnerKind { kGbt, kRidge };

LearnerKind parse_learner(const std::string& name);

struct LearnerOptions {
  LearnerKind kind = LearnerKind::kGbt;
  GbtParams gbt;
  double ridge_penalty = 1e-3;
  /// Select GBT depth and tree count by 5-fold CV before the final fit.
  bool tune = false;
};

/// Builds the base regressor and fits the S-learner. When tuning is on, the
/// grid is depth {2, 3, 4} x trees {50, 100, 200}.
SLearner fit_slearner(const ExperimentDataset& ds, const CouponCatalog& cat,
                      const LearnerOptions& options, std::uint64_t seed);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace couponalloc::uplift
