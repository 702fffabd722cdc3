#pragma once

#include <Eigen/Dense>
#include <unordered_map>
#include <vector>

#include "couponalloc/core.hpp"

namespace couponalloc {

/// Per-customer, per-coupon effect estimates. Column j-1 holds coupon j.
class CateMatrix {
 public:
  CateMatrix() = default;
  CateMatrix(std::vector<CustomerId> customer_ids, Eigen::MatrixXd values);

  std::size_t customers() const { return ids_.size(); }
  std::size_t coupons() const { return static_cast<std::size_t>(values_.cols()); }
  const std::vector<CustomerId>& customer_ids() const { return ids_; }
  const Eigen::MatrixXd& values() const { return values_; }

  /// Effect of coupon j (1-based) for row i; j = 0 gives exactly 0.
  double at(std::size_t row, CouponId j) const {
    return j == kControl ? 0.0 : values_(static_cast<Eigen::Index>(row), j - 1);
  }
  /// Row holding `id`; throws Error if absent.
  std::size_t row_of(CustomerId id) const;
  bool contains(CustomerId id) const { return index_.count(id) != 0; }

 private:
  std::vector<CustomerId> ids_;
  Eigen::MatrixXd values_;
  std::unordered_map<CustomerId, std::size_t> index_;
};

}  // namespace couponalloc
