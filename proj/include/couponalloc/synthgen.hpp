#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "couponalloc/cate_matrix.hpp"
#include "couponalloc/core.hpp"

namespace couponalloc::synthgen {

using FeatureFn = std::function<double(std::span<const double>)>;

/// Axis-aligned Gaussian cluster that customer features are drawn from.
struct LatentSegment {
  std::vector<double> center;
  double spread = 1.0;
  double weight = 0.0;
};

/// Known counterfactual model behind a synthetic experiment.
struct GroundTruthModel {
  FeatureFn baseline;
  /// effects[j-1] is the true CATE of coupon j; the control effect is 0.
  std::vector<FeatureFn> effects;
  double noise_scale = 1.0;
  std::size_t feature_dim = 0;
  std::vector<LatentSegment> segments;

  void validate(std::size_t num_coupons) const;
  double effect(CouponId j, std::span<const double> x) const {
    return j == kControl ? 0.0 : effects.at(static_cast<std::size_t>(j - 1))(x);
  }
};

/// Index of the segment center nearest to x (lowest index on ties).
std::size_t nearest_segment(const std::vector<LatentSegment>& segments,
                            std::span<const double> x);

/// Ten skewed segments in six dimensions with piecewise-constant effects
/// (constant on each segment's nearest-center region). Effect levels are
/// tabulated for the standard six-coupon catalog and scaled by unit cost for
/// other catalogs.
GroundTruthModel default_model(const CouponCatalog& cat,
                               double noise_scale = 1.0);

/// Model whose effects are identically zero.
GroundTruthModel zero_effect_model(const CouponCatalog& cat,
                                   double noise_scale = 1.0);

/// Per-segment effect levels used by default_model, [segment][coupon-1].
std::vector<std::vector<double>> default_effect_levels(const CouponCatalog& cat);

struct Generated {
  ExperimentDataset dataset;
  CateMatrix true_cate;
};

/// Draws n customers. Each coupon arm has probability p and control receives
/// the remaining 1 - p|J| mass. Customer ids are 1..n.
Generated generate(const GroundTruthModel& gt, std::size_t n_customers,
                   const CouponCatalog& cat, double p, std::uint64_t seed);

/// Mean true effect of coupon j over the customers of ds.
double true_ate(const GroundTruthModel& gt, const ExperimentDataset& ds,
                CouponId j);

}  // namespace couponalloc::synthgen
