#pragma once

#include <string>
#include <utility>
#include <vector>

#include "couponalloc/core.hpp"
#include "couponalloc/evaluation.hpp"

// Minimal standalone SVG charts for the run reports.
namespace couponalloc::plots {

/// Cumulative uplift against targeted customers, one line per coupon, with
/// the random-targeting chord dashed.
std::string uplift_curves(const std::vector<evaluation::UpliftCurve>& curves,
                          const CouponCatalog& cat, double scale);

/// Uplift-GMV against consumed cost, one line per strategy.
std::string uplift_vs_cost(const evaluation::UpliftReport& report, double scale);

/// Stacked coupon proportions per budget for one strategy.
std::string proportions(const evaluation::UpliftReport& report,
                        const std::string& strategy, const CouponCatalog& cat);

/// One box (quartiles, whiskers at min/max) per labelled group.
std::string boxplots(const std::vector<std::pair<std::string, std::vector<double>>>& groups,
                     const std::string& title, const std::string& y_label);

}  // namespace couponalloc::plots
