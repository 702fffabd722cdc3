#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "couponalloc/cate_matrix.hpp"
#include "couponalloc/core.hpp"
#include "couponalloc/segmentation.hpp"
#include "couponalloc/solver.hpp"

namespace couponalloc::allocation {

using segmentation::ClusterStats;

enum class ModelTag { kMckRelaxed, kMvo, kRo };

std::string to_string(ModelTag tag);

/// Cluster-level coupon counts, w(k, j-1) = coupons of type j for cluster k.
struct FractionalAllocation {
  Eigen::MatrixXd w;
  ModelTag model = ModelTag::kRo;
  double objective = 0.0;
  double budget = 0.0;
  /// Frank-Wolfe iterations or simplex pivots spent.
  int iterations = 0;

  double cost(const CouponCatalog& cat) const;
  /// Throws Error if capacity, budget or proportion bounds are violated
  /// beyond the documented slack.
  void check(const ClusterStats& stats, const CouponCatalog& cat,
             const BudgetConfig& budget_cfg) const;
};

struct UncertaintyConfig {
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;

  /// Gamma = beta * |K x J|.
  double gamma(std::size_t clusters, std::size_t coupons) const {
    return beta * static_cast<double>(clusters * coupons);
  }
  void validate() const;
};

struct MckResult {
  AllocationPlan plan;
  double objective = 0.0;
};

inline constexpr std::size_t kMckExactMaxCustomers = 500;
inline constexpr double kMckExactMaxBudget = 20000.0;

/// Exact 0-1 multiple-choice knapsack by dynamic programming over integer
/// budget. Needs integer unit costs and no proportion bounds; throws Error
/// past the size guard.
MckResult solve_mck_exact(const CateMatrix& pihat, const CouponCatalog& cat,
                          double budget,
                          const std::optional<ProportionBounds>& bounds = {});

/// Incremental-efficiency greedy over each customer's upper convex hull of
/// (cost, effect) options, returning the better of that and the best single
/// item. With bounds, each coupon first reserves its lower-bound count of
/// highest-effect customers and the greedy then respects the upper caps.
MckResult solve_mck_greedy(const CateMatrix& pihat, const CouponCatalog& cat,
                           double budget,
                           const std::optional<ProportionBounds>& bounds = {});

/// Feasible set over w: budget, cluster capacities and optional proportion
/// bounds relative to the clustered population. Variables are ordered as
/// ClusterStats::index.
solver::LinearProgram allocation_polytope(const ClusterStats& stats,
                                          const CouponCatalog& cat,
                                          const BudgetConfig& budget_cfg);

struct MvoOptions {
  int max_iter = 2000;
  double rel_tol = 1e-5;
};

/// maximize (1 - lambda) pibar'w - lambda w' sigma w over the polytope.
FractionalAllocation solve_mvo(const ClusterStats& stats,
                               const CouponCatalog& cat,
                               const BudgetConfig& budget_cfg, double lambda,
                               const MvoOptions& options = {});

/// Largest total of at most gamma terms alpha * delta_kj * w_kj, with a
/// fractional gamma taking that fraction of the next largest term.
double worst_case_penalty(const Eigen::MatrixXd& w,
                          const Eigen::MatrixXd& stderrs, double alpha,
                          double gamma);

/// Builds the deterministic robust counterpart over (w, h, q).
solver::LinearProgram robust_program(const ClusterStats& stats,
                                     const CouponCatalog& cat,
                                     const BudgetConfig& budget_cfg,
                                     double alpha, double gamma);

/// Solves the robust counterpart and verifies that the LP objective equals
/// pibar'w - worst_case_penalty(w); throws Error on infeasibility or if the
/// check fails.
FractionalAllocation solve_ro(const ClusterStats& stats,
                              const CouponCatalog& cat,
                              const BudgetConfig& budget_cfg, double alpha,
                              double gamma);

/// Integer counts realized from w: floor, with entries within 1e-7 of an
/// integer snapped to it unless that would exceed the budget.
Eigen::MatrixXi realized_counts(const FractionalAllocation& w,
                                const CouponCatalog& cat);

/// Draws the realized counts from each cluster without replacement. Clusters
/// and coupons are visited in ascending order; cluster k draws from its own
/// stream derived from (seed, k).
AllocationPlan realize(const FractionalAllocation& w, const ClusterStats& stats,
                       const CouponCatalog& cat, std::uint64_t seed);

/// Visits customers in seeded random order and gives each a uniformly drawn
/// coupon when it still fits the budget; stops once nothing fits.
AllocationPlan random_allocate(const std::vector<CustomerId>& customers,
                               const CouponCatalog& cat, double budget,
                               std::uint64_t seed);
AllocationPlan random_allocate(const ExperimentDataset& ds,
                               const CouponCatalog& cat, double budget,
                               std::uint64_t seed);

/// Sum of pihat over a plan's assignments.
double plan_effect(const AllocationPlan& plan, const CateMatrix& pihat);

}  // namespace couponalloc::allocation
