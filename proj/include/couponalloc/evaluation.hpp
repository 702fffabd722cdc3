#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "couponalloc/allocation.hpp"
#include "couponalloc/cate_matrix.hpp"
#include "couponalloc/core.hpp"
#include "couponalloc/segmentation.hpp"
#include "couponalloc/uplift.hpp"

namespace couponalloc::evaluation {

struct UpliftGmv {
  double total = 0.0;
  /// (customer, term) for every assigned customer, in customer id order.
  std::vector<std::pair<CustomerId, double>> terms;
};

/// Transformed-outcome Uplift-GMV of a plan on experiment data. Throws Error
/// if the plan names a customer that is not in ds.
UpliftGmv uplift_gmv(const AllocationPlan& plan, const ExperimentDataset& ds,
                     double p);

/// Multi-arm inverse-propensity contrast for giving coupon j to this row:
/// (1{arm = j} / p - 1{arm = 0} / p0) * outcome.
double ipw_contrast_term(const ExperimentRow& row, CouponId j, double p,
                         double p0);

struct UpliftCurve {
  CouponId coupon = 0;
  /// points[t] = cumulative transformed outcome of the top-t customers.
  std::vector<double> points;
  double auuc = 0.0;
  double auuc_stderr = 0.0;
};

/// Area between the curve and the chord from the origin to its endpoint,
/// trapezoid rule with unit spacing.
double auuc(std::span<const double> points);

/// Ranks customers by score (descending, ties by customer id). With
/// n_bootstrap >= 2 the AUUC standard error is estimated by resampling rows.
UpliftCurve uplift_curve(std::span<const double> scores,
                         const ExperimentDataset& ds, CouponId j, double p,
                         int n_bootstrap = 0, std::uint64_t seed = 0);

/// Budgets as fractions of |I| * mean unit cost.
std::vector<double> budget_grid(std::span<const double> fractions,
                                std::size_t customers, const CouponCatalog& cat);
/// `count` evenly spaced fractions from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

enum class StrategyKind { kRandom, kMck, kMvo, kRo };

struct Strategy {
  StrategyKind kind = StrategyKind::kRandom;
  allocation::UncertaintyConfig params;
};

StrategyKind parse_strategy(const std::string& name);
/// "random", "mck", "mvo_k{K}" or "ro_k{K}".
std::string strategy_label(StrategyKind kind, std::size_t clusters);

struct SweepPoint {
  std::string strategy;
  double budget = 0.0;
  double consumed_cost = 0.0;
  double uplift_gmv = 0.0;
  /// Share of the population holding each coupon, index j-1.
  std::vector<double> proportions;
  /// Sum of the estimated effects over the plan.
  double estimated_effect = 0.0;
  /// Sum of the true effects over the plan, when a truth matrix is given.
  std::optional<double> true_effect;
  /// Model objective (MVO/RO), NaN otherwise.
  double objective = 0.0;
  std::string error;
};

struct UpliftReport {
  std::vector<SweepPoint> points;

  const SweepPoint* find(const std::string& strategy, double budget) const;
  /// strategy,budget,consumed_cost,uplift_gmv
  std::string report_csv() const;
  std::string proportions_csv() const;
  std::string oracle_csv() const;
  std::string errors_csv() const;
};

struct SweepInputs {
  const segmentation::ClusterStats* stats = nullptr;
  const CateMatrix* pihat = nullptr;
  const ExperimentDataset* ds = nullptr;
  const CouponCatalog* cat = nullptr;
  /// Optional true effects for oracle scoring.
  const CateMatrix* truth = nullptr;
  std::optional<ProportionBounds> bounds;
};

/// Runs every strategy at every budget. A failing point records its error
/// and the sweep continues.
UpliftReport budget_sweep(const std::vector<Strategy>& strategies,
                          const SweepInputs& in, std::span<const double> budgets,
                          std::uint64_t seed);

/// Plan produced by one strategy at one budget.
struct StrategyOutcome {
  AllocationPlan plan;
  double objective = 0.0;
};
StrategyOutcome run_strategy(const Strategy& s, const SweepInputs& in,
                             double budget, std::uint64_t seed);

struct CvSettings {
  uplift::LearnerOptions learner;
  std::size_t clusters = 10;
  int n_bootstrap = 200;
  segmentation::GmmOptions gmm;
  /// Reference budget as a fraction of fold size times mean unit cost.
  double budget_fraction = 1.0;
  std::optional<ProportionBounds> bounds;
  int folds = 5;
};

struct CvEntry {
  allocation::UncertaintyConfig params;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
};

struct CvResult {
  allocation::UncertaintyConfig best;
  std::vector<CvEntry> entries;
};

/// Grid search for MVO (lambda) or RO (alpha, beta). Each fold refits the
/// learner on the other folds, segments the held-out fold and scores the
/// realized plan by Uplift-GMV. Ties go to smaller lambda, then larger alpha,
/// then larger beta.
CvResult cross_validate(const std::vector<allocation::UncertaintyConfig>& grid,
                        const ExperimentDataset& train, const CouponCatalog& cat,
                        StrategyKind model, const CvSettings& settings,
                        std::uint64_t seed);

/// Default hyperparameter grids.
std::vector<allocation::UncertaintyConfig> lambda_grid(std::span<const double> lambdas);
std::vector<allocation::UncertaintyConfig> robust_grid(std::span<const double> alphas,
                                                       std::span<const double> betas);

}  // namespace couponalloc::evaluation
