#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace couponalloc {

using CustomerId = std::int64_t;
// 0 is the control arm ("no coupon"); real coupons are 1..|J|.
using CouponId = int;
inline constexpr CouponId kControl = 0;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Coupon {
  CouponId id = 0;
  std::string label;
  double unit_cost = 0.0;
};

/// Ordered set of coupon types with dense ids 1..|J|.
class CouponCatalog {
 public:
  CouponCatalog() = default;
  /// Throws Error if ids are not dense 1..|J| or any cost is not positive.
  explicit CouponCatalog(std::vector<Coupon> coupons);

  /// The six coupon types and unit costs used in the production experiment.
  static CouponCatalog standard();

  std::size_t size() const { return coupons_.size(); }
  const std::vector<Coupon>& coupons() const { return coupons_; }
  bool contains(CouponId id) const {
    return id >= 1 && static_cast<std::size_t>(id) <= coupons_.size();
  }
  /// Unit cost of `id`; the control arm costs 0. Throws on unknown ids.
  double cost(CouponId id) const;
  const std::string& label(CouponId id) const;
  double mean_cost() const;
  double min_cost() const;
  double max_cost() const;
  bool has_integer_costs() const;

 private:
  std::vector<Coupon> coupons_;
};

struct ExperimentRow {
  CustomerId customer_id = 0;
  std::vector<double> features;
  CouponId arm = kControl;
  double outcome = 0.0;
};

/// Rows of a completely randomized coupon experiment.
struct ExperimentDataset {
  std::vector<ExperimentRow> rows;
  /// Per-arm assignment probability p.
  double arm_probability = 0.0;

  std::size_t size() const { return rows.size(); }
  std::size_t feature_dim() const {
    return rows.empty() ? 0 : rows.front().features.size();
  }
  double mean_outcome() const;
  ExperimentDataset subset(const std::vector<std::size_t>& indices) const;
};

struct Violation {
  static constexpr std::size_t kDatasetLevel = static_cast<std::size_t>(-1);
  std::size_t row = kDatasetLevel;
  std::string rule;
};

std::vector<Violation> validate_dataset(const ExperimentDataset& ds,
                                        const CouponCatalog& cat);

/// Throws Error listing the first few violations if `ds` is not valid.
void require_valid(const ExperimentDataset& ds, const CouponCatalog& cat);

struct ProportionBounds {
  double lower = 0.0;
  double upper = 1.0;
};

struct BudgetConfig {
  double total_budget = 0.0;
  std::optional<ProportionBounds> bounds;

  void validate(std::size_t num_coupons) const;
};

/// Customer-level coupon assignment; absent customers get no coupon.
struct AllocationPlan {
  std::map<CustomerId, CouponId> assignments;
  double consumed_cost = 0.0;

  std::size_t size() const { return assignments.size(); }
  /// Number of customers holding each coupon, indexed by coupon id (slot 0 unused).
  std::vector<std::size_t> coupon_counts(std::size_t num_coupons) const;
};

double plan_cost(const AllocationPlan& plan, const CouponCatalog& cat);

/// Builds a plan and fills consumed_cost from the catalog.
AllocationPlan make_plan(std::map<CustomerId, CouponId> assignments,
                         const CouponCatalog& cat);

/// Transformed-outcome uplift term for one customer hypothetically given a
/// coupon: ((W - p) / (p (1 - p))) * outcome, W = 1 if the randomized arm
/// matches the coupon.
inline double transformed_outcome(bool matched, double p, double outcome) {
  return ((matched ? 1.0 : 0.0) - p) / (p * (1.0 - p)) * outcome;
}

/// Deterministic random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; distributions are implemented here so
/// that draws do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent sub-seed for a named stage, optionally indexed.
  static std::uint64_t derive(std::uint64_t seed, std::string_view tag,
                              std::uint64_t index = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, n). Requires n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace couponalloc
