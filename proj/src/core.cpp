#include "couponalloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

namespace couponalloc {

CouponCatalog::CouponCatalog(std::vector<Coupon> coupons)
    : coupons_(std::move(coupons)) {
  for (std::size_t i = 0; i < coupons_.size(); ++i) {
    const Coupon& c = coupons_[i];
    if (c.id != static_cast<CouponId>(i + 1)) {
      throw Error("coupon ids must be dense 1..|J| in order; got id " +
                  std::to_string(c.id) + " at position " +
                  std::to_string(i + 1));
    }
    if (!(c.unit_cost > 0.0) || !std::isfinite(c.unit_cost)) {
      throw Error("coupon " + std::to_string(c.id) +
                  " must have a positive finite unit cost");
    }
  }
}

CouponCatalog CouponCatalog::standard() {
  return CouponCatalog({{1, "5% discount", 5.0},
                        {2, "5% cashback", 5.0},
                        {3, "10% discount", 10.0},
                        {4, "10% cashback", 10.0},
                        {5, "15% discount", 15.0},
                        {6, "300 yen discount", 13.0}});
}

double CouponCatalog::cost(CouponId id) const {
  if (id == kControl) return 0.0;
  if (!contains(id)) throw Error("unknown coupon id " + std::to_string(id));
  return coupons_[static_cast<std::size_t>(id) - 1].unit_cost;
}

const std::string& CouponCatalog::label(CouponId id) const {
  static const std::string control = "no coupon";
  if (id == kControl) return control;
  if (!contains(id)) throw Error("unknown coupon id " + std::to_string(id));
  return coupons_[static_cast<std::size_t>(id) - 1].label;
}

double CouponCatalog::mean_cost() const {
  if (coupons_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : coupons_) s += c.unit_cost;
  return s / static_cast<double>(coupons_.size());
}

double CouponCatalog::min_cost() const {
  double m = coupons_.empty() ? 0.0 : coupons_.front().unit_cost;
  for (const auto& c : coupons_) m = std::min(m, c.unit_cost);
  return m;
}

double CouponCatalog::max_cost() const {
  double m = 0.0;
  for (const auto& c : coupons_) m = std::max(m, c.unit_cost);
  return m;
}

bool CouponCatalog::has_integer_costs() const {
  return std::all_of(coupons_.begin(), coupons_.end(), [](const Coupon& c) {
    return c.unit_cost == std::floor(c.unit_cost);
  });
}

double ExperimentDataset::mean_outcome() const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.outcome;
  return s / static_cast<double>(rows.size());
}

ExperimentDataset ExperimentDataset::subset(
    const std::vector<std::size_t>& indices) const {
  ExperimentDataset out;
  out.arm_probability = arm_probability;
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) out.rows.push_back(rows.at(i));
  return out;
}

std::vector<Violation> validate_dataset(const ExperimentDataset& ds,
                                        const CouponCatalog& cat) {
  std::vector<Violation> out;
  const double p = ds.arm_probability;
  const double arms = static_cast<double>(cat.size() + 1);
  if (!(p > 0.0 && p < 1.0)) {
    out.push_back({Violation::kDatasetLevel, "arm probability outside (0,1)"});
  } else if (p * arms > 1.0 + 1e-12) {
    out.push_back({Violation::kDatasetLevel,
                   "arm probability exceeds 1/(|J|+1)"});
  }
  const std::size_t dim = ds.feature_dim();
  std::set<CustomerId> seen;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const ExperimentRow& r = ds.rows[i];
    if (r.features.size() != dim) out.push_back({i, "ragged features"});
    if (r.arm < 0 || r.arm > static_cast<CouponId>(cat.size())) {
      out.push_back({i, "arm out of range"});
    }
    if (!std::isfinite(r.outcome)) {
      out.push_back({i, "non-finite outcome"});
    } else if (r.outcome < 0.0) {
      out.push_back({i, "negative outcome"});
    }
    if (std::any_of(r.features.begin(), r.features.end(),
                    [](double v) { return !std::isfinite(v); })) {
      out.push_back({i, "non-finite feature"});
    }
    if (!seen.insert(r.customer_id).second) {
      out.push_back({i, "duplicate customer_id"});
    }
  }
  return out;
}

void require_valid(const ExperimentDataset& ds, const CouponCatalog& cat) {
  const auto violations = validate_dataset(ds, cat);
  if (violations.empty()) return;
  std::string msg = "invalid dataset (" + std::to_string(violations.size()) +
                    " violations):";
  for (std::size_t i = 0; i < std::min<std::size_t>(5, violations.size());
       ++i) {
    const auto& v = violations[i];
    msg += v.row == Violation::kDatasetLevel
               ? " [dataset] "
               : " [row " + std::to_string(v.row) + "] ";
    msg += v.rule + ";";
  }
  throw Error(msg);
}

void BudgetConfig::validate(std::size_t num_coupons) const {
  if (!(total_budget >= 0.0) || !std::isfinite(total_budget)) {
    throw Error("budget must be a nonnegative finite number");
  }
  if (!bounds) return;
  const double lo = bounds->lower;
  const double hi = bounds->upper;
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) {
    throw Error("proportion bounds must satisfy 0 <= L <= U <= 1");
  }
  if (lo * static_cast<double>(num_coupons) > 1.0 + 1e-12) {
    throw Error("lower proportion bound L*|J| exceeds 1");
  }
}

std::vector<std::size_t> AllocationPlan::coupon_counts(
    std::size_t num_coupons) const {
  std::vector<std::size_t> counts(num_coupons + 1, 0);
  for (const auto& [customer, coupon] : assignments) {
    if (coupon >= 1 && static_cast<std::size_t>(coupon) <= num_coupons) {
      ++counts[static_cast<std::size_t>(coupon)];
    }
  }
  return counts;
}

double plan_cost(const AllocationPlan& plan, const CouponCatalog& cat) {
  double total = 0.0;
  for (const auto& [customer, coupon] : plan.assignments) {
    if (!cat.contains(coupon)) {
      throw Error("plan assigns unknown coupon id " + std::to_string(coupon) +
                  " to customer " + std::to_string(customer));
    }
    total += cat.cost(coupon);
  }
  return total;
}

AllocationPlan make_plan(std::map<CustomerId, CouponId> assignments,
                         const CouponCatalog& cat) {
  AllocationPlan plan;
  plan.assignments = std::move(assignments);
  plan.consumed_cost = plan_cost(plan, cat);
  return plan;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t Rng::derive(std::uint64_t seed, std::string_view tag,
                          std::uint64_t index) {
  // FNV-1a over the tag, then mixed with seed and index.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed ^ h) + index);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw Error("uniform_index requires n > 0");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace couponalloc
