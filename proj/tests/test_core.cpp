#include <doctest.h>

#include <cmath>
#include <set>

#include "couponalloc/cate_matrix.hpp"
#include "couponalloc/core.hpp"

using namespace couponalloc;

namespace {

ExperimentDataset seven_arm_rows() {
  ExperimentDataset ds;
  ds.arm_probability = 1.0 / 7.0;
  for (int i = 0; i < 14; ++i) {
    ds.rows.push_back({i + 1, {0.1 * i, 1.0}, i % 7, 2.0 + i});
  }
  return ds;
}

}  // namespace

TEST_CASE("standard catalog carries the experiment's unit costs") {
  const auto cat = CouponCatalog::standard();
  CHECK(cat.size() == 6);
  const double expected[] = {5, 5, 10, 10, 15, 13};
  for (int j = 1; j <= 6; ++j) CHECK(cat.cost(j) == expected[j - 1]);
  CHECK(cat.cost(kControl) == 0.0);
  CHECK(cat.has_integer_costs());
  CHECK(cat.mean_cost() == doctest::Approx(58.0 / 6.0));
  CHECK(cat.min_cost() == 5.0);
  CHECK(cat.max_cost() == 15.0);
}

TEST_CASE("catalog rejects gaps and nonpositive costs") {
  CHECK_THROWS_AS(CouponCatalog({{1, "a", 1.0}, {3, "b", 2.0}}), Error);
  CHECK_THROWS_AS(CouponCatalog({{1, "a", 0.0}}), Error);
  CHECK_THROWS_AS(CouponCatalog::standard().cost(7), Error);
  CHECK_FALSE(CouponCatalog({{1, "a", 1.5}}).has_integer_costs());
}

TEST_CASE("dataset validation") {
  const auto cat = CouponCatalog::standard();
  auto ds = seven_arm_rows();
  CHECK(validate_dataset(ds, cat).empty());

  auto bad_arm = ds;
  bad_arm.rows[3].arm = 9;
  const auto v = validate_dataset(bad_arm, cat);
  REQUIRE(v.size() == 1);
  CHECK(v[0].row == 3);
  CHECK(v[0].rule == "arm out of range");
  CHECK_THROWS_WITH_AS(require_valid(bad_arm, cat), doctest::Contains("arm out of range"), Error);

  auto dup = ds;
  dup.rows[5].customer_id = dup.rows[0].customer_id;
  CHECK(validate_dataset(dup, cat).at(0).rule == "duplicate customer_id");

  auto neg = ds;
  neg.rows[1].outcome = -1.0;
  CHECK(validate_dataset(neg, cat).at(0).rule == "negative outcome");

  auto nan = ds;
  nan.rows[2].features[0] = std::nan("");
  CHECK(validate_dataset(nan, cat).at(0).rule == "non-finite feature");

  auto big_p = ds;
  big_p.arm_probability = 0.2;
  CHECK(validate_dataset(big_p, cat).at(0).row == Violation::kDatasetLevel);
}

TEST_CASE("transformed outcome at p = 1/7") {
  const double p = 1.0 / 7.0;
  CHECK(transformed_outcome(true, p, 1.0) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(transformed_outcome(false, p, 1.0) == doctest::Approx(-7.0 / 6.0).epsilon(1e-12));
  CHECK(transformed_outcome(true, p, 0.0) == 0.0);
}

TEST_CASE("budget configuration checks") {
  CHECK_NOTHROW((BudgetConfig{100.0, {}}).validate(6));
  CHECK_NOTHROW((BudgetConfig{100.0, ProportionBounds{0.05, 0.5}}).validate(6));
  CHECK_THROWS_AS((BudgetConfig{-1.0, {}}).validate(6), Error);
  CHECK_THROWS_AS((BudgetConfig{1.0, ProportionBounds{0.6, 0.5}}).validate(6), Error);
  CHECK_THROWS_AS((BudgetConfig{1.0, ProportionBounds{0.2, 0.5}}).validate(6), Error);
}

TEST_CASE("plans and costs") {
  const auto cat = CouponCatalog::standard();
  const auto plan = make_plan({{10, 1}, {11, 5}, {12, 6}}, cat);
  CHECK(plan.consumed_cost == 33.0);
  const auto counts = plan.coupon_counts(6);
  CHECK(counts[1] == 1);
  CHECK(counts[5] == 1);
  CHECK(counts[2] == 0);
  CHECK_THROWS_AS(make_plan({{1, 8}}, cat), Error);
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  std::set<std::uint64_t> seeds;
  for (const char* tag : {"gen", "split", "fit", "segment"}) {
    for (std::uint64_t k = 0; k < 5; ++k) seeds.insert(Rng::derive(7, tag, k));
  }
  CHECK(seeds.size() == 20);
  CHECK(Rng::derive(7, "gen") != Rng::derive(8, "gen"));

  Rng r(1);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  // Mean and variance of a standard normal sample: 5 standard errors.
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 5.0 * std::sqrt(2.0 / n));

  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[r.uniform_index(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 5 * std::sqrt(70000 * (1.0 / 7) * (6.0 / 7)));
}

TEST_CASE("cate matrix lookups") {
  Eigen::MatrixXd v(2, 2);
  v << 1, 2, 3, 4;
  CateMatrix m({5, 9}, v);
  CHECK(m.row_of(9) == 1);
  CHECK(m.at(1, 2) == 4.0);
  CHECK(m.at(0, kControl) == 0.0);
  CHECK_THROWS_AS(m.row_of(6), Error);
  CHECK_THROWS_AS(CateMatrix({1, 1}, v), Error);
}
