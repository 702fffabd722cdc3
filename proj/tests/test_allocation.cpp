#include <doctest.h>

#include <cmath>
#include <set>

#include "couponalloc/allocation.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace couponalloc;
using namespace couponalloc::allocation;
using fixtures::catalog;
using fixtures::make_stats;

namespace {

CateMatrix pihat_of(const Eigen::MatrixXd& v) {
  std::vector<CustomerId> ids(static_cast<std::size_t>(v.rows()));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<CustomerId>(i + 1);
  return CateMatrix(ids, v);
}

Eigen::MatrixXd mat(Eigen::Index r, Eigen::Index c, std::initializer_list<double> v) {
  Eigen::MatrixXd m(r, c);
  auto it = v.begin();
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = *it++;
  }
  return m;
}

}  // namespace

TEST_CASE("MCK worked example") {
  const auto cat = catalog({5, 10});
  const auto pihat = pihat_of(mat(2, 2, {3, 4, 1, 9}));
  // All nine combinations by hand: the best within 15 is (coupon 1, coupon 2) = 12.
  CHECK(oracle::mck_brute_force(pihat.values(), {5, 10}, 15) == 12.0);
  const auto exact = solve_mck_exact(pihat, cat, 15);
  CHECK(exact.objective == 12.0);
  CHECK(exact.plan.assignments == std::map<CustomerId, CouponId>{{1, 1}, {2, 2}});
  CHECK(exact.plan.consumed_cost == 15.0);
  const auto greedy = solve_mck_greedy(pihat, cat, 15);
  CHECK(greedy.objective == 12.0);
  CHECK(greedy.plan.assignments == exact.plan.assignments);
}

TEST_CASE("MCK with no budget is empty") {
  const auto cat = catalog({5, 10});
  const auto pihat = pihat_of(mat(2, 2, {3, 4, 1, 9}));
  CHECK(solve_mck_exact(pihat, cat, 0).plan.size() == 0);
  CHECK(solve_mck_greedy(pihat, cat, 0).plan.size() == 0);
  CHECK(solve_mck_greedy(pihat, cat, 0).objective == 0.0);
}

TEST_CASE("MCK exact guards") {
  const auto pihat = pihat_of(mat(1, 1, {1}));
  CHECK_THROWS_AS(solve_mck_exact(pihat, CouponCatalog({{1, "x", 1.5}}), 10), Error);
  CHECK_THROWS_AS(solve_mck_exact(pihat, catalog({1}), 1e6), Error);
  CHECK_THROWS_AS(solve_mck_exact(pihat, catalog({1}), 10, ProportionBounds{0, 1}), Error);
  CHECK_THROWS_AS(solve_mck_exact(pihat, catalog({1, 2}), 10), Error);  // column mismatch
}

TEST_CASE("MCK exact matches brute force and greedy stays within one item") {
  Rng rng(31);
  const std::vector<double> table1{5, 5, 10, 10, 15, 13};
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(6));
    const auto J = static_cast<Eigen::Index>(1 + rng.uniform_index(4));
    std::vector<double> costs(table1.begin(), table1.begin() + J);
    Eigen::MatrixXd v(n, J);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < J; ++j) v(i, j) = 4.0 * rng.uniform() - 1.0;
    }
    const double budget = std::floor(60.0 * rng.uniform());
    const auto pihat = pihat_of(v);
    const auto cat = catalog(costs);
    const auto exact = solve_mck_exact(pihat, cat, budget);
    CHECK(exact.objective == doctest::Approx(oracle::mck_brute_force(v, costs, budget)).epsilon(1e-12));
    CHECK(exact.plan.consumed_cost <= budget);
    const auto greedy = solve_mck_greedy(pihat, cat, budget);
    CHECK(greedy.plan.consumed_cost <= budget);
    CHECK(greedy.objective >= exact.objective - std::max(0.0, v.maxCoeff()) - 1e-12);
    CHECK(greedy.objective <= exact.objective + 1e-12);
  }
}

TEST_CASE("MCK greedy respects proportion bounds") {
  Rng rng(2);
  Eigen::MatrixXd v(200, 3);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    v(i, 0) = rng.uniform();
    v(i, 1) = 3.0 * rng.uniform();  // the attractive coupon
    v(i, 2) = rng.uniform() - 0.5;
  }
  const auto cat = catalog({1, 1, 1});
  const auto r = solve_mck_greedy(pihat_of(v), cat, 150, ProportionBounds{0.1, 0.3});
  const auto counts = r.plan.coupon_counts(3);
  for (std::size_t j = 1; j <= 3; ++j) {
    CHECK(counts[j] >= 20);
    CHECK(counts[j] <= 60);
  }
  CHECK(r.plan.consumed_cost <= 150.0);
  CHECK_THROWS_AS(solve_mck_greedy(pihat_of(v), cat, 10, ProportionBounds{0.1, 0.3}), Error);
}

TEST_CASE("worst-case penalty") {
  const Eigen::MatrixXd w = mat(1, 3, {4, 3, 1});
  const Eigen::MatrixXd d = Eigen::MatrixXd::Ones(1, 3);
  CHECK(worst_case_penalty(w, d, 1.0, 0.0) == 0.0);
  CHECK(worst_case_penalty(w, d, 1.0, 2.0) == 7.0);
  CHECK(oracle::subset_penalty({4, 3, 1}, 2) == 7.0);
  CHECK(worst_case_penalty(w, d, 1.0, 1.5) == doctest::Approx(5.5));
  CHECK(worst_case_penalty(w, d, 1.0, 3.0) == 8.0);
  CHECK(worst_case_penalty(w, d, 0.5, 3.0) == 4.0);
  CHECK(worst_case_penalty(w, d, 0.0, 3.0) == 0.0);

  // Fractional budget against the inner LP max t'z, sum z <= g, 0 <= z <= 1,
  // solved by basic-solution enumeration.
  Eigen::MatrixXd a(4, 3);
  a << 1, 1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  Eigen::VectorXd b(4);
  b << 1.5, 1, 1, 1;
  Eigen::VectorXd t(3);
  t << 4, 3, 1;
  CHECK(oracle::enumerate_vertices(t, a, b).objective == doctest::Approx(5.5));
}

TEST_CASE("robust toy instance") {
  const auto st = make_stats({10, 10}, mat(2, 1, {2, 1}), mat(2, 1, {1, 0.1}));
  const auto cat = catalog({1});
  const auto r = solve_ro(st, cat, BudgetConfig{10, {}}, 1.0, 1.0);
  CHECK(r.objective == doctest::Approx(10.0).epsilon(1e-9));
  // One-dimensional scan of w1 with w2 = 10 - w1.
  double best = -1e300;
  for (int s = 0; s <= 10000; ++s) {
    Eigen::MatrixXd w(2, 1);
    w << s / 1000.0, 10.0 - s / 1000.0;
    best = std::max(best, 2 * w(0, 0) + w(1, 0) - worst_case_penalty(w, st.stderrs, 1.0, 1.0));
  }
  CHECK(r.objective == doctest::Approx(best).epsilon(1e-9));
  CHECK_NOTHROW(r.check(st, cat, BudgetConfig{10, {}}));
}

TEST_CASE("robust reductions") {
  Rng rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const auto inst = fixtures::random_instance(rng, 4, 3);
    const BudgetConfig bc{inst.budget, {}};
    const double pairs = static_cast<double>(inst.stats.num_clusters() * inst.cat.size());
    const auto nominal = solve_ro(inst.stats, inst.cat, bc, 0.0, pairs);
    CHECK(solve_ro(inst.stats, inst.cat, bc, 0.7, 0.0).objective == doctest::Approx(nominal.objective).epsilon(1e-9));
    CHECK(solve_mvo(inst.stats, inst.cat, bc, 0.0).objective == doctest::Approx(nominal.objective).epsilon(1e-9));

    // Full worst case: the shifted-coefficient LP, solved by vertex enumeration.
    const double alpha = rng.uniform();
    const auto full = solve_ro(inst.stats, inst.cat, bc, alpha, pairs);
    const auto poly = allocation_polytope(inst.stats, inst.cat, bc);
    Eigen::VectorXd c(poly.num_vars());
    for (std::size_t k = 0; k < inst.stats.num_clusters(); ++k) {
      for (CouponId j = 1; j <= static_cast<CouponId>(inst.cat.size()); ++j) {
        c(inst.stats.index(k, j)) = inst.stats.means(static_cast<Eigen::Index>(k), j - 1) -
                                    alpha * inst.stats.stderrs(static_cast<Eigen::Index>(k), j - 1);
      }
    }
    if (oracle::binomial(static_cast<int>(poly.num_vars() + poly.num_rows()),
                         static_cast<int>(poly.num_rows())) < 2e5) {
      const auto ref = oracle::enumerate_vertices(c, poly.constraints, poly.rhs);
      CHECK(full.objective == doctest::Approx(ref.objective).epsilon(1e-6));
    }
  }
}

TEST_CASE("robust program carries negative nominal coefficients without filtering") {
  const auto st = make_stats({5, 5}, mat(2, 1, {-1, 0.5}), mat(2, 1, {0.1, 0.2}));
  const auto r = solve_ro(st, catalog({1}), BudgetConfig{100, {}}, 1.0, 1.0);
  CHECK(r.w(0, 0) == doctest::Approx(0.0));
  CHECK(r.w(1, 0) == doctest::Approx(5.0));
  CHECK(r.objective == doctest::Approx(5 * 0.5 - 5 * 0.2));
}

TEST_CASE("robust argument checks") {
  const auto st = make_stats({5}, mat(1, 1, {1}), mat(1, 1, {0.1}));
  CHECK_THROWS_AS(solve_ro(st, catalog({1}), BudgetConfig{1, {}}, -1.0, 0.5), Error);
  CHECK_THROWS_AS(solve_ro(st, catalog({1}), BudgetConfig{1, {}}, 1.0, 2.0), Error);
  CHECK_THROWS_AS(solve_ro(st, catalog({1, 2}), BudgetConfig{1, {}}, 1.0, 0.5), Error);
  // Bounds demanding more than the budget allows.
  CHECK_THROWS_AS(solve_ro(st, catalog({1}), BudgetConfig{1, ProportionBounds{0.5, 1.0}}, 1.0, 0.5), Error);
}

TEST_CASE("mean-variance model") {
  SUBCASE("lambda = 1 with zero covariance reports objective 0") {
    const auto st = make_stats({4, 6}, mat(2, 1, {1, 2}), Eigen::MatrixXd::Zero(2, 1));
    const auto r = solve_mvo(st, catalog({1}), BudgetConfig{5, {}}, 1.0);
    CHECK(r.objective == doctest::Approx(0.0));
    CHECK_NOTHROW(r.check(st, catalog({1}), BudgetConfig{5, {}}));
  }
  SUBCASE("two clusters, one coupon, against a dense grid") {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 0.04, 0.01, 0.01, 0.09;
    const auto st = make_stats({10, 8}, mat(2, 1, {1.0, 1.4}), mat(2, 1, {0.2, 0.3}), sigma);
    const auto cat = catalog({2});
    const double lambda = 0.3, budget = 24;
    const auto r = solve_mvo(st, cat, BudgetConfig{budget, {}}, lambda, MvoOptions{20000, 1e-10});
    double best = -1e300;
    for (int a = 0; a <= 1000; ++a) {
      for (int b = 0; b <= 800; ++b) {
        const double w1 = a / 100.0, w2 = b / 100.0;
        if (2 * (w1 + w2) > budget) continue;
        const double f = (1 - lambda) * (1.0 * w1 + 1.4 * w2) -
                         lambda * (0.04 * w1 * w1 + 0.02 * w1 * w2 + 0.09 * w2 * w2);
        best = std::max(best, f);
      }
    }
    CHECK(std::abs(r.objective - best) < 1e-3);
    CHECK_NOTHROW(r.check(st, cat, BudgetConfig{budget, {}}));
  }
  SUBCASE("lambda outside [0, 1]") {
    const auto st = make_stats({4}, mat(1, 1, {1}), mat(1, 1, {0}));
    CHECK_THROWS_AS(solve_mvo(st, catalog({1}), BudgetConfig{5, {}}, 1.5), Error);
  }
}

TEST_CASE("allocation polytope rows") {
  const auto st = make_stats({3, 7}, mat(2, 2, {1, 1, 1, 1}), mat(2, 2, {0, 0, 0, 0}));
  const auto lp = allocation_polytope(st, catalog({2, 3}), BudgetConfig{20, ProportionBounds{0.1, 0.6}});
  CHECK(lp.num_vars() == 4);
  CHECK(lp.num_rows() == 1 + 2 + 4);
  CHECK(lp.row_names[0] == "budget");
  CHECK(lp.rhs(1) == 3.0);
  CHECK(lp.rhs(2) == 7.0);
  CHECK(lp.rhs(3) == doctest::Approx(6.0));
  CHECK(lp.rhs(4) == doctest::Approx(-1.0));
}

TEST_CASE("realization") {
  const auto st = make_stats({5, 4}, mat(2, 2, {1, 1, 1, 1}), mat(2, 2, {0, 0, 0, 0}));
  const auto cat = catalog({1, 2});
  FractionalAllocation w;
  w.budget = 100;

  SUBCASE("a full cluster") {
    w.w = mat(2, 2, {5, 0, 0, 0});
    const auto plan = realize(w, st, cat, 1);
    CHECK(plan.size() == 5);
    for (CustomerId id : st.members[0]) CHECK(plan.assignments.at(id) == 1);
  }
  SUBCASE("fractions below one vanish") {
    w.w = mat(2, 2, {0.9, 0.5, 0.99, 0.2});
    CHECK(realize(w, st, cat, 1).size() == 0);
  }
  SUBCASE("near-integers snap, floors otherwise") {
    w.w = mat(2, 2, {2.99999999995, 1.5, 0, 3.2});
    const auto counts = realized_counts(w, cat);
    CHECK(counts(0, 0) == 3);
    CHECK(counts(0, 1) == 1);
    CHECK(counts(1, 1) == 3);
    w.budget = 3.5;  // snapping would cost 3 + 2 + 6 > budget, so plain floors
    CHECK(realized_counts(w, cat)(0, 0) == 2);
  }
  SUBCASE("deterministic, disjoint and cluster-local") {
    w.w = mat(2, 2, {2, 3, 1, 2});
    const auto a = realize(w, st, cat, 9);
    const auto b = realize(w, st, cat, 9);
    CHECK(a.assignments == b.assignments);
    CHECK(a.size() == 8);
    for (const auto& [id, j] : a.assignments) CHECK(id >= 1);
    const auto counts = a.coupon_counts(2);
    CHECK(counts[1] == 3);
    CHECK(counts[2] == 5);
    CHECK(a.consumed_cost == 13.0);
  }
}

TEST_CASE("realizing a half-and-half split of one large cluster") {
  const std::size_t n = 67090;
  const auto st = make_stats({n}, mat(1, 2, {1, 1}), mat(1, 2, {0, 0}));
  FractionalAllocation w;
  w.w = mat(1, 2, {33544, 33544});
  w.budget = 1e9;
  const auto plan = realize(w, st, catalog({10, 10}), 3);
  const auto counts = plan.coupon_counts(2);
  CHECK(counts[1] == 33544);
  CHECK(counts[2] == 33544);
  CHECK(plan.size() == 67088);  // a map: the two groups are disjoint
}

TEST_CASE("random allocation") {
  std::vector<CustomerId> ids(100);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<CustomerId>(i + 1);
  const auto cat = catalog({5, 10});
  CHECK(random_allocate(ids, cat, 0, 1).size() == 0);
  CHECK(random_allocate(ids, cat, 1000, 1).size() == 100);
  const auto a = random_allocate(ids, cat, 300, 4);
  CHECK(a.assignments == random_allocate(ids, cat, 300, 4).assignments);
  CHECK(a.consumed_cost <= 300);
  CHECK(a.consumed_cost > 300 - 5);  // stops only when even the cheapest coupon misses
  const auto counts = a.coupon_counts(2);
  CHECK(counts[1] > 0);
  CHECK(counts[2] > 0);
}

TEST_CASE("plan effect") {
  const auto pihat = pihat_of(mat(2, 2, {3, 4, 1, 9}));
  CHECK(plan_effect(make_plan({}, catalog({1, 1})), pihat) == 0.0);
  CHECK(plan_effect(make_plan({{1, 2}, {2, 1}}, catalog({1, 1})), pihat) == 5.0);
}
