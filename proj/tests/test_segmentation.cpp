#include <doctest.h>

#include <cmath>

#include "couponalloc/segmentation.hpp"

using namespace couponalloc;
using namespace couponalloc::segmentation;

namespace {

CateMatrix matrix(const Eigen::MatrixXd& v) {
  std::vector<CustomerId> ids(static_cast<std::size_t>(v.rows()));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<CustomerId>(100 + i);
  return CateMatrix(ids, v);
}

Assignment labels(const CateMatrix& m, std::vector<int> cluster, std::size_t K) {
  return Assignment{m.customer_ids(), std::move(cluster), K};
}

Eigen::MatrixXd two_clouds(std::size_t per_cloud, double separation, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(2 * per_cloud), 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double shift = i < static_cast<Eigen::Index>(per_cloud) ? 0.0 : separation;
    for (Eigen::Index d = 0; d < 3; ++d) x(i, d) = rng.normal() + (d == 0 ? shift : 0.0);
  }
  return x;
}

void check_model_invariants(const GmmModel& g, const Eigen::MatrixXd& x, double reg_floor) {
  double wsum = 0.0;
  for (const auto& c : g.components) {
    wsum += c.weight;
    CHECK(c.weight > 0.0);
    CHECK((c.cov - c.cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.cov);
    CHECK(es.eigenvalues().minCoeff() >= reg_floor * (1 - 1e-9));
  }
  CHECK(std::abs(wsum - 1.0) <= 1e-10);
  const Eigen::MatrixXd r = g.responsibilities(x);
  CHECK((r.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
  for (std::size_t t = 1; t < g.log_likelihood.size(); ++t) {
    CHECK(g.log_likelihood[t] >= g.log_likelihood[t - 1] - 1e-9);
  }
}

}  // namespace

TEST_CASE("single component is the Gaussian maximum-likelihood fit") {
  const Eigen::MatrixXd x = two_clouds(200, 3.0, 1);
  const auto g = fit_gmm(x, 1, 7);
  REQUIRE(g.num_components() == 1);
  CHECK(g.components[0].weight == doctest::Approx(1.0));
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  CHECK((g.components[0].mean - mean).cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows());
  CHECK((g.components[0].cov - cov).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("well separated clouds are recovered") {
  const Eigen::MatrixXd x = two_clouds(500, 10.0, 3);
  const auto g = fit_gmm(x, 2, 11);
  const auto m = matrix(x);
  const auto a = assign_clusters(g, m);
  const int first = a.cluster[0];
  int correct = 0;
  const Eigen::MatrixXd r = g.responsibilities(x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int expected = i < 500 ? first : 1 - first;
    correct += a.cluster[static_cast<std::size_t>(i)] == expected;
    CHECK(r(i, expected) >= 0.99);
  }
  CHECK(correct == 1000);
  check_model_invariants(g, x, 0.0);
}

TEST_CASE("EM invariants on overlapping data and restarts") {
  Rng rng(5);
  Eigen::MatrixXd x(600, 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = rng.normal() + (i % 3) * 1.5;
    x(i, 1) = rng.normal() * (1 + (i % 2));
  }
  for (std::size_t K : {1u, 2u, 3u, 5u, 8u}) {
    const auto g = fit_gmm(x, K, 100 + K);
    CHECK(g.num_components() == K);
    check_model_invariants(g, x, 0.0);
  }
  const auto a = fit_gmm(x, 3, 42);
  const auto b = fit_gmm(x, 3, 42);
  CHECK(a.log_likelihood == b.log_likelihood);
}

TEST_CASE("fit_gmm argument checks") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 2);
  CHECK_THROWS_AS(fit_gmm(x, 0, 1), Error);
  CHECK_THROWS_AS(fit_gmm(x, 6, 1), Error);
}

TEST_CASE("hard assignment rules") {
  GmmModel g;
  for (double mu : {0.0, 5.0}) {
    g.components.push_back({0.5, Eigen::VectorXd::Constant(1, mu), Eigen::MatrixXd::Identity(1, 1)});
  }
  Eigen::MatrixXd v(3, 1);
  v << 5.0, 2.5, 0.1;  // at mu_2, exact tie, near mu_1
  const auto a = assign_clusters(g, matrix(v));
  CHECK(a.cluster == std::vector<int>{1, 0, 0});

  Eigen::MatrixXd same = Eigen::MatrixXd::Constant(4, 1, 2.5);
  const auto all = assign_clusters(g, matrix(same));
  CHECK(all.sizes() == std::vector<std::size_t>{4, 0});
  const auto c = compact(all);
  CHECK(c.num_clusters == 1);
  CHECK(c.sizes() == std::vector<std::size_t>{4});

  Eigen::MatrixXd wrong(2, 2);
  wrong.setZero();
  CHECK_THROWS_AS(assign_clusters(g, matrix(wrong)), Error);
}

TEST_CASE("compact keeps the relative order of surviving clusters") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 1);
  const auto m = matrix(v);
  const auto c = compact(labels(m, {3, 1, 3, 1}, 5));
  CHECK(c.num_clusters == 2);
  CHECK(c.cluster == std::vector<int>{1, 0, 1, 0});
}

TEST_CASE("cluster means and standard errors") {
  Eigen::MatrixXd v(4, 2);
  v << 1, 7, 2, 7, 3, 7, 10, -1;
  const auto m = matrix(v);
  const auto st = cluster_stats(m, labels(m, {0, 0, 0, 1}, 2), 50, 1);
  CHECK(st.means(0, 0) == doctest::Approx(2.0));
  // Sample std 1 over sqrt(3).
  CHECK(st.stderrs(0, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(st.stderrs(0, 1) == 0.0);
  CHECK(st.stderrs(1, 0) == 0.0);  // singleton cluster
  CHECK(st.sizes == std::vector<std::size_t>{3, 1});
  CHECK(st.total_customers() == 4);
  CHECK(st.members[1] == std::vector<CustomerId>{103});
  CHECK(st.index(1, 2) == 3);
  CHECK_NOTHROW(st.validate());
  CHECK((st.cov - st.cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < st.cov.rows(); ++i) CHECK(st.cov(i, i) >= 0.0);
}

TEST_CASE("constant effects have zero spread") {
  const Eigen::MatrixXd v = Eigen::MatrixXd::Constant(30, 3, 1.25);
  const auto m = matrix(v);
  std::vector<int> k(30);
  for (int i = 0; i < 30; ++i) k[static_cast<std::size_t>(i)] = i % 3;
  const auto st = cluster_stats(m, labels(m, k, 3), 20, 2);
  CHECK(st.stderrs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(st.cov.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bootstrap variance of a cluster mean approaches the squared standard error") {
  Rng rng(8);
  Eigen::MatrixXd v(2000, 2);
  std::vector<int> k(2000);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    k[static_cast<std::size_t>(i)] = i < 600 ? 0 : 1;
    v(i, 0) = rng.normal(1.0, 2.0);
    v(i, 1) = rng.normal(-1.0, 0.5);
  }
  const auto m = matrix(v);
  const auto st = cluster_stats(m, labels(m, k, 2), 2000, 3);
  for (std::size_t c = 0; c < 2; ++c) {
    for (CouponId j = 1; j <= 2; ++j) {
      const auto idx = st.index(c, j);
      const double se2 = std::pow(st.stderrs(static_cast<Eigen::Index>(c), j - 1), 2);
      CHECK(std::abs(st.cov(idx, idx) - se2) <= 0.2 * se2);
    }
  }
}

TEST_CASE("cluster_stats errors") {
  const Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3, 1);
  const auto m = matrix(v);
  CHECK_THROWS_WITH_AS(cluster_stats(m, labels(m, {0, 0, 2}, 3), 10, 1),
                       doctest::Contains("cluster 1 is empty"), Error);
  CHECK_THROWS_AS(cluster_stats(m, labels(m, {0, 0}, 1), 10, 1), Error);
  CHECK_THROWS_AS(cluster_stats(m, labels(m, {0, 0, 0}, 1), 1, 1), Error);
}

TEST_CASE("uplift table of transformed outcomes") {
  const double p = 1.0 / 7.0;
  ExperimentDataset ds;
  ds.arm_probability = p;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 1);
  for (int i = 0; i < 4; ++i) ds.rows.push_back({100 + i, {0.0}, 1, 1.0 + i});
  const auto m = matrix(v);
  const auto st = cluster_stats(m, labels(m, {0, 0, 0, 0}, 1), 5, 1);
  const auto t = table2_report(st, ds, p);
  // Every row is matched: each term is 7 times its outcome.
  CHECK(t.mean(0, 0) == doctest::Approx(7.0 * 2.5));
  CHECK(t.stderr_(0, 0) == doctest::Approx(7.0 * std::sqrt(5.0 / 3.0 / 4.0)));

  // No matched rows: every term is -7y/6 at p = 1/7.
  for (auto& r : ds.rows) r.arm = 0;
  const auto u = table2_report(st, ds, p);
  CHECK(u.mean(0, 0) == doctest::Approx(-7.0 * 2.5 / 6.0));
  CHECK(std::isfinite(u.stderr_(0, 0)));

  const auto text = t.to_text(CouponCatalog({{1, "only", 1.0}}));
  CHECK(text.find("only") != std::string::npos);
  CHECK(text.find("17.50") != std::string::npos);
}

TEST_CASE("uplift table has one row per cluster and one column per coupon") {
  Rng rng(4);
  const Eigen::MatrixXd v = Eigen::MatrixXd::Random(200, 6);
  const auto m = matrix(v);
  std::vector<int> k(200);
  ExperimentDataset ds;
  ds.arm_probability = 1.0 / 7.0;
  for (int i = 0; i < 200; ++i) {
    k[static_cast<std::size_t>(i)] = i % 10;
    ds.rows.push_back({100 + i, {0.0}, static_cast<CouponId>(rng.uniform_index(7)), rng.uniform()});
  }
  const auto st = cluster_stats(m, labels(m, k, 10), 5, 1);
  const auto t = table2_report(st, ds, 1.0 / 7.0);
  CHECK(t.mean.rows() == 10);
  CHECK(t.mean.cols() == 6);
}
