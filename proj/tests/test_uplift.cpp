#include <doctest.h>

#include <cmath>
#include <map>

#include "couponalloc/synthgen.hpp"
#include "couponalloc/uplift.hpp"

using namespace couponalloc;
using namespace couponalloc::uplift;

namespace {

// Linear baseline and linear effects: exactly representable by the ridge
// learner's feature x arm interactions.
synthgen::GroundTruthModel linear_model(const CouponCatalog& cat) {
  auto gt = synthgen::default_model(cat, 0.0);
  gt.baseline = [](std::span<const double> x) { return 20.0 + 0.5 * x[0] - 0.3 * x[1]; };
  for (std::size_t j = 0; j < cat.size(); ++j) {
    const double a = 0.2 * static_cast<double>(j + 1), b = 0.1 * static_cast<double>(j);
    gt.effects[j] = [a, b](std::span<const double> x) { return a + b * x[2]; };
  }
  return gt;
}

LearnerOptions ridge(double penalty) {
  LearnerOptions o;
  o.kind = LearnerKind::kRidge;
  o.ridge_penalty = penalty;
  return o;
}

}  // namespace

TEST_CASE("constant outcomes give constant predictions and zero effects") {
  const auto cat = CouponCatalog::standard();
  auto g = synthgen::generate(synthgen::zero_effect_model(cat, 0.0), 1400, cat, 1.0 / 7.0, 2);
  for (auto& r : g.dataset.rows) r.outcome = 4.25;
  for (auto kind : {LearnerKind::kGbt, LearnerKind::kRidge}) {
    LearnerOptions o;
    o.kind = kind;
    const auto m = fit_slearner(g.dataset, cat, o, 1);
    for (CouponId j = 0; j <= 6; ++j) {
      const auto pred = m.predict_outcome(g.dataset, j);
      CHECK((pred.array() - 4.25).abs().maxCoeff() < 1e-8);
    }
    CHECK(m.estimate_cate(g.dataset).values().cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("noise-free linear data is fit to training MSE below 1e-6") {
  const auto cat = CouponCatalog::standard();
  const auto gt = linear_model(cat);
  const auto g = synthgen::generate(gt, 5000, cat, 1.0 / 7.0, 4);
  const auto m = fit_slearner(g.dataset, cat, ridge(1e-9), 1);
  double sse = 0.0;
  for (CouponId j = 0; j <= 6; ++j) {
    const auto pred = m.predict_outcome(g.dataset, j);
    for (std::size_t i = 0; i < g.dataset.size(); ++i) {
      const auto& r = g.dataset.rows[i];
      if (r.arm != j) continue;
      const double e = pred(static_cast<Eigen::Index>(i)) - r.outcome;
      sse += e * e;
    }
  }
  CHECK(sse / static_cast<double>(g.dataset.size()) <= 1e-6);
  // The generator's tau is the oracle for the estimated effects.
  const auto cate = m.estimate_cate(g.dataset);
  CHECK((cate.values() - g.true_cate.values()).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("zero-effect noise-free data gives zero effects") {
  const auto cat = CouponCatalog::standard();
  SUBCASE("ridge learner on a baseline it represents exactly") {
    auto gt = synthgen::zero_effect_model(cat, 0.0);
    gt.baseline = linear_model(cat).baseline;
    const auto g = synthgen::generate(gt, 3000, cat, 1.0 / 7.0, 8);
    const auto m = fit_slearner(g.dataset, cat, ridge(1e-6), 3);
    CHECK(m.estimate_cate(g.dataset).values().cwiseAbs().maxCoeff() <= 1e-6);
  }
  SUBCASE("default learner on the default baseline") {
    const auto g = synthgen::generate(synthgen::zero_effect_model(cat, 0.0), 3000, cat, 1.0 / 7.0, 8);
    const auto m = fit_slearner(g.dataset, cat, LearnerOptions{}, 3);
    CHECK(m.estimate_cate(g.dataset).values().cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("control column is exactly zero and fits are deterministic") {
  const auto cat = CouponCatalog::standard();
  const auto g = synthgen::generate(synthgen::default_model(cat), 2000, cat, 1.0 / 7.0, 9);
  const auto a = fit_slearner(g.dataset, cat, LearnerOptions{}, 5).estimate_cate(g.dataset);
  const auto b = fit_slearner(g.dataset, cat, LearnerOptions{}, 5).estimate_cate(g.dataset);
  CHECK(a.values() == b.values());
  for (std::size_t i = 0; i < a.customers(); ++i) CHECK(a.at(i, kControl) == 0.0);
}

TEST_CASE("a missing arm is reported by name") {
  const auto cat = CouponCatalog::standard();
  auto g = synthgen::generate(synthgen::default_model(cat), 700, cat, 1.0 / 7.0, 1);
  for (auto& r : g.dataset.rows) {
    if (r.arm == 3) r.arm = 2;
  }
  CHECK_THROWS_WITH_AS(fit_slearner(g.dataset, cat, LearnerOptions{}, 1),
                       doctest::Contains("arm 3 (10% discount)"), Error);
}

namespace {

struct FullSizeFit {
  CouponCatalog cat = CouponCatalog::standard();
  synthgen::GroundTruthModel gt = synthgen::default_model(cat);
  synthgen::Generated g = synthgen::generate(gt, 70000, cat, 1.0 / 7.0, 20240601);
  CateMatrix cate = fit_slearner(g.dataset, cat, LearnerOptions{}, 1).estimate_cate(g.dataset);
};

const FullSizeFit& full_size_fit() {
  static const FullSizeFit fit;
  return fit;
}

}  // namespace

TEST_CASE("default learner ranks customers like the true effects") {
  const auto& [cat, gt, g, cate] = full_size_fit();
  for (int j = 0; j < 6; ++j) {
    const Eigen::VectorXd est = cate.values().col(j), truth = g.true_cate.values().col(j);
    CHECK(spearman(std::span<const double>(est.data(), static_cast<std::size_t>(est.size())),
                   std::span<const double>(truth.data(), static_cast<std::size_t>(truth.size()))) > 0.5);
  }
}

TEST_CASE("default learner recovers per-segment effect levels") {
  const auto& [cat, gt, g, cate] = full_size_fit();
  const auto levels = synthgen::default_effect_levels(cat);

  std::map<std::size_t, std::pair<Eigen::VectorXd, int>> by_segment;
  for (std::size_t i = 0; i < g.dataset.size(); ++i) {
    const auto s = synthgen::nearest_segment(gt.segments, g.dataset.rows[i].features);
    auto& [sum, n] = by_segment.try_emplace(s, Eigen::VectorXd::Zero(6), 0).first->second;
    sum += cate.values().row(static_cast<Eigen::Index>(i)).transpose();
    ++n;
  }
  for (const auto& [s, acc] : by_segment) {
    if (acc.second < 2000) continue;  // small tail segments are too noisy at this n
    for (int j = 0; j < 6; ++j) {
      CHECK(std::abs(acc.first(j) / acc.second - levels[s][static_cast<std::size_t>(j)]) < 0.1);
    }
  }
}

TEST_CASE("spearman with ties uses average ranks") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 6, 7, 8, 7};
  // Ranks of b: 1, 2, 3.5, 5, 3.5. Hand-computed Pearson of ranks = 0.8207826816681233.
  CHECK(spearman(a, b) == doctest::Approx(0.8207826816681233).epsilon(1e-12));
  const std::vector<double> c{3, 2, 1, 0, -1};
  CHECK(spearman(a, c) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), Error);
}

TEST_CASE("effects scale with the predictions") {
  const auto cat = CouponCatalog::standard();
  auto g = synthgen::generate(synthgen::default_model(cat), 1400, cat, 1.0 / 7.0, 12);
  auto scaled = g.dataset;
  for (auto& r : scaled.rows) r.outcome *= 3.0;
  const auto a = fit_slearner(g.dataset, cat, ridge(1e-3), 1).estimate_cate(g.dataset);
  const auto b = fit_slearner(scaled, cat, ridge(1e-3), 1).estimate_cate(scaled);
  CHECK(((b.values() - 3.0 * a.values()).cwiseAbs().maxCoeff()) < 1e-8);
}
