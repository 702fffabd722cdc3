#include "couponalloc/uplift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace couponalloc::uplift {

Eigen::MatrixXd augment(const ExperimentDataset& ds, std::size_t num_coupons,
                        std::span<const CouponId> arms) {
  const auto n = static_cast<Eigen::Index>(ds.size());
  const auto d = static_cast<Eigen::Index>(ds.feature_dim());
  const auto a = static_cast<Eigen::Index>(num_coupons + 1);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, d + a);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = ds.rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.features.size()) != d) {
      throw Error("ragged feature rows at row " + std::to_string(i));
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      x(i, k) = row.features[static_cast<std::size_t>(k)];
    }
    x(i, d + arms[static_cast<std::size_t>(i)]) = 1.0;
  }
  return x;
}

SLearner::SLearner(std::unique_ptr<BaseRegressor> base)
    : base_(std::move(base)) {
  if (!base_) throw Error("S-learner needs a base regressor");
}

void SLearner::fit(const ExperimentDataset& ds, const CouponCatalog& cat,
                   std::uint64_t seed) {
  require_valid(ds, cat);
  std::vector<std::size_t> per_arm(cat.size() + 1, 0);
  for (const auto& r : ds.rows) ++per_arm[static_cast<std::size_t>(r.arm)];
  for (std::size_t a = 0; a < per_arm.size(); ++a) {
    if (per_arm[a] == 0) {
      throw Error("S-learner: arm " + std::to_string(a) + " (" +
                  cat.label(static_cast<CouponId>(a)) + ") has no rows");
    }
  }
  num_coupons_ = cat.size();
  feature_dim_ = ds.feature_dim();
  std::vector<CouponId> arms(ds.size());
  Eigen::VectorXd y(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    arms[i] = ds.rows[i].arm;
    y(static_cast<Eigen::Index>(i)) = ds.rows[i].outcome;
  }
  base_->fit(augment(ds, num_coupons_, arms), y, seed);
  fitted_ = true;
}

Eigen::MatrixXd SLearner::design(const ExperimentDataset& ds,
                                 CouponId arm) const {
  if (!fitted_) throw Error("S-learner used before fit");
  if (ds.feature_dim() != feature_dim_ && !ds.rows.empty()) {
    throw Error("S-learner: feature dimension " +
                std::to_string(ds.feature_dim()) + " differs from training (" +
                std::to_string(feature_dim_) + ")");
  }
  if (arm < 0 || static_cast<std::size_t>(arm) > num_coupons_) {
    throw Error("S-learner: unknown arm " + std::to_string(arm));
  }
  const std::vector<CouponId> arms(ds.size(), arm);
  return augment(ds, num_coupons_, arms);
}

Eigen::VectorXd SLearner::predict_outcome(const ExperimentDataset& ds,
                                          CouponId arm) const {
  return base_->predict(design(ds, arm));
}

CateMatrix SLearner::estimate_cate(const ExperimentDataset& ds) const {
  const Eigen::VectorXd control = predict_outcome(ds, kControl);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(ds.size()),
                         static_cast<Eigen::Index>(num_coupons_));
  for (std::size_t j = 1; j <= num_coupons_; ++j) {
    values.col(static_cast<Eigen::Index>(j - 1)) =
        predict_outcome(ds, static_cast<CouponId>(j)) - control;
  }
  std::vector<CustomerId> ids;
  ids.reserve(ds.size());
  for (const auto& r : ds.rows) ids.push_back(r.customer_id);
  return CateMatrix(std::move(ids), std::move(values));
}

LearnerKind parse_learner(const std::string& name) {
  if (name == "gbt") return LearnerKind::kGbt;
  if (name == "ridge") return LearnerKind::kRidge;
  throw Error("unknown base learner '" + name + "' (expected gbt or ridge)");
}

SLearner fit_slearner(const ExperimentDataset& ds, const CouponCatalog& cat,
                      const LearnerOptions& options, std::uint64_t seed) {
  std::unique_ptr<BaseRegressor> base;
  if (options.kind == LearnerKind::kRidge) {
    base = std::make_unique<RidgeRegressor>(cat.size() + 1,
                                            options.ridge_penalty);
  } else {
    GbtParams params = options.gbt;
    if (options.tune) {
      std::vector<CouponId> arms;
      Eigen::VectorXd y(static_cast<Eigen::Index>(ds.size()));
      for (std::size_t i = 0; i < ds.size(); ++i) {
        arms.push_back(ds.rows[i].arm);
        y(static_cast<Eigen::Index>(i)) = ds.rows[i].outcome;
      }
      params = tune_gbt(augment(ds, cat.size(), arms), y, {2, 3, 4},
                        {50, 100, 200}, 5, Rng::derive(seed, "gbt-cv"),
                        params);
    }
    base = std::make_unique<GradientBoostedTrees>(params);
  }
  SLearner learner(std::move(base));
  learner.fit(ds, cat, seed);
  return learner;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t k = i;
    while (k + 1 < idx.size() && v[idx[k + 1]] == v[idx[i]]) ++k;
    const double r = 0.5 * static_cast<double>(i + k) + 1.0;
    for (std::size_t t = i; t <= k; ++t) ranks[idx[t]] = r;
    i = k + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error("spearman: need two equal-length samples of size >= 2");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace couponalloc::uplift
