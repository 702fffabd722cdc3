#include "couponalloc/synthgen.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace couponalloc::synthgen {

namespace {

constexpr std::size_t kDefaultDim = 6;
constexpr double kCenterOffset = 4.0;

// Mixing weights are skewed: a few large segments with low uplift and a tail
// of small segments with high uplift.
constexpr double kWeights[10] = {0.30, 0.22, 0.14, 0.10, 0.08,
                                 0.06, 0.04, 0.03, 0.02, 0.01};

// Levels for the standard catalog, columns in catalog order
// (5% disc, 5% cb, 10% disc, 10% cb, 15% disc, 300 yen).
constexpr double kStandardLevels[10][6] = {
    {0.30, 0.10, 0.90, 0.85, 1.00, 0.80},
    {0.60, 0.20, 0.70, 0.75, 0.80, 0.65},
    {0.40, 0.15, 1.30, 1.20, 1.40, 1.10},
    {0.90, 0.40, 1.10, 1.00, 1.20, 1.00},
    {0.20, 0.05, 0.50, 0.60, 0.70, 0.40},
    {1.10, 0.50, 1.80, 1.70, 2.00, 1.60},
    {0.10, -0.20, 0.60, 0.60, 0.65, 0.55},
    {1.20, 0.70, 2.20, 2.10, 2.60, 2.00},
    {0.70, 0.30, 1.40, 1.50, 1.50, 1.40},
    {1.50, 1.00, 2.60, 2.60, 2.90, 2.50},
};

constexpr double kSegmentScale[10] = {0.9, 0.7, 1.3, 1.0, 0.5,
                                      1.8, 0.6, 2.2, 1.4, 2.6};

bool is_standard(const CouponCatalog& cat) {
  const auto std_cat = CouponCatalog::standard();
  if (cat.size() != std_cat.size()) return false;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    if (cat.coupons()[i].unit_cost != std_cat.coupons()[i].unit_cost) {
      return false;
    }
  }
  return true;
}

std::vector<LatentSegment> default_segments() {
  std::vector<LatentSegment> segs;
  for (std::size_t s = 0; s < 10; ++s) {
    LatentSegment seg;
    seg.center.assign(kDefaultDim, 0.0);
    const std::size_t axis = s % kDefaultDim;
    seg.center[axis] = s < kDefaultDim ? kCenterOffset : -kCenterOffset;
    seg.spread = 1.0;
    seg.weight = kWeights[s];
    segs.push_back(std::move(seg));
  }
  return segs;
}

double default_baseline(std::span<const double> x) {
  return 10.0 + 1.5 * std::tanh(x[0]) + std::tanh(x[1]);
}

}  // namespace

void GroundTruthModel::validate(std::size_t num_coupons) const {
  if (!baseline) throw Error("ground truth model has no baseline");
  if (effects.size() != num_coupons) {
    throw Error("ground truth model defines " + std::to_string(effects.size()) +
                " effects for " + std::to_string(num_coupons) + " coupons");
  }
  for (const auto& f : effects) {
    if (!f) throw Error("ground truth model has an empty effect function");
  }
  if (!(noise_scale >= 0.0)) throw Error("noise scale must be nonnegative");
  if (feature_dim == 0) throw Error("feature dimension must be positive");
  if (segments.empty()) throw Error("ground truth model has no segments");
  double total = 0.0;
  for (const auto& s : segments) {
    if (s.center.size() != feature_dim) {
      throw Error("segment center dimension does not match feature_dim");
    }
    if (!(s.weight >= 0.0)) throw Error("segment weights must be nonnegative");
    total += s.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error("segment weights must sum to 1");
  }
}

std::size_t nearest_segment(const std::vector<LatentSegment>& segments,
                            std::span<const double> x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < segments.size(); ++s) {
    double d = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double diff = x[k] - segments[s].center[k];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = s;
    }
  }
  return best;
}

std::vector<std::vector<double>> default_effect_levels(
    const CouponCatalog& cat) {
  std::vector<std::vector<double>> levels(10,
                                          std::vector<double>(cat.size()));
  const bool standard = is_standard(cat);
  for (std::size_t s = 0; s < 10; ++s) {
    for (std::size_t j = 0; j < cat.size(); ++j) {
      levels[s][j] =
          standard ? kStandardLevels[s][j]
                   : kSegmentScale[s] *
                         std::sqrt(cat.coupons()[j].unit_cost / 10.0);
    }
  }
  return levels;
}

GroundTruthModel default_model(const CouponCatalog& cat, double noise_scale) {
  GroundTruthModel gt;
  gt.feature_dim = kDefaultDim;
  gt.noise_scale = noise_scale;
  gt.segments = default_segments();
  gt.baseline = default_baseline;
  const auto levels = default_effect_levels(cat);
  for (std::size_t j = 0; j < cat.size(); ++j) {
    std::vector<double> col(levels.size());
    for (std::size_t s = 0; s < levels.size(); ++s) col[s] = levels[s][j];
    gt.effects.push_back(
        [segs = gt.segments, col = std::move(col)](std::span<const double> x) {
          return col[nearest_segment(segs, x)];
        });
  }
  return gt;
}

GroundTruthModel zero_effect_model(const CouponCatalog& cat,
                                   double noise_scale) {
  GroundTruthModel gt = default_model(cat, noise_scale);
  for (auto& f : gt.effects) f = [](std::span<const double>) { return 0.0; };
  return gt;
}

Generated generate(const GroundTruthModel& gt, std::size_t n_customers,
                   const CouponCatalog& cat, double p, std::uint64_t seed) {
  gt.validate(cat.size());
  if (n_customers == 0) throw Error("n_customers must be at least 1");
  const double treated_mass = p * static_cast<double>(cat.size());
  if (!(p > 0.0 && p < 1.0) || treated_mass > 1.0 + 1e-12) {
    throw Error("infeasible arm probability p = " + std::to_string(p) +
                " for " + std::to_string(cat.size()) + " coupons");
  }

  std::vector<double> cum_weight;
  double acc = 0.0;
  for (const auto& s : gt.segments) cum_weight.push_back(acc += s.weight);

  Rng rng(seed);
  const std::size_t d = gt.feature_dim;
  const auto num_coupons = static_cast<CouponId>(cat.size());
  Generated out;
  out.dataset.arm_probability = p;
  out.dataset.rows.reserve(n_customers);
  Eigen::MatrixXd tau(static_cast<Eigen::Index>(n_customers),
                      static_cast<Eigen::Index>(cat.size()));
  std::vector<CustomerId> ids(n_customers);

  for (std::size_t i = 0; i < n_customers; ++i) {
    const double u_seg = rng.uniform() * acc;
    std::size_t s = 0;
    while (s + 1 < cum_weight.size() && u_seg >= cum_weight[s]) ++s;
    const LatentSegment& seg = gt.segments[s];

    ExperimentRow row;
    row.customer_id = static_cast<CustomerId>(i + 1);
    row.features.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      row.features[k] = seg.center[k] + seg.spread * rng.normal();
    }
    const double u_arm = rng.uniform();
    row.arm = kControl;
    if (u_arm < treated_mass) {
      row.arm = std::min(num_coupons, static_cast<CouponId>(u_arm / p) + 1);
    }
    const double noise = rng.normal();
    const std::span<const double> x(row.features);
    for (CouponId j = 1; j <= num_coupons; ++j) {
      tau(static_cast<Eigen::Index>(i), j - 1) = gt.effect(j, x);
    }
    row.outcome = gt.baseline(x) + gt.effect(row.arm, x) +
                  gt.noise_scale * noise;
    ids[i] = row.customer_id;
    out.dataset.rows.push_back(std::move(row));
  }
  out.true_cate = CateMatrix(std::move(ids), std::move(tau));
  return out;
}

double true_ate(const GroundTruthModel& gt, const ExperimentDataset& ds,
                CouponId j) {
  if (j < 1 || static_cast<std::size_t>(j) > gt.effects.size()) {
    throw Error("true_ate: unknown coupon id " + std::to_string(j));
  }
  if (ds.rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : ds.rows) s += gt.effect(j, r.features);
  return s / static_cast<double>(ds.rows.size());
}

}  // namespace couponalloc::synthgen
