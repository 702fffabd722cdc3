#include "couponalloc/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "couponalloc/core.hpp"

namespace couponalloc {

RidgeRegressor::RidgeRegressor(std::size_t arm_columns, double penalty)
    : arm_columns_(arm_columns), penalty_(penalty) {
  if (!(penalty >= 0.0)) throw Error("ridge penalty must be nonnegative");
}

Eigen::MatrixXd RidgeRegressor::expand(const Eigen::MatrixXd& x) const {
  const Eigen::Index arms = static_cast<Eigen::Index>(arm_columns_);
  if (x.cols() < arms) throw Error("ridge: input has fewer columns than arms");
  const Eigen::Index d = x.cols() - arms;
  Eigen::MatrixXd z(x.rows(), 1 + d + arms + d * arms);
  z.col(0).setOnes();
  z.middleCols(1, d) = x.leftCols(d);
  z.middleCols(1 + d, arms) = x.rightCols(arms);
  for (Eigen::Index a = 0; a < arms; ++a) {
    for (Eigen::Index k = 0; k < d; ++k) {
      z.col(1 + d + arms + a * d + k) =
          x.col(k).cwiseProduct(x.col(d + a));
    }
  }
  return z;
}

void RidgeRegressor::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         std::uint64_t /*seed*/) {
  if (x.rows() != y.size() || x.rows() == 0) {
    throw Error("ridge: inconsistent or empty training data");
  }
  const Eigen::MatrixXd z = expand(x);
  Eigen::MatrixXd gram = z.transpose() * z;
  // The intercept is not penalized.
  for (Eigen::Index i = 1; i < gram.rows(); ++i) gram(i, i) += penalty_;
  gram(0, 0) += 1e-12;
  coef_ = gram.ldlt().solve(z.transpose() * y);
  if (!coef_.allFinite()) throw Error("ridge: normal equations are singular");
}

Eigen::VectorXd RidgeRegressor::predict(const Eigen::MatrixXd& x) const {
  if (!fitted()) throw Error("ridge: predict called before fit");
  return expand(x) * coef_;
}

std::unique_ptr<BaseRegressor> RidgeRegressor::clone_unfitted() const {
  return std::make_unique<RidgeRegressor>(arm_columns_, penalty_);
}

GradientBoostedTrees::GradientBoostedTrees(GbtParams params)
    : params_(params) {
  if (params_.max_depth < 1 || params_.max_depth > 8) {
    throw Error("gbt: max_depth must be in [1, 8]");
  }
  if (params_.n_trees < 1) throw Error("gbt: n_trees must be positive");
  if (!(params_.learning_rate > 0.0 && params_.learning_rate <= 1.0)) {
    throw Error("gbt: learning_rate must be in (0, 1]");
  }
  if (params_.max_bins < 2 || params_.max_bins > 256) {
    throw Error("gbt: max_bins must be in [2, 256]");
  }
  params_.min_samples_leaf = std::max(1, params_.min_samples_leaf);
}

namespace {

// Split thresholds for one column: a value goes left of edge e iff x <= e.
std::vector<double> bin_edges(const Eigen::VectorXd& col, int max_bins) {
  std::vector<double> v(col.data(), col.data() + col.size());
  std::sort(v.begin(), v.end());
  std::vector<double> uniq;
  for (double a : v) {
    if (uniq.empty() || a != uniq.back()) uniq.push_back(a);
  }
  std::vector<double> edges;
  if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
      edges.push_back(0.5 * (uniq[i] + uniq[i + 1]));
    }
    return edges;
  }
  const std::size_t n = v.size();
  for (int q = 1; q < max_bins; ++q) {
    const double e = v[(static_cast<std::size_t>(q) * n) /
                       static_cast<std::size_t>(max_bins)];
    if (e < uniq.back() && (edges.empty() || e > edges.back())) {
      edges.push_back(e);
    }
  }
  return edges;
}

}  // namespace

void GradientBoostedTrees::fit(const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& y,
                               std::uint64_t /*seed*/) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n != y.size() || n == 0) {
    throw Error("gbt: inconsistent or empty training data");
  }
  trees_.clear();

  std::vector<std::vector<double>> edges(static_cast<std::size_t>(p));
  std::vector<std::uint8_t> bins(static_cast<std::size_t>(n * p));
  for (Eigen::Index f = 0; f < p; ++f) {
    auto& e = edges[static_cast<std::size_t>(f)];
    e = bin_edges(x.col(f), params_.max_bins);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto it = std::lower_bound(e.begin(), e.end(), x(i, f));
      bins[static_cast<std::size_t>(f * n + i)] =
          static_cast<std::uint8_t>(it - e.begin());
    }
  }

  base_score_ = y.mean();
  Eigen::VectorXd residual = y.array() - base_score_;
  const std::size_t nbins = static_cast<std::size_t>(params_.max_bins);
  std::vector<int> node_of(static_cast<std::size_t>(n));
  std::vector<double> hist_sum;
  std::vector<std::int64_t> hist_cnt;
  constexpr double kMinGain = 1e-12;

  for (int t = 0; t < params_.n_trees; ++t) {
    Tree tree(1);
    std::fill(node_of.begin(), node_of.end(), 0);
    // Tree nodes that may still split, in creation order.
    std::vector<int> active = {0};
    for (int depth = 0; depth < params_.max_depth && !active.empty();
         ++depth) {
      std::vector<int> slot(tree.size(), -1);
      for (std::size_t a = 0; a < active.size(); ++a) {
        slot[static_cast<std::size_t>(active[a])] = static_cast<int>(a);
      }
      const std::size_t stride = static_cast<std::size_t>(p) * nbins;
      hist_sum.assign(active.size() * stride, 0.0);
      hist_cnt.assign(active.size() * stride, 0);
      std::vector<double> node_sum(active.size(), 0.0);
      std::vector<std::int64_t> node_cnt(active.size(), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        const int s = slot[static_cast<std::size_t>(
            node_of[static_cast<std::size_t>(i)])];
        if (s < 0) continue;
        const double r = residual(i);
        node_sum[static_cast<std::size_t>(s)] += r;
        ++node_cnt[static_cast<std::size_t>(s)];
        const std::size_t base = static_cast<std::size_t>(s) * stride;
        for (Eigen::Index f = 0; f < p; ++f) {
          const std::size_t idx =
              base + static_cast<std::size_t>(f) * nbins +
              bins[static_cast<std::size_t>(f * n + i)];
          hist_sum[idx] += r;
          ++hist_cnt[idx];
        }
      }

      std::vector<int> next_active;
      std::vector<int> split_feature(active.size(), -1);
      std::vector<int> split_bin(active.size(), -1);
      for (std::size_t a = 0; a < active.size(); ++a) {
        const double total = node_sum[a];
        const std::int64_t cnt = node_cnt[a];
        if (cnt < 2 * params_.min_samples_leaf) continue;
        const double parent = total * total / static_cast<double>(cnt);
        double best_gain = kMinGain;
        for (Eigen::Index f = 0; f < p; ++f) {
          const std::size_t nb = edges[static_cast<std::size_t>(f)].size();
          const std::size_t base =
              a * stride + static_cast<std::size_t>(f) * nbins;
          double left_sum = 0.0;
          std::int64_t left_cnt = 0;
          for (std::size_t b = 0; b < nb; ++b) {
            left_sum += hist_sum[base + b];
            left_cnt += hist_cnt[base + b];
            const std::int64_t right_cnt = cnt - left_cnt;
            if (left_cnt < params_.min_samples_leaf) continue;
            if (right_cnt < params_.min_samples_leaf) break;
            const double right_sum = total - left_sum;
            const double gain =
                left_sum * left_sum / static_cast<double>(left_cnt) +
                right_sum * right_sum / static_cast<double>(right_cnt) -
                parent;
            if (gain > best_gain) {
              best_gain = gain;
              split_feature[a] = static_cast<int>(f);
              split_bin[a] = static_cast<int>(b);
            }
          }
        }
      }
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (split_feature[a] < 0) continue;
        const int id = active[a];
        const int left = static_cast<int>(tree.size());
        tree.push_back({});
        tree.push_back({});
        Node& node = tree[static_cast<std::size_t>(id)];
        node.feature = split_feature[a];
        node.threshold = edges[static_cast<std::size_t>(split_feature[a])]
                              [static_cast<std::size_t>(split_bin[a])];
        node.left = left;
        node.right = left + 1;
        next_active.push_back(left);
        next_active.push_back(left + 1);
      }
      if (next_active.empty()) break;
      for (Eigen::Index i = 0; i < n; ++i) {
        int& nd = node_of[static_cast<std::size_t>(i)];
        const Node& node = tree[static_cast<std::size_t>(nd)];
        if (node.feature < 0) continue;
        const auto b = bins[static_cast<std::size_t>(node.feature * n + i)];
        const int sb = split_bin[static_cast<std::size_t>(
            slot[static_cast<std::size_t>(nd)])];
        nd = b <= sb ? node.left : node.right;
      }
      active = std::move(next_active);
    }

    // Leaf values: shrunken mean residual.
    std::vector<double> leaf_sum(tree.size(), 0.0);
    std::vector<std::int64_t> leaf_cnt(tree.size(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto nd = static_cast<std::size_t>(node_of[static_cast<std::size_t>(i)]);
      leaf_sum[nd] += residual(i);
      ++leaf_cnt[nd];
    }
    for (std::size_t k = 0; k < tree.size(); ++k) {
      if (tree[k].feature < 0 && leaf_cnt[k] > 0) {
        tree[k].value = params_.learning_rate * leaf_sum[k] /
                        static_cast<double>(leaf_cnt[k]);
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      residual(i) -=
          tree[static_cast<std::size_t>(node_of[static_cast<std::size_t>(i)])]
              .value;
    }
    trees_.push_back(std::move(tree));
  }
  is_fitted_ = true;
}

double GradientBoostedTrees::predict_tree(const Tree& tree, const double* row,
                                          Eigen::Index stride) const {
  std::size_t nd = 0;
  while (tree[nd].feature >= 0) {
    const double v = row[tree[nd].feature * stride];
    nd = static_cast<std::size_t>(v <= tree[nd].threshold ? tree[nd].left
                                                          : tree[nd].right);
  }
  return tree[nd].value;
}

Eigen::VectorXd GradientBoostedTrees::predict(const Eigen::MatrixXd& x) const {
  return predict_staged(x, {static_cast<int>(trees_.size())}).col(0);
}

Eigen::MatrixXd GradientBoostedTrees::predict_staged(
    const Eigen::MatrixXd& x, const std::vector<int>& stages) const {
  if (!is_fitted_) throw Error("gbt: predict called before fit");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    if (stages[s] < 0 || stages[s] > static_cast<int>(trees_.size()) ||
        (s > 0 && stages[s] < stages[s - 1])) {
      throw Error("gbt: stages must be ascending and within the tree count");
    }
  }
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(stages.size()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double* row = x.data() + i;
    double acc = base_score_;
    std::size_t t = 0;
    for (std::size_t s = 0; s < stages.size(); ++s) {
      for (; t < static_cast<std::size_t>(stages[s]); ++t) {
        acc += predict_tree(trees_[t], row, x.rows());
      }
      out(i, static_cast<Eigen::Index>(s)) = acc;
    }
  }
  return out;
}

std::unique_ptr<BaseRegressor> GradientBoostedTrees::clone_unfitted() const {
  return std::make_unique<GradientBoostedTrees>(params_);
}

GbtParams tune_gbt(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const std::vector<int>& depths,
                   const std::vector<int>& tree_counts, int folds,
                   std::uint64_t seed, GbtParams base) {
  if (depths.empty() || tree_counts.empty()) {
    throw Error("tune_gbt: empty hyperparameter grid");
  }
  if (folds < 2 || x.rows() < folds) {
    throw Error("tune_gbt: need at least 2 folds and one row per fold");
  }
  std::vector<int> counts = tree_counts;
  std::sort(counts.begin(), counts.end());
  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  Eigen::MatrixXd sse = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(depths.size()),
      static_cast<Eigen::Index>(counts.size()));
  for (int fold = 0; fold < folds; ++fold) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t r = 0; r < order.size(); ++r) {
      (static_cast<int>(r % static_cast<std::size_t>(folds)) == fold ? test
                                                                      : train)
          .push_back(order[r]);
    }
    const Eigen::MatrixXd xtr = x(train, Eigen::all);
    const Eigen::VectorXd ytr = y(train);
    const Eigen::MatrixXd xte = x(test, Eigen::all);
    const Eigen::VectorXd yte = y(test);
    for (std::size_t d = 0; d < depths.size(); ++d) {
      GbtParams p = base;
      p.max_depth = depths[d];
      p.n_trees = counts.back();
      GradientBoostedTrees model(p);
      model.fit(xtr, ytr, seed);
      const Eigen::MatrixXd staged = model.predict_staged(xte, counts);
      for (Eigen::Index c = 0; c < staged.cols(); ++c) {
        sse(static_cast<Eigen::Index>(d), c) +=
            (staged.col(c) - yte).squaredNorm();
      }
    }
  }
  Eigen::Index bd = 0, bc = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index d = 0; d < sse.rows(); ++d) {
    for (Eigen::Index c = 0; c < sse.cols(); ++c) {
      if (sse(d, c) < best) {
        best = sse(d, c);
        bd = d;
        bc = c;
      }
    }
  }
  GbtParams out = base;
  out.max_depth = depths[static_cast<std::size_t>(bd)];
  out.n_trees = counts[static_cast<std::size_t>(bc)];
  return out;
}

}  // namespace couponalloc
