#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace couponalloc {

/// Fit/predict capability used as the base learner of the S-learner.
class BaseRegressor {
 public:
  virtual ~BaseRegressor() = default;

  virtual void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   std::uint64_t seed) = 0;
  virtual Eigen::VectorXd predict(const Eigen::MatrixXd& x) const = 0;
  virtual bool fitted() const = 0;
  virtual std::unique_ptr<BaseRegressor> clone_unfitted() const = 0;
  virtual std::string name() const = 0;
};

/// Ridge regression on [1, features, arm one-hot, features x arm one-hot].
/// The last `arm_columns` input columns are taken as the arm encoding.
class RidgeRegressor final : public BaseRegressor {
 public:
  explicit RidgeRegressor(std::size_t arm_columns, double penalty = 1e-3);

  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
           std::uint64_t seed) override;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const override;
  bool fitted() const override { return coef_.size() > 0; }
  std::unique_ptr<BaseRegressor> clone_unfitted() const override;
  std::string name() const override { return "ridge"; }

 private:
  Eigen::MatrixXd expand(const Eigen::MatrixXd& x) const;

  std::size_t arm_columns_;
  double penalty_;
  Eigen::VectorXd coef_;
};

struct GbtParams {
  int max_depth = 4;
  int n_trees = 200;
  double learning_rate = 0.1;
  int min_samples_leaf = 20;
  int max_bins = 64;
};

/// Gradient-boosted regression trees with squared loss. Split candidates are
/// quantile bin edges computed once per fit.
class GradientBoostedTrees final : public BaseRegressor {
 public:
  explicit GradientBoostedTrees(GbtParams params = {});

  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
           std::uint64_t seed) override;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const override;
  /// Predictions after the first `stages[s]` trees, one column per stage.
  Eigen::MatrixXd predict_staged(const Eigen::MatrixXd& x,
                                 const std::vector<int>& stages) const;
  bool fitted() const override { return is_fitted_; }
  std::unique_ptr<BaseRegressor> clone_unfitted() const override;
  std::string name() const override { return "gbt"; }

  const GbtParams& params() const { return params_; }
  std::size_t num_trees() const { return trees_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  double predict_tree(const Tree& tree, const double* row,
                      Eigen::Index stride) const;

  GbtParams params_;
  double base_score_ = 0.0;
  std::vector<Tree> trees_;
  bool is_fitted_ = false;
};

/// Chooses depth and tree count by k-fold CV on squared error. Tree counts
/// are evaluated from staged predictions of one fit per depth and fold.
GbtParams tune_gbt(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const std::vector<int>& depths,
                   const std::vector<int>& tree_counts, int folds,
                   std::uint64_t seed, GbtParams base = {});

}  // namespace couponalloc
