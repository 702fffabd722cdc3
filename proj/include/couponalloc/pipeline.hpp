#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "couponalloc/allocation.hpp"
#include "couponalloc/core.hpp"
#include "couponalloc/evaluation.hpp"
#include "couponalloc/segmentation.hpp"
#include "couponalloc/synthgen.hpp"
#include "couponalloc/uplift.hpp"

namespace couponalloc::pipeline {

namespace fs = std::filesystem;

/// Bad or missing configuration (exit status 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure inside a named stage (exit status 3).
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunConfig {
  std::uint64_t seed = 20240601;

  // [data]
  std::size_t customers = 70000;
  double noise = 1.0;
  std::optional<double> arm_probability;
  std::optional<fs::path> dataset;
  std::optional<fs::path> truth;
  std::optional<fs::path> catalog;
  double test_fraction = 0.2;

  // [learner]
  uplift::LearnerOptions learner;

  // [segment]
  std::size_t clusters = 10;
  int bootstrap = 200;
  segmentation::GmmOptions gmm;

  // [allocate]
  std::vector<std::string> strategies{"random", "mck", "mvo", "ro"};
  double lambda = 0.0;
  double alpha = 0.5;
  double beta = 0.8;
  std::optional<ProportionBounds> bounds;

  // [sweep]
  std::size_t budget_points = 11;
  double budget_min = 0.4;
  double budget_max = 1.6;

  // [cv]
  bool cv = false;
  int cv_folds = 5;
  std::vector<double> lambda_grid{0.0,   0.001, 0.002, 0.003, 0.004, 0.005,
                                  0.006, 0.007, 0.008, 0.009, 0.010};
  std::vector<double> alpha_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> beta_grid{0.0, 0.2, 0.4, 0.6, 0.8};

  // [report]
  int auuc_bootstrap = 100;
  bool hyper_sweep = true;

  // [output]
  fs::path out = "out";

  /// Parses the sectioned key = value format; throws ConfigError.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const fs::path& path);
  /// Canonical text form; parse(to_text()) reproduces the config.
  std::string to_text() const;
  void validate() const;

  std::vector<double> budget_fractions() const;
  allocation::UncertaintyConfig uncertainty() const { return {alpha, beta, lambda}; }
};

/// FNV-1a 64-bit digest as 16 hex digits.
std::string digest(const std::string& bytes);

/// Stage seeds. Every stage draws from its own stream so that stages run
/// separately reproduce the full pipeline.
std::uint64_t stage_seed(const RunConfig& cfg, const std::string& stage);

CouponCatalog resolve_catalog(const RunConfig& cfg);
double resolve_probability(const RunConfig& cfg, const CouponCatalog& cat);

// Individual stages. Each reads and writes files in cfg.out.
/// catalog.csv, dataset.csv and truth.csv (synthetic) or copies of the inputs.
void stage_gen(const RunConfig& cfg);
/// train.csv, test.csv and cate.csv (test customers).
void stage_fit(const RunConfig& cfg);
/// stats/{clusters,means,stderrs,cov}.csv and table2.txt.
void stage_segment(const RunConfig& cfg);
/// cv.csv; returns the selected (lambda, alpha, beta).
allocation::UncertaintyConfig stage_cv(const RunConfig& cfg);
/// report.csv, proportions.csv, oracle.csv, sweep_errors.csv, curves.csv,
/// auuc.csv, hyper.csv and figures.
void stage_sweep(const RunConfig& cfg, const allocation::UncertaintyConfig& params);

/// All stages in order plus manifest.json.
void run_pipeline(const RunConfig& cfg);

}  // namespace couponalloc::pipeline
