// Command-line driver for the coupon allocation pipeline.
//
//   couponalloc run --config run.ini
//   couponalloc gen|fit|segment|cv|sweep --config run.ini
//   couponalloc allocate --model ro --alpha 0.5 --beta 0.8 --K 10
//   couponalloc evaluate --plan out/plan_ro.csv

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "couponalloc/allocation.hpp"
#include "couponalloc/csv.hpp"
#include "couponalloc/evaluation.hpp"
#include "couponalloc/io.hpp"
#include "couponalloc/pipeline.hpp"

namespace ca = couponalloc;
namespace pl = couponalloc::pipeline;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

struct Overrides {
  std::optional<std::size_t> customers;
  std::optional<double> noise;
  std::optional<std::size_t> clusters;
  std::optional<double> lambda, alpha, beta, lower, upper;
  std::optional<std::size_t> budgets;
  std::optional<double> budget_min, budget_max;
  std::optional<std::string> strategies;
  bool cv = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Run configuration file");
  app->add_option("--seed", c.seed, "Master random seed");
  app->add_option("--out", c.out, "Output directory");
}

pl::RunConfig resolve(const Common& c, const Overrides& o) {
  pl::RunConfig cfg = c.config.empty() ? pl::RunConfig{} : pl::RunConfig::load(c.config);
  if (const char* env = std::getenv("COUPONALLOC_OUT"); env && *env) cfg.out = env;
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.out = *c.out;
  if (o.customers) cfg.customers = *o.customers;
  if (o.noise) cfg.noise = *o.noise;
  if (o.clusters) cfg.clusters = *o.clusters;
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.alpha) cfg.alpha = *o.alpha;
  if (o.beta) cfg.beta = *o.beta;
  if (o.lower.has_value() != o.upper.has_value()) {
    throw pl::ConfigError("--lower and --upper go together");
  }
  if (o.lower) cfg.bounds = ca::ProportionBounds{*o.lower, *o.upper};
  if (o.budgets) cfg.budget_points = *o.budgets;
  if (o.budget_min) cfg.budget_min = *o.budget_min;
  if (o.budget_max) cfg.budget_max = *o.budget_max;
  if (o.strategies) {
    cfg.strategies.clear();
    std::string item;
    for (char ch : *o.strategies + ",") {
      if (ch == ',') {
        if (!item.empty()) cfg.strategies.push_back(item);
        item.clear();
      } else if (ch != ' ') {
        item += ch;
      }
    }
  }
  if (o.cv) cfg.cv = true;
  cfg.validate();
  return cfg;
}

void print_summary(const pl::RunConfig& cfg) {
  const auto path = cfg.out / "report.csv";
  if (!fs::exists(path)) return;
  std::cout << ca::io::read_text(path);
}

int cmd_allocate(const pl::RunConfig& cfg, const std::string& model,
                 std::optional<std::size_t> k_flag, double budget_fraction) {
  const auto cat = ca::io::load_catalog(cfg.out / "catalog.csv");
  const auto test = ca::io::load_dataset(cfg.out / "test.csv", pl::resolve_probability(cfg, cat));
  const auto pihat = ca::io::load_cate(cfg.out / "cate.csv", "pihat");
  const auto stats = ca::io::load_stats(cfg.out / "stats");
  if (k_flag && *k_flag != stats.num_clusters()) {
    throw pl::ConfigError("--K " + std::to_string(*k_flag) + " does not match the " +
                          std::to_string(stats.num_clusters()) +
                          " clusters in " + (cfg.out / "stats").string() +
                          " (rerun segment with --K)");
  }
  const double budget = budget_fraction * static_cast<double>(test.size()) * cat.mean_cost();
  const ca::BudgetConfig bc{budget, cfg.bounds};
  const std::uint64_t seed = pl::stage_seed(cfg, "allocate");
  ca::AllocationPlan plan;
  const auto kind = ca::evaluation::parse_strategy(model);
  if (kind == ca::evaluation::StrategyKind::kMvo || kind == ca::evaluation::StrategyKind::kRo) {
    const auto w = kind == ca::evaluation::StrategyKind::kMvo
                       ? ca::allocation::solve_mvo(stats, cat, bc, cfg.lambda)
                       : ca::allocation::solve_ro(stats, cat, bc, cfg.alpha,
                                                  cfg.beta * static_cast<double>(
                                                                 stats.num_clusters() * cat.size()));
    const auto path = cfg.out / ("allocation_" + model + ".csv");
    ca::io::save_allocation(w, path);
    plan = ca::allocation::realize(w, stats, cat, seed);
    std::cerr << model << ": objective = " << ca::csv::format_double(w.objective)
              << ", budget = " << ca::csv::format_double(budget) << ", allocation -> "
              << path.string() << "\n";
  } else if (kind == ca::evaluation::StrategyKind::kMck) {
    const auto r = ca::allocation::solve_mck_greedy(pihat, cat, budget, cfg.bounds);
    plan = r.plan;
    std::cerr << "mck: objective = " << ca::csv::format_double(r.objective) << "\n";
  } else {
    plan = ca::allocation::random_allocate(pihat.customer_ids(), cat, budget, seed);
  }
  const auto plan_path = cfg.out / ("plan_" + model + ".csv");
  ca::io::save_plan(plan, plan_path);
  std::cerr << model << ": " << plan.size() << " coupons, cost "
            << ca::csv::format_double(plan.consumed_cost) << " -> " << plan_path.string() << "\n";
  return 0;
}

int cmd_evaluate(const pl::RunConfig& cfg, const std::string& plan_path) {
  const auto cat = ca::io::load_catalog(cfg.out / "catalog.csv");
  const auto test = ca::io::load_dataset(cfg.out / "test.csv", pl::resolve_probability(cfg, cat));
  const auto plan = ca::io::load_plan(plan_path, cat);
  const auto u = ca::evaluation::uplift_gmv(plan, test, test.arm_probability);
  std::cout << "customers," << plan.size() << "\n"
            << "consumed_cost," << ca::csv::format_double(plan.consumed_cost) << "\n"
            << "uplift_gmv," << ca::csv::format_double(u.total) << "\n";
  if (fs::exists(cfg.out / "truth.csv")) {
    const auto truth = ca::io::load_cate(cfg.out / "truth.csv", "tau");
    std::cout << "true_effect,"
              << ca::csv::format_double(ca::allocation::plan_effect(plan, truth)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained coupon allocation: uplift estimation, segmentation, "
               "MCK / mean-variance / robust allocation and offline evaluation"};
  app.require_subcommand(1);
  Common common;
  Overrides ov;
  std::string model = "ro";
  std::optional<std::size_t> k_flag;
  double budget_fraction = 1.0;
  std::string plan_path;

  auto* gen = app.add_subcommand("gen", "Generate (or import) experiment data");
  auto* fit = app.add_subcommand("fit", "Split data and estimate per-customer coupon effects");
  auto* seg = app.add_subcommand("segment", "Cluster customers and compute cluster statistics");
  auto* cv = app.add_subcommand("cv", "Cross-validate MVO and RO hyperparameters");
  auto* sweep = app.add_subcommand("sweep", "Run every strategy over the budget grid");
  auto* alloc = app.add_subcommand("allocate", "Solve one allocation model at one budget");
  auto* eval = app.add_subcommand("evaluate", "Score a customer-level plan");
  auto* run = app.add_subcommand("run", "Run the full pipeline");
  for (auto* sc : {gen, fit, seg, cv, sweep, alloc, eval, run}) add_common(sc, common);

  for (auto* sc : {gen, run}) {
    sc->add_option("--customers", ov.customers, "Synthetic population size");
    sc->add_option("--noise", ov.noise, "Outcome noise scale");
  }
  for (auto* sc : {seg, cv, run}) sc->add_option("--K", ov.clusters, "Number of clusters");
  for (auto* sc : {sweep, alloc, run, cv}) {
    sc->add_option("--lambda", ov.lambda, "MVO risk aversion");
    sc->add_option("--alpha", ov.alpha, "RO interval scale");
    sc->add_option("--beta", ov.beta, "RO cardinality fraction (Gamma = beta |K x J|)");
    sc->add_option("--lower", ov.lower, "Lower coupon proportion bound");
    sc->add_option("--upper", ov.upper, "Upper coupon proportion bound");
  }
  for (auto* sc : {sweep, run}) {
    sc->add_option("--budgets", ov.budgets, "Number of budget points");
    sc->add_option("--min", ov.budget_min, "Smallest budget, fraction of |I| x mean cost");
    sc->add_option("--max", ov.budget_max, "Largest budget, fraction of |I| x mean cost");
    sc->add_option("--strategies", ov.strategies, "Comma-separated subset of random,mck,mvo,ro");
  }
  run->add_flag("--cv", ov.cv, "Select hyperparameters by cross-validation first");
  alloc->add_option("--model", model, "random, mck, mvo or ro")
      ->check(CLI::IsMember({"random", "mck", "mvo", "ro"}));
  alloc->add_option("--K", k_flag, "Expected number of clusters");
  alloc->add_option("--budget", budget_fraction, "Budget as a fraction of |I| x mean cost");
  eval->add_option("--plan", plan_path, "Plan CSV (customer_id,coupon_id)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto cfg = resolve(common, ov);
    if (*gen) {
      pl::stage_gen(cfg);
    } else if (*fit) {
      pl::stage_fit(cfg);
    } else if (*seg) {
      pl::stage_segment(cfg);
    } else if (*cv) {
      const auto best = pl::stage_cv(cfg);
      std::cout << "lambda," << ca::csv::format_double(best.lambda) << "\nalpha,"
                << ca::csv::format_double(best.alpha) << "\nbeta,"
                << ca::csv::format_double(best.beta) << "\n";
    } else if (*sweep) {
      pl::stage_sweep(cfg, cfg.uncertainty());
      print_summary(cfg);
    } else if (*alloc) {
      return cmd_allocate(cfg, model, k_flag, budget_fraction);
    } else if (*eval) {
      return cmd_evaluate(cfg, plan_path);
    } else if (*run) {
      pl::run_pipeline(cfg);
      print_summary(cfg);
    }
  } catch (const pl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
