#include "couponalloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "couponalloc/csv.hpp"

namespace couponalloc::evaluation {

namespace {

std::unordered_map<CustomerId, std::size_t> row_index(const ExperimentDataset& ds) {
  std::unordered_map<CustomerId, std::size_t> idx;
  idx.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) idx[ds.rows[i].customer_id] = i;
  return idx;
}

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("treatment probability must lie in (0, 1)");
}

}  // namespace

UpliftGmv uplift_gmv(const AllocationPlan& plan, const ExperimentDataset& ds,
                     double p) {
  check_probability(p);
  const auto idx = row_index(ds);
  UpliftGmv out;
  out.terms.reserve(plan.size());
  for (const auto& [id, j] : plan.assignments) {
    const auto it = idx.find(id);
    if (it == idx.end()) {
      throw Error("plan assigns customer " + std::to_string(id) +
                  " who is not in the evaluation data");
    }
    const auto& row = ds.rows[it->second];
    const double term = transformed_outcome(row.arm == j, p, row.outcome);
    out.terms.emplace_back(id, term);
    out.total += term;
  }
  return out;
}

double ipw_contrast_term(const ExperimentRow& row, CouponId j, double p,
                         double p0) {
  const double treated = row.arm == j ? 1.0 / p : 0.0;
  const double control = row.arm == kControl ? 1.0 / p0 : 0.0;
  return (treated - control) * row.outcome;
}

double auuc(std::span<const double> points) {
  if (points.size() < 2) return 0.0;
  const std::size_t n = points.size() - 1;
  double area = 0.0;
  for (std::size_t t = 1; t <= n; ++t) area += 0.5 * (points[t - 1] + points[t]);
  return area - 0.5 * static_cast<double>(n) * points[n];
}

namespace {

std::vector<double> curve_points(const std::vector<std::size_t>& order,
                                 const ExperimentDataset& ds, CouponId j,
                                 double p) {
  std::vector<double> pts(order.size() + 1, 0.0);
  for (std::size_t t = 0; t < order.size(); ++t) {
    const auto& row = ds.rows[order[t]];
    pts[t + 1] = pts[t] + transformed_outcome(row.arm == j, p, row.outcome);
  }
  return pts;
}

std::vector<std::size_t> rank_order(std::span<const double> scores,
                                    const ExperimentDataset& ds,
                                    const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> order = rows;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ds.rows[a].customer_id < ds.rows[b].customer_id;
  });
  return order;
}

}  // namespace

UpliftCurve uplift_curve(std::span<const double> scores,
                         const ExperimentDataset& ds, CouponId j, double p,
                         int n_bootstrap, std::uint64_t seed) {
  check_probability(p);
  if (scores.size() != ds.size()) {
    throw Error("uplift_curve: " + std::to_string(scores.size()) +
                " scores for " + std::to_string(ds.size()) + " customers");
  }
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  UpliftCurve c;
  c.coupon = j;
  c.points = curve_points(rank_order(scores, ds, all), ds, j, p);
  c.auuc = auuc(c.points);
  if (n_bootstrap >= 2 && !ds.rows.empty()) {
    Rng rng(Rng::derive(seed, "auuc-bootstrap", static_cast<std::uint64_t>(j)));
    std::vector<double> reps;
    std::vector<std::size_t> sample(ds.size());
    for (int r = 0; r < n_bootstrap; ++r) {
      for (auto& s : sample) s = rng.uniform_index(ds.size());
      reps.push_back(auuc(curve_points(rank_order(scores, ds, sample), ds, j, p)));
    }
    const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) /
                        static_cast<double>(reps.size());
    double ss = 0.0;
    for (double v : reps) ss += (v - mean) * (v - mean);
    c.auuc_stderr = std::sqrt(ss / static_cast<double>(reps.size() - 1));
  }
  return c;
}

std::vector<double> budget_grid(std::span<const double> fractions,
                                std::size_t customers, const CouponCatalog& cat) {
  std::vector<double> out;
  const double scale = static_cast<double>(customers) * cat.mean_cost();
  for (double f : fractions) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw Error("budget fractions must be nonnegative");
    }
    out.push_back(f * scale);
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {lo};
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(count - 1));
  }
  return out;
}

StrategyKind parse_strategy(const std::string& name) {
  if (name == "random") return StrategyKind::kRandom;
  if (name == "mck") return StrategyKind::kMck;
  if (name == "mvo") return StrategyKind::kMvo;
  if (name == "ro") return StrategyKind::kRo;
  throw Error("unknown strategy '" + name + "' (expected random, mck, mvo or ro)");
}

std::string strategy_label(StrategyKind kind, std::size_t clusters) {
  switch (kind) {
    case StrategyKind::kRandom:
      return "random";
    case StrategyKind::kMck:
      return "mck";
    case StrategyKind::kMvo:
      return "mvo_k" + std::to_string(clusters);
    case StrategyKind::kRo:
      return "ro_k" + std::to_string(clusters);
  }
  return "unknown";
}

const SweepPoint* UpliftReport::find(const std::string& strategy,
                                     double budget) const {
  for (const auto& p : points) {
    if (p.strategy == strategy && p.budget == budget) return &p;
  }
  return nullptr;
}

std::string UpliftReport::report_csv() const {
  csv::Writer w({"strategy", "budget", "consumed_cost", "uplift_gmv"});
  for (const auto& p : points) {
    w.cell(p.strategy).cell(p.budget).cell(p.consumed_cost).cell(p.uplift_gmv);
    w.end_row();
  }
  return w.text();
}

std::string UpliftReport::proportions_csv() const {
  csv::Writer w({"strategy", "budget", "coupon_id", "proportion"});
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.proportions.size(); ++j) {
      w.cell(p.strategy).cell(p.budget).cell(j + 1).cell(p.proportions[j]);
      w.end_row();
    }
  }
  return w.text();
}

std::string UpliftReport::oracle_csv() const {
  csv::Writer w({"strategy", "budget", "estimated_effect", "true_effect"});
  for (const auto& p : points) {
    w.cell(p.strategy).cell(p.budget).cell(p.estimated_effect);
    if (p.true_effect) {
      w.cell(*p.true_effect);
    } else {
      w.cell(std::string_view(""));
    }
    w.end_row();
  }
  return w.text();
}

std::string UpliftReport::errors_csv() const {
  csv::Writer w({"strategy", "budget", "error"});
  for (const auto& p : points) {
    if (p.error.empty()) continue;
    std::string msg = p.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    w.cell(p.strategy).cell(p.budget).cell(msg);
    w.end_row();
  }
  return w.text();
}

StrategyOutcome run_strategy(const Strategy& s, const SweepInputs& in,
                             double budget, std::uint64_t seed) {
  const auto& cat = *in.cat;
  StrategyOutcome out;
  out.objective = std::numeric_limits<double>::quiet_NaN();
  const BudgetConfig cfg{budget, in.bounds};
  switch (s.kind) {
    case StrategyKind::kRandom: {
      std::vector<CustomerId> ids = in.pihat->customer_ids();
      out.plan = allocation::random_allocate(ids, cat, budget, seed);
      break;
    }
    case StrategyKind::kMck: {
      const auto r = allocation::solve_mck_greedy(*in.pihat, cat, budget, in.bounds);
      out.plan = r.plan;
      out.objective = r.objective;
      break;
    }
    case StrategyKind::kMvo: {
      const auto w = allocation::solve_mvo(*in.stats, cat, cfg, s.params.lambda);
      out.plan = allocation::realize(w, *in.stats, cat, seed);
      out.objective = w.objective;
      break;
    }
    case StrategyKind::kRo: {
      const double gamma =
          s.params.gamma(in.stats->num_clusters(), cat.size());
      const auto w = allocation::solve_ro(*in.stats, cat, cfg, s.params.alpha, gamma);
      out.plan = allocation::realize(w, *in.stats, cat, seed);
      out.objective = w.objective;
      break;
    }
  }
  return out;
}

UpliftReport budget_sweep(const std::vector<Strategy>& strategies,
                          const SweepInputs& in, std::span<const double> budgets,
                          std::uint64_t seed) {
  if (budgets.empty()) throw Error("budget sweep needs at least one budget");
  for (std::size_t b = 1; b < budgets.size(); ++b) {
    if (budgets[b] < budgets[b - 1]) throw Error("budgets must be ascending");
  }
  if (!in.pihat || !in.ds || !in.cat) throw Error("budget sweep inputs incomplete");
  const double p = in.ds->arm_probability;
  const std::size_t J = in.cat->size();
  const auto n = static_cast<double>(in.pihat->customers());
  const std::size_t K = in.stats ? in.stats->num_clusters() : 0;
  UpliftReport report;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    const std::uint64_t point_seed =
        Rng::derive(seed, "budget", static_cast<std::uint64_t>(b));
    for (const auto& s : strategies) {
      SweepPoint pt;
      pt.strategy = strategy_label(s.kind, K);
      pt.budget = budgets[b];
      pt.proportions.assign(J, 0.0);
      pt.objective = std::numeric_limits<double>::quiet_NaN();
      try {
        if ((s.kind == StrategyKind::kMvo || s.kind == StrategyKind::kRo) &&
            !in.stats) {
          throw Error("cluster statistics are required for " + pt.strategy);
        }
        const auto r = run_strategy(s, in, budgets[b], point_seed);
        pt.consumed_cost = r.plan.consumed_cost;
        pt.uplift_gmv = uplift_gmv(r.plan, *in.ds, p).total;
        pt.estimated_effect = allocation::plan_effect(r.plan, *in.pihat);
        if (in.truth) pt.true_effect = allocation::plan_effect(r.plan, *in.truth);
        pt.objective = r.objective;
        const auto counts = r.plan.coupon_counts(J);
        for (std::size_t j = 1; j <= J; ++j) {
          pt.proportions[j - 1] = n > 0 ? static_cast<double>(counts[j]) / n : 0.0;
        }
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
      report.points.push_back(std::move(pt));
    }
  }
  return report;
}

std::vector<allocation::UncertaintyConfig> lambda_grid(std::span<const double> lambdas) {
  std::vector<allocation::UncertaintyConfig> g;
  for (double l : lambdas) g.push_back({0.0, 0.0, l});
  return g;
}

std::vector<allocation::UncertaintyConfig> robust_grid(std::span<const double> alphas,
                                                       std::span<const double> betas) {
  std::vector<allocation::UncertaintyConfig> g;
  for (double a : alphas) {
    for (double b : betas) g.push_back({a, b, 0.0});
  }
  return g;
}

namespace {

// True if candidate should replace the incumbent on equal scores.
bool more_robust(const allocation::UncertaintyConfig& c,
                 const allocation::UncertaintyConfig& inc) {
  if (c.lambda != inc.lambda) return c.lambda < inc.lambda;
  if (c.alpha != inc.alpha) return c.alpha > inc.alpha;
  return c.beta > inc.beta;
}

}  // namespace

CvResult cross_validate(const std::vector<allocation::UncertaintyConfig>& grid,
                        const ExperimentDataset& train, const CouponCatalog& cat,
                        StrategyKind model, const CvSettings& settings,
                        std::uint64_t seed) {
  if (grid.empty()) throw Error("cross-validation grid is empty");
  if (model != StrategyKind::kMvo && model != StrategyKind::kRo) {
    throw Error("cross-validation supports the mvo and ro models only");
  }
  for (const auto& g : grid) g.validate();
  if (settings.folds < 2) throw Error("cross-validation needs at least 2 folds");
  const auto folds = static_cast<std::size_t>(settings.folds);
  if (train.size() < folds) throw Error("fewer rows than folds");

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(Rng::derive(seed, "cv-folds"));
  rng.shuffle(order);

  CvResult result;
  result.entries.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) result.entries[g].params = grid[g];

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t r = 0; r < order.size(); ++r) {
      (r % folds == f ? te : tr).push_back(order[r]);
    }
    std::sort(tr.begin(), tr.end());
    std::sort(te.begin(), te.end());
    const ExperimentDataset fit_ds = train.subset(tr);
    const ExperimentDataset held = train.subset(te);
    const std::uint64_t fold_seed = Rng::derive(seed, "cv-fold", f);
    segmentation::ClusterStats stats;
    CateMatrix pihat;
    try {
      const auto learner = uplift::fit_slearner(fit_ds, cat, settings.learner,
                                                Rng::derive(fold_seed, "fit"));
      pihat = learner.estimate_cate(held);
      const auto gmm = segmentation::fit_gmm(pihat, settings.clusters,
                                             Rng::derive(fold_seed, "segment"),
                                             settings.gmm);
      const auto assignment =
          segmentation::compact(segmentation::assign_clusters(gmm, pihat));
      stats = segmentation::cluster_stats(pihat, assignment, settings.n_bootstrap,
                                          Rng::derive(fold_seed, "segment"));
    } catch (const std::exception& e) {
      throw Error("cross-validation fold " + std::to_string(f + 1) + ": " + e.what());
    }
    SweepInputs in;
    in.stats = &stats;
    in.pihat = &pihat;
    in.ds = &held;
    in.cat = &cat;
    in.bounds = settings.bounds;
    const double budget = settings.budget_fraction *
                          static_cast<double>(held.size()) * cat.mean_cost();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double score = 0.0;
      try {
        const auto r = run_strategy({model, grid[g]}, in, budget,
                                    Rng::derive(fold_seed, "allocate"));
        score = uplift_gmv(r.plan, held, held.arm_probability).total;
      } catch (const std::exception& e) {
        score = -std::numeric_limits<double>::infinity();
      }
      result.entries[g].fold_scores.push_back(score);
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto& e = result.entries[g];
    e.mean_score = std::accumulate(e.fold_scores.begin(), e.fold_scores.end(), 0.0) /
                   static_cast<double>(e.fold_scores.size());
    if (g == 0) continue;
    const double inc = result.entries[best].mean_score;
    if (e.mean_score > inc ||
        (e.mean_score == inc && more_robust(e.params, result.entries[best].params))) {
      best = g;
    }
  }
  result.best = result.entries[best].params;
  return result;
}

}  // namespace couponalloc::evaluation
