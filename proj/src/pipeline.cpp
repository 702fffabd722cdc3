#include "couponalloc/pipeline.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "couponalloc/csv.hpp"
#include "couponalloc/io.hpp"
#include "couponalloc/plots.hpp"

namespace couponalloc::pipeline {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "seed",
    "data.customers", "data.noise", "data.arm_probability", "data.dataset",
    "data.truth", "data.catalog", "data.test_fraction",
    "learner.kind", "learner.tune", "learner.trees", "learner.depth",
    "learner.learning_rate", "learner.min_leaf", "learner.bins",
    "learner.ridge_penalty",
    "segment.clusters", "segment.bootstrap", "segment.max_iter", "segment.tol",
    "segment.restarts",
    "allocate.strategies", "allocate.lambda", "allocate.alpha", "allocate.beta",
    "allocate.lower", "allocate.upper",
    "sweep.budgets", "sweep.min", "sweep.max",
    "cv.enabled", "cv.folds", "cv.lambda_grid", "cv.alpha_grid", "cv.beta_grid",
    "report.auuc_bootstrap", "report.hyper_sweep",
    "output.dir"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream in(trim(*v));
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) {
    throw ConfigError("config key '" + key + "' has invalid value '" + *v + "'");
  }
  return out;
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  const std::string s = trim(*v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "' must be true or false");
}

std::vector<double> get_numbers(const pt::ptree& tree, const std::string& key,
                                std::vector<double> fallback) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(*v)) {
    std::istringstream in(item);
    double d = 0;
    in >> d;
    if (in.fail() || !in.eof()) {
      throw ConfigError("config key '" + key + "' has invalid number '" + item + "'");
    }
    out.push_back(d);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += csv::format_double(v[i]);
  }
  return s;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) { return cfg.out / name; }

template <typename F>
auto in_stage(const std::string& stage, F&& body) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void require_file(const fs::path& p, const std::string& hint) {
  if (!fs::exists(p)) {
    throw Error("missing input " + p.string() + " (run '" + hint + "' first)");
  }
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (!kKnownKeys.count(section)) throw ConfigError("unknown config key '" + section + "'");
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!kKnownKeys.count(full)) throw ConfigError("unknown config key '" + full + "'");
    }
  }
  RunConfig c;
  c.seed = get<std::uint64_t>(tree, "seed", c.seed);
  c.customers = get<std::size_t>(tree, "data.customers", c.customers);
  c.noise = get<double>(tree, "data.noise", c.noise);
  if (tree.get_optional<std::string>("data.arm_probability")) {
    c.arm_probability = get<double>(tree, "data.arm_probability", 0.0);
  }
  if (auto v = tree.get_optional<std::string>("data.dataset")) c.dataset = trim(*v);
  if (auto v = tree.get_optional<std::string>("data.truth")) c.truth = trim(*v);
  if (auto v = tree.get_optional<std::string>("data.catalog")) c.catalog = trim(*v);
  c.test_fraction = get<double>(tree, "data.test_fraction", c.test_fraction);

  if (auto v = tree.get_optional<std::string>("learner.kind")) {
    try {
      c.learner.kind = uplift::parse_learner(trim(*v));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  c.learner.tune = get_bool(tree, "learner.tune", c.learner.tune);
  c.learner.gbt.n_trees = get<int>(tree, "learner.trees", c.learner.gbt.n_trees);
  c.learner.gbt.max_depth = get<int>(tree, "learner.depth", c.learner.gbt.max_depth);
  c.learner.gbt.learning_rate =
      get<double>(tree, "learner.learning_rate", c.learner.gbt.learning_rate);
  c.learner.gbt.min_samples_leaf =
      get<int>(tree, "learner.min_leaf", c.learner.gbt.min_samples_leaf);
  c.learner.gbt.max_bins = get<int>(tree, "learner.bins", c.learner.gbt.max_bins);
  c.learner.ridge_penalty = get<double>(tree, "learner.ridge_penalty", c.learner.ridge_penalty);

  c.clusters = get<std::size_t>(tree, "segment.clusters", c.clusters);
  c.bootstrap = get<int>(tree, "segment.bootstrap", c.bootstrap);
  c.gmm.max_iter = get<int>(tree, "segment.max_iter", c.gmm.max_iter);
  c.gmm.tol = get<double>(tree, "segment.tol", c.gmm.tol);
  c.gmm.restarts = get<int>(tree, "segment.restarts", c.gmm.restarts);

  if (auto v = tree.get_optional<std::string>("allocate.strategies")) {
    c.strategies = split_list(*v);
  }
  c.lambda = get<double>(tree, "allocate.lambda", c.lambda);
  c.alpha = get<double>(tree, "allocate.alpha", c.alpha);
  c.beta = get<double>(tree, "allocate.beta", c.beta);
  const bool has_lo = tree.get_optional<std::string>("allocate.lower").has_value();
  const bool has_hi = tree.get_optional<std::string>("allocate.upper").has_value();
  if (has_lo != has_hi) throw ConfigError("allocate.lower and allocate.upper go together");
  if (has_lo) {
    c.bounds = ProportionBounds{get<double>(tree, "allocate.lower", 0.0),
                                get<double>(tree, "allocate.upper", 1.0)};
  }

  c.budget_points = get<std::size_t>(tree, "sweep.budgets", c.budget_points);
  c.budget_min = get<double>(tree, "sweep.min", c.budget_min);
  c.budget_max = get<double>(tree, "sweep.max", c.budget_max);

  c.cv = get_bool(tree, "cv.enabled", c.cv);
  c.cv_folds = get<int>(tree, "cv.folds", c.cv_folds);
  c.lambda_grid = get_numbers(tree, "cv.lambda_grid", c.lambda_grid);
  c.alpha_grid = get_numbers(tree, "cv.alpha_grid", c.alpha_grid);
  c.beta_grid = get_numbers(tree, "cv.beta_grid", c.beta_grid);

  c.auuc_bootstrap = get<int>(tree, "report.auuc_bootstrap", c.auuc_bootstrap);
  c.hyper_sweep = get_bool(tree, "report.hyper_sweep", c.hyper_sweep);

  if (auto v = tree.get_optional<std::string>("output.dir")) c.out = trim(*v);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  RunConfig c = parse(io::read_text(path));
  // Relative paths in a config file are relative to the file.
  const fs::path base = path.parent_path();
  auto rebase = [&](std::optional<fs::path>& p) {
    if (p && p->is_relative()) p = base / *p;
  };
  rebase(c.dataset);
  rebase(c.truth);
  rebase(c.catalog);
  if (c.out.is_relative()) c.out = base / c.out;
  return c;
}

std::string RunConfig::to_text() const {
  using csv::format_double;
  std::ostringstream o;
  o << "seed = " << seed << "\n\n[data]\n"
    << "customers = " << customers << "\n"
    << "noise = " << format_double(noise) << "\n";
  if (arm_probability) o << "arm_probability = " << format_double(*arm_probability) << "\n";
  if (dataset) o << "dataset = " << dataset->string() << "\n";
  if (truth) o << "truth = " << truth->string() << "\n";
  if (catalog) o << "catalog = " << catalog->string() << "\n";
  o << "test_fraction = " << format_double(test_fraction) << "\n\n[learner]\n"
    << "kind = " << (learner.kind == uplift::LearnerKind::kGbt ? "gbt" : "ridge") << "\n"
    << "tune = " << (learner.tune ? "true" : "false") << "\n"
    << "trees = " << learner.gbt.n_trees << "\n"
    << "depth = " << learner.gbt.max_depth << "\n"
    << "learning_rate = " << format_double(learner.gbt.learning_rate) << "\n"
    << "min_leaf = " << learner.gbt.min_samples_leaf << "\n"
    << "bins = " << learner.gbt.max_bins << "\n"
    << "ridge_penalty = " << format_double(learner.ridge_penalty) << "\n\n[segment]\n"
    << "clusters = " << clusters << "\n"
    << "bootstrap = " << bootstrap << "\n"
    << "max_iter = " << gmm.max_iter << "\n"
    << "tol = " << format_double(gmm.tol) << "\n"
    << "restarts = " << gmm.restarts << "\n\n[allocate]\nstrategies = ";
  for (std::size_t i = 0; i < strategies.size(); ++i) o << (i ? "," : "") << strategies[i];
  o << "\nlambda = " << format_double(lambda) << "\n"
    << "alpha = " << format_double(alpha) << "\n"
    << "beta = " << format_double(beta) << "\n";
  if (bounds) {
    o << "lower = " << format_double(bounds->lower) << "\n"
      << "upper = " << format_double(bounds->upper) << "\n";
  }
  o << "\n[sweep]\nbudgets = " << budget_points << "\n"
    << "min = " << format_double(budget_min) << "\n"
    << "max = " << format_double(budget_max) << "\n\n[cv]\n"
    << "enabled = " << (cv ? "true" : "false") << "\n"
    << "folds = " << cv_folds << "\n"
    << "lambda_grid = " << join(lambda_grid) << "\n"
    << "alpha_grid = " << join(alpha_grid) << "\n"
    << "beta_grid = " << join(beta_grid) << "\n\n[report]\n"
    << "auuc_bootstrap = " << auuc_bootstrap << "\n"
    << "hyper_sweep = " << (hyper_sweep ? "true" : "false") << "\n\n[output]\n"
    << "dir = " << out.string() << "\n";
  return o.str();
}

void RunConfig::validate() const {
  if (!dataset && customers < 10) throw ConfigError("data.customers must be at least 10");
  if (!(noise >= 0.0)) throw ConfigError("data.noise must be nonnegative");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("data.test_fraction must lie in (0, 1)");
  }
  if (arm_probability && !(*arm_probability > 0.0 && *arm_probability < 1.0)) {
    throw ConfigError("data.arm_probability must lie in (0, 1)");
  }
  if (clusters == 0) throw ConfigError("segment.clusters must be at least 1");
  if (bootstrap < 2) throw ConfigError("segment.bootstrap must be at least 2");
  if (strategies.empty()) throw ConfigError("allocate.strategies is empty");
  for (const auto& s : strategies) {
    try {
      evaluation::parse_strategy(s);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  try {
    uncertainty().validate();
    BudgetConfig{0.0, bounds}.validate(6);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (budget_points == 0) throw ConfigError("sweep.budgets must be at least 1");
  if (!(budget_min >= 0.0 && budget_max >= budget_min)) {
    throw ConfigError("sweep.min and sweep.max must satisfy 0 <= min <= max");
  }
  if (cv && (lambda_grid.empty() || alpha_grid.empty() || beta_grid.empty())) {
    throw ConfigError("cross-validation grids must be non-empty");
  }
  if (cv_folds < 2) throw ConfigError("cv.folds must be at least 2");
}

std::vector<double> RunConfig::budget_fractions() const {
  return evaluation::linspace(budget_min, budget_max, budget_points);
}

std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t stage_seed(const RunConfig& cfg, const std::string& stage) {
  return Rng::derive(cfg.seed, stage);
}

CouponCatalog resolve_catalog(const RunConfig& cfg) {
  if (cfg.catalog) {
    if (!fs::exists(*cfg.catalog)) {
      throw ConfigError("catalog file not found: " + cfg.catalog->string());
    }
    return io::load_catalog(*cfg.catalog);
  }
  return CouponCatalog::standard();
}

double resolve_probability(const RunConfig& cfg, const CouponCatalog& cat) {
  return cfg.arm_probability.value_or(1.0 / static_cast<double>(cat.size() + 1));
}

void stage_gen(const RunConfig& cfg) {
  const CouponCatalog cat = resolve_catalog(cfg);
  if (cfg.dataset && !fs::exists(*cfg.dataset)) {
    throw ConfigError("dataset file not found: " + cfg.dataset->string());
  }
  if (cfg.truth && !fs::exists(*cfg.truth)) {
    throw ConfigError("truth file not found: " + cfg.truth->string());
  }
  in_stage("gen", [&] {
    fs::create_directories(cfg.out);
    const double p = resolve_probability(cfg, cat);
    io::save_catalog(cat, out_path(cfg, "catalog.csv"));
    if (cfg.dataset) {
      const auto ds = io::load_dataset(*cfg.dataset, p);
      require_valid(ds, cat);
      io::save_dataset(ds, out_path(cfg, "dataset.csv"));
      if (cfg.truth) {
        io::save_cate(io::load_cate(*cfg.truth, "tau"), out_path(cfg, "truth.csv"), "tau");
      } else {
        fs::remove(out_path(cfg, "truth.csv"));
      }
      return;
    }
    const auto gt = synthgen::default_model(cat, cfg.noise);
    const auto g = synthgen::generate(gt, cfg.customers, cat, p, stage_seed(cfg, "gen"));
    io::save_dataset(g.dataset, out_path(cfg, "dataset.csv"));
    io::save_cate(g.true_cate, out_path(cfg, "truth.csv"), "tau");
  });
}

void stage_fit(const RunConfig& cfg) {
  in_stage("fit", [&] {
    require_file(out_path(cfg, "dataset.csv"), "gen");
    const CouponCatalog cat = io::load_catalog(out_path(cfg, "catalog.csv"));
    const auto ds = io::load_dataset(out_path(cfg, "dataset.csv"), resolve_probability(cfg, cat));
    require_valid(ds, cat);
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(stage_seed(cfg, "split"));
    rng.shuffle(order);
    const auto n_test = static_cast<std::size_t>(
        std::llround(cfg.test_fraction * static_cast<double>(ds.size())));
    if (n_test == 0 || n_test >= ds.size()) throw Error("train/test split leaves an empty side");
    std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    const auto train_ds = ds.subset(train);
    const auto test_ds = ds.subset(test);
    io::save_dataset(train_ds, out_path(cfg, "train.csv"));
    io::save_dataset(test_ds, out_path(cfg, "test.csv"));
    const auto learner = uplift::fit_slearner(train_ds, cat, cfg.learner, stage_seed(cfg, "fit"));
    io::save_cate(learner.estimate_cate(test_ds), out_path(cfg, "cate.csv"), "pihat");
  });
}

void stage_segment(const RunConfig& cfg) {
  in_stage("segment", [&] {
    require_file(out_path(cfg, "cate.csv"), "fit");
    const CouponCatalog cat = io::load_catalog(out_path(cfg, "catalog.csv"));
    const auto pihat = io::load_cate(out_path(cfg, "cate.csv"), "pihat");
    const auto model = segmentation::fit_gmm(pihat, cfg.clusters, stage_seed(cfg, "segment"), cfg.gmm);
    const auto assignment = segmentation::compact(segmentation::assign_clusters(model, pihat));
    const auto stats = segmentation::cluster_stats(pihat, assignment, cfg.bootstrap,
                                                   stage_seed(cfg, "bootstrap"));
    io::save_stats(stats, cfg.out / "stats");
    const auto test = io::load_dataset(out_path(cfg, "test.csv"), resolve_probability(cfg, cat));
    const auto table = segmentation::table2_report(stats, test, test.arm_probability);
    const double scale = test.mean_outcome() > 0 ? test.mean_outcome() : 1.0;
    io::write_text(out_path(cfg, "table2.txt"), table.to_text(cat, scale));
  });
}

allocation::UncertaintyConfig stage_cv(const RunConfig& cfg) {
  return in_stage("cv", [&] {
    require_file(out_path(cfg, "train.csv"), "fit");
    const CouponCatalog cat = io::load_catalog(out_path(cfg, "catalog.csv"));
    const auto train = io::load_dataset(out_path(cfg, "train.csv"), resolve_probability(cfg, cat));
    evaluation::CvSettings s;
    s.learner = cfg.learner;
    s.clusters = cfg.clusters;
    s.n_bootstrap = cfg.bootstrap;
    s.gmm = cfg.gmm;
    s.budget_fraction = 0.5 * (cfg.budget_min + cfg.budget_max);
    s.bounds = cfg.bounds;
    s.folds = cfg.cv_folds;
    allocation::UncertaintyConfig best = cfg.uncertainty();
    csv::Writer w({"model", "lambda", "alpha", "beta", "fold", "score"});
    auto record = [&](const std::string& model, const evaluation::CvResult& r) {
      for (const auto& e : r.entries) {
        for (std::size_t f = 0; f < e.fold_scores.size(); ++f) {
          w.cell(model).cell(e.params.lambda).cell(e.params.alpha).cell(e.params.beta)
              .cell(f + 1).cell(e.fold_scores[f]);
          w.end_row();
        }
      }
    };
    const auto has = [&](const std::string& s) {
      return std::find(cfg.strategies.begin(), cfg.strategies.end(), s) != cfg.strategies.end();
    };
    if (has("mvo")) {
      const auto r = evaluation::cross_validate(evaluation::lambda_grid(cfg.lambda_grid), train, cat,
                                                evaluation::StrategyKind::kMvo, s,
                                                stage_seed(cfg, "cv"));
      best.lambda = r.best.lambda;
      record("mvo", r);
    }
    if (has("ro")) {
      const auto r = evaluation::cross_validate(
          evaluation::robust_grid(cfg.alpha_grid, cfg.beta_grid), train, cat,
          evaluation::StrategyKind::kRo, s, stage_seed(cfg, "cv"));
      best.alpha = r.best.alpha;
      best.beta = r.best.beta;
      record("ro", r);
    }
    io::write_text(out_path(cfg, "cv.csv"), w.text());
    return best;
  });
}

void stage_sweep(const RunConfig& cfg, const allocation::UncertaintyConfig& params) {
  in_stage("sweep", [&] {
    require_file(cfg.out / "stats" / "means.csv", "segment");
    const CouponCatalog cat = io::load_catalog(out_path(cfg, "catalog.csv"));
    const auto test = io::load_dataset(out_path(cfg, "test.csv"), resolve_probability(cfg, cat));
    const auto pihat = io::load_cate(out_path(cfg, "cate.csv"), "pihat");
    const auto stats = io::load_stats(cfg.out / "stats");
    std::optional<CateMatrix> truth;
    if (fs::exists(out_path(cfg, "truth.csv"))) truth = io::load_cate(out_path(cfg, "truth.csv"), "tau");

    evaluation::SweepInputs in;
    in.stats = &stats;
    in.pihat = &pihat;
    in.ds = &test;
    in.cat = &cat;
    in.truth = truth ? &*truth : nullptr;
    in.bounds = cfg.bounds;
    const auto fractions = cfg.budget_fractions();
    const auto budgets = evaluation::budget_grid(fractions, test.size(), cat);
    std::vector<evaluation::Strategy> strategies;
    for (const auto& s : cfg.strategies) strategies.push_back({evaluation::parse_strategy(s), params});
    const auto report = evaluation::budget_sweep(strategies, in, budgets, stage_seed(cfg, "sweep"));
    io::write_text(out_path(cfg, "report.csv"), report.report_csv());
    io::write_text(out_path(cfg, "proportions.csv"), report.proportions_csv());
    io::write_text(out_path(cfg, "oracle.csv"), report.oracle_csv());
    io::write_text(out_path(cfg, "sweep_errors.csv"), report.errors_csv());

    const double scale = test.mean_outcome() > 0 ? test.mean_outcome() : 1.0;
    std::vector<evaluation::UpliftCurve> curves;
    csv::Writer cw({"coupon_id", "rank", "cumulative_uplift"});
    csv::Writer aw({"coupon_id", "label", "auuc", "auuc_stderr"});
    for (const auto& c : cat.coupons()) {
      std::vector<double> scores(test.size());
      for (std::size_t i = 0; i < test.size(); ++i) {
        scores[i] = pihat.at(pihat.row_of(test.rows[i].customer_id), c.id);
      }
      auto curve = evaluation::uplift_curve(scores, test, c.id, test.arm_probability,
                                            cfg.auuc_bootstrap, stage_seed(cfg, "curves"));
      for (std::size_t t = 0; t < curve.points.size(); ++t) {
        cw.cell(c.id).cell(t).cell(curve.points[t]);
        cw.end_row();
      }
      aw.cell(c.id).cell(c.label).cell(curve.auuc).cell(curve.auuc_stderr);
      aw.end_row();
      curves.push_back(std::move(curve));
    }
    io::write_text(out_path(cfg, "curves.csv"), cw.text());
    io::write_text(out_path(cfg, "auuc.csv"), aw.text());
    io::write_text(out_path(cfg, "fig1_uplift_curves.svg"), plots::uplift_curves(curves, cat, scale));
    io::write_text(out_path(cfg, "fig2_uplift_vs_cost.svg"), plots::uplift_vs_cost(report, scale));
    std::set<std::string> seen;
    for (const auto& p : report.points) {
      if (p.strategy == "random" || !seen.insert(p.strategy).second) continue;
      io::write_text(out_path(cfg, "fig3_proportions_" + p.strategy + ".svg"),
                     plots::proportions(report, p.strategy, cat));
    }

    if (cfg.hyper_sweep) {
      // Robust model over the (alpha, beta) grid, each scored by its mean
      // Uplift-GMV across the budget grid.
      csv::Writer hw({"clusters", "alpha", "beta", "mean_uplift_gmv"});
      std::vector<std::pair<std::string, std::vector<double>>> by_alpha, by_beta;
      for (double a : cfg.alpha_grid) by_alpha.push_back({"a=" + csv::format_double(a), {}});
      for (double b : cfg.beta_grid) by_beta.push_back({"b=" + csv::format_double(b), {}});
      for (std::size_t ai = 0; ai < cfg.alpha_grid.size(); ++ai) {
        for (std::size_t bi = 0; bi < cfg.beta_grid.size(); ++bi) {
          evaluation::Strategy s{evaluation::StrategyKind::kRo,
                                 {cfg.alpha_grid[ai], cfg.beta_grid[bi], 0.0}};
          const auto r = evaluation::budget_sweep({s}, in, budgets, stage_seed(cfg, "sweep"));
          double total = 0.0;
          std::size_t ok = 0;
          for (const auto& p : r.points) {
            if (p.error.empty()) {
              total += p.uplift_gmv;
              ++ok;
            }
          }
          const double mean = ok ? total / static_cast<double>(ok) : 0.0;
          hw.cell(stats.num_clusters()).cell(cfg.alpha_grid[ai]).cell(cfg.beta_grid[bi]).cell(mean);
          hw.end_row();
          by_alpha[ai].second.push_back(mean / scale);
          by_beta[bi].second.push_back(mean / scale);
        }
      }
      io::write_text(out_path(cfg, "hyper.csv"), hw.text());
      io::write_text(out_path(cfg, "fig5_alpha.svg"),
                     plots::boxplots(by_alpha, "Robust model Uplift-GMV by alpha", "mean Uplift-GMV (normalized)"));
      io::write_text(out_path(cfg, "fig5_beta.svg"),
                     plots::boxplots(by_beta, "Robust model Uplift-GMV by beta", "mean Uplift-GMV (normalized)"));
    }
  });
}

void run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  stage_gen(cfg);
  stage_fit(cfg);
  stage_segment(cfg);
  const auto params = cfg.cv ? stage_cv(cfg) : cfg.uncertainty();
  stage_sweep(cfg, params);
  in_stage("manifest", [&] {
    nlohmann::ordered_json m;
    m["tool"] = "couponalloc";
    m["version"] = "0.1.0";
    m["seed"] = cfg.seed;
    m["config_hash"] = digest(cfg.to_text());
    m["config"] = cfg.to_text();
    m["selected"] = {{"lambda", params.lambda}, {"alpha", params.alpha}, {"beta", params.beta}};
    nlohmann::ordered_json files = nlohmann::ordered_json::object();
    std::vector<fs::path> paths;
    for (const auto& e : fs::recursive_directory_iterator(cfg.out)) {
      if (e.is_regular_file() && e.path().filename() != "manifest.json") paths.push_back(e.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
      files[fs::relative(p, cfg.out).generic_string()] = digest(io::read_text(p));
    }
    m["artifacts"] = files;
    io::write_text(out_path(cfg, "manifest.json"), m.dump(2) + "\n");
  });
}

}  // namespace couponalloc::pipeline
