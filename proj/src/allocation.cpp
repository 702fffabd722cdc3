#include "couponalloc/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace couponalloc::allocation {

std::string to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::kMckRelaxed:
      return "mck-relaxed";
    case ModelTag::kMvo:
      return "mvo";
    case ModelTag::kRo:
      return "ro";
  }
  return "unknown";
}

double FractionalAllocation::cost(const CouponCatalog& cat) const {
  double total = 0.0;
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      total += cat.cost(static_cast<CouponId>(j + 1)) * w(k, j);
    }
  }
  return total;
}

void FractionalAllocation::check(const ClusterStats& stats,
                                 const CouponCatalog& cat,
                                 const BudgetConfig& budget_cfg) const {
  if (w.rows() != static_cast<Eigen::Index>(stats.num_clusters()) ||
      w.cols() != static_cast<Eigen::Index>(cat.size())) {
    throw Error("allocation shape does not match clusters x coupons");
  }
  if (w.minCoeff() < -1e-9) throw Error("allocation has negative entries");
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    const double cap = static_cast<double>(stats.sizes[static_cast<std::size_t>(k)]);
    if (w.row(k).sum() > cap + 1e-7) {
      throw Error("allocation exceeds capacity of cluster " + std::to_string(k));
    }
  }
  if (cost(cat) > budget_cfg.total_budget + 1e-6) {
    throw Error("allocation exceeds the budget");
  }
  if (budget_cfg.bounds) {
    const auto n = static_cast<double>(stats.total_customers());
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const double s = w.col(j).sum();
      if (s < budget_cfg.bounds->lower * n - 1e-6 ||
          s > budget_cfg.bounds->upper * n + 1e-6) {
        throw Error("allocation violates proportion bounds for coupon " +
                    std::to_string(j + 1));
      }
    }
  }
}

void UncertaintyConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error("alpha must be a nonnegative finite number");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("beta must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("lambda must lie in [0, 1]");
}

namespace {

struct Increment {
  std::size_t customer;
  std::size_t step;
  CouponId from;
  CouponId to;
  double dcost;
  double deffect;
};

// Vertices of the upper convex hull of {(0,0)} and the positive-effect
// options, from the origin outwards.
std::vector<CouponId> hull_options(const CateMatrix& pihat,
                                   const CouponCatalog& cat, std::size_t row,
                                   const std::vector<bool>& allowed) {
  std::vector<CouponId> opts;
  for (const auto& c : cat.coupons()) {
    if (allowed[static_cast<std::size_t>(c.id)] && pihat.at(row, c.id) > 0.0) {
      opts.push_back(c.id);
    }
  }
  std::sort(opts.begin(), opts.end(), [&](CouponId a, CouponId b) {
    if (cat.cost(a) != cat.cost(b)) return cat.cost(a) < cat.cost(b);
    if (pihat.at(row, a) != pihat.at(row, b)) {
      return pihat.at(row, a) > pihat.at(row, b);
    }
    return a < b;
  });
  // Drop options that cost at least as much as a better-or-equal one.
  std::vector<CouponId> undominated;
  double best = 0.0;
  for (CouponId j : opts) {
    if (pihat.at(row, j) > best) {
      undominated.push_back(j);
      best = pihat.at(row, j);
    }
  }
  std::vector<CouponId> hull{kControl};
  auto px = [&](CouponId j) { return cat.cost(j); };
  auto py = [&](CouponId j) { return pihat.at(row, j); };
  for (CouponId j : undominated) {
    while (hull.size() >= 2) {
      const CouponId a = hull[hull.size() - 2];
      const CouponId b = hull.back();
      const double cross = (px(b) - px(a)) * (py(j) - py(a)) -
                           (py(b) - py(a)) * (px(j) - px(a));
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(j);
  }
  return hull;
}

double sum_effect(const std::map<CustomerId, CouponId>& a,
                  const CateMatrix& pihat) {
  double s = 0.0;
  for (const auto& [id, j] : a) s += pihat.at(pihat.row_of(id), j);
  return s;
}

void check_pihat(const CateMatrix& pihat, const CouponCatalog& cat,
                 double budget) {
  if (pihat.coupons() != cat.size()) {
    throw Error("CATE matrix has " + std::to_string(pihat.coupons()) +
                " coupon columns but the catalog has " +
                std::to_string(cat.size()));
  }
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw Error("budget must be a nonnegative finite number");
  }
}

}  // namespace

MckResult solve_mck_exact(const CateMatrix& pihat, const CouponCatalog& cat,
                          double budget,
                          const std::optional<ProportionBounds>& bounds) {
  check_pihat(pihat, cat, budget);
  if (bounds) {
    throw Error("solve_mck_exact does not support proportion bounds; use "
                "solve_mck_greedy");
  }
  if (!cat.has_integer_costs()) {
    throw Error("solve_mck_exact needs integer unit costs; use solve_mck_greedy");
  }
  const std::size_t n = pihat.customers();
  if (n > kMckExactMaxCustomers || budget > kMckExactMaxBudget) {
    throw Error("instance too large for solve_mck_exact (|I| = " +
                std::to_string(n) + ", B = " + std::to_string(budget) +
                "); use solve_mck_greedy");
  }
  const auto cap = static_cast<std::size_t>(std::floor(budget + 1e-9));
  std::vector<std::size_t> cost(cat.size() + 1, 0);
  for (const auto& c : cat.coupons()) {
    cost[static_cast<std::size_t>(c.id)] =
        static_cast<std::size_t>(std::llround(c.unit_cost));
  }
  std::vector<double> dp(cap + 1, 0.0), next(cap + 1);
  std::vector<std::vector<std::int8_t>> choice(n,
                                               std::vector<std::int8_t>(cap + 1, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b <= cap; ++b) {
      double best = dp[b];
      std::int8_t pick = 0;
      for (const auto& c : cat.coupons()) {
        const double v = pihat.at(i, c.id);
        const std::size_t cj = cost[static_cast<std::size_t>(c.id)];
        if (v <= 0.0 || cj > b) continue;
        if (dp[b - cj] + v > best) {
          best = dp[b - cj] + v;
          pick = static_cast<std::int8_t>(c.id);
        }
      }
      next[b] = best;
      choice[i][b] = pick;
    }
    std::swap(dp, next);
  }
  std::map<CustomerId, CouponId> a;
  std::size_t b = cap;
  for (std::size_t i = n; i-- > 0;) {
    const CouponId j = choice[i][b];
    if (j != kControl) {
      a[pihat.customer_ids()[i]] = j;
      b -= cost[static_cast<std::size_t>(j)];
    }
  }
  MckResult res;
  res.objective = sum_effect(a, pihat);
  res.plan = make_plan(std::move(a), cat);
  return res;
}

MckResult solve_mck_greedy(const CateMatrix& pihat, const CouponCatalog& cat,
                           double budget,
                           const std::optional<ProportionBounds>& bounds) {
  check_pihat(pihat, cat, budget);
  const std::size_t n = pihat.customers();
  const std::size_t J = cat.size();
  std::vector<std::size_t> count(J + 1, 0);
  std::vector<std::size_t> cap(J + 1, n);
  std::vector<bool> reserved(n, false);
  std::map<CustomerId, CouponId> a;
  double consumed = 0.0;

  if (bounds) {
    BudgetConfig{budget, bounds}.validate(J);
    const auto dn = static_cast<double>(n);
    const auto lower = static_cast<std::size_t>(
        std::max(0.0, std::ceil(bounds->lower * dn - 1e-9)));
    std::size_t need = 0;
    double need_cost = 0.0;
    for (std::size_t j = 1; j <= J; ++j) {
      cap[j] = static_cast<std::size_t>(std::floor(bounds->upper * dn + 1e-9));
      need += lower;
      need_cost += static_cast<double>(lower) * cat.cost(static_cast<CouponId>(j));
    }
    if (need > n || need_cost > budget) {
      throw Error("proportion bounds are infeasible at budget " +
                  std::to_string(budget));
    }
    // Reserve each coupon's lower-bound count among its best customers.
    for (std::size_t j = 1; j <= J; ++j) {
      const auto cj = static_cast<CouponId>(j);
      std::vector<std::size_t> cand;
      for (std::size_t i = 0; i < n; ++i) {
        if (!reserved[i]) cand.push_back(i);
      }
      std::stable_sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
        if (pihat.at(x, cj) != pihat.at(y, cj)) return pihat.at(x, cj) > pihat.at(y, cj);
        return pihat.customer_ids()[x] < pihat.customer_ids()[y];
      });
      for (std::size_t t = 0; t < lower; ++t) {
        reserved[cand[t]] = true;
        a[pihat.customer_ids()[cand[t]]] = cj;
        consumed += cat.cost(cj);
        ++count[j];
      }
    }
  }

  const std::vector<bool> allowed(J + 1, true);
  std::vector<Increment> incs;
  for (std::size_t i = 0; i < n; ++i) {
    if (reserved[i]) continue;
    const auto hull = hull_options(pihat, cat, i, allowed);
    for (std::size_t s = 1; s < hull.size(); ++s) {
      incs.push_back({i, s, hull[s - 1], hull[s],
                      cat.cost(hull[s]) - cat.cost(hull[s - 1]),
                      pihat.at(i, hull[s]) - pihat.at(i, hull[s - 1])});
    }
  }
  std::stable_sort(incs.begin(), incs.end(),
                   [](const Increment& x, const Increment& y) {
                     const double ex = x.deffect / x.dcost;
                     const double ey = y.deffect / y.dcost;
                     if (ex != ey) return ex > ey;
                     if (x.customer != y.customer) return x.customer < y.customer;
                     return x.step < y.step;
                   });
  std::vector<CouponId> current(n, kControl);
  std::vector<bool> frozen(n, false);
  for (const auto& inc : incs) {
    if (frozen[inc.customer] || current[inc.customer] != inc.from) continue;
    const auto to = static_cast<std::size_t>(inc.to);
    if (consumed + inc.dcost <= budget && count[to] < cap[to]) {
      consumed += inc.dcost;
      if (inc.from != kControl) --count[static_cast<std::size_t>(inc.from)];
      ++count[to];
      current[inc.customer] = inc.to;
    } else {
      frozen[inc.customer] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (current[i] != kControl) a[pihat.customer_ids()[i]] = current[i];
  }
  MckResult res;
  res.objective = sum_effect(a, pihat);
  res.plan = make_plan(std::move(a), cat);

  if (!bounds) {
    double best = res.objective;
    std::size_t bi = 0;
    CouponId bj = kControl;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& c : cat.coupons()) {
        if (c.unit_cost <= budget && pihat.at(i, c.id) > best) {
          best = pihat.at(i, c.id);
          bi = i;
          bj = c.id;
        }
      }
    }
    if (bj != kControl) {
      res.plan = make_plan({{pihat.customer_ids()[bi], bj}}, cat);
      res.objective = best;
    }
  }
  return res;
}

solver::LinearProgram allocation_polytope(const ClusterStats& stats,
                                          const CouponCatalog& cat,
                                          const BudgetConfig& budget_cfg) {
  stats.validate();
  budget_cfg.validate(cat.size());
  if (stats.num_coupons() != cat.size()) {
    throw Error("cluster statistics cover " + std::to_string(stats.num_coupons()) +
                " coupons but the catalog has " + std::to_string(cat.size()));
  }
  const std::size_t K = stats.num_clusters();
  const std::size_t J = cat.size();
  const auto nv = static_cast<Eigen::Index>(K * J);
  auto lp = solver::LinearProgram::nonnegative(nv, 0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 1; j <= J; ++j) {
      lp.var_names.push_back("w_" + std::to_string(k) + "_" + std::to_string(j));
    }
  }
  Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 1; j <= J; ++j) {
      row(stats.index(k, static_cast<CouponId>(j))) =
          cat.cost(static_cast<CouponId>(j));
    }
  }
  lp.add_row(row, budget_cfg.total_budget, "budget");
  for (std::size_t k = 0; k < K; ++k) {
    row.setZero();
    for (std::size_t j = 1; j <= J; ++j) {
      row(stats.index(k, static_cast<CouponId>(j))) = 1.0;
    }
    lp.add_row(row, static_cast<double>(stats.sizes[k]),
               "capacity_" + std::to_string(k));
  }
  if (budget_cfg.bounds) {
    const auto n = static_cast<double>(stats.total_customers());
    double need = 0.0;
    for (const auto& c : cat.coupons()) need += budget_cfg.bounds->lower * n * c.unit_cost;
    if (need > budget_cfg.total_budget * (1.0 + 1e-12) + 1e-9) {
      throw Error("proportion bounds are infeasible at budget " +
                  std::to_string(budget_cfg.total_budget));
    }
    for (std::size_t j = 1; j <= J; ++j) {
      row.setZero();
      for (std::size_t k = 0; k < K; ++k) {
        row(stats.index(k, static_cast<CouponId>(j))) = 1.0;
      }
      lp.add_row(row, budget_cfg.bounds->upper * n, "upper_" + std::to_string(j));
      lp.add_row(-row, -budget_cfg.bounds->lower * n, "lower_" + std::to_string(j));
    }
  }
  return lp;
}

namespace {

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  // Row-major (k, j) order to match ClusterStats::index.
  Eigen::VectorXd v(m.size());
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(k * m.cols() + j) = m(k, j);
  }
  return v;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows,
                          Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index k = 0; k < rows; ++k) {
    for (Eigen::Index j = 0; j < cols; ++j) m(k, j) = v(k * cols + j);
  }
  return m;
}

Eigen::MatrixXd psd_projection(const Eigen::MatrixXd& s) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd p = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (p + p.transpose());
}

}  // namespace

FractionalAllocation solve_mvo(const ClusterStats& stats,
                               const CouponCatalog& cat,
                               const BudgetConfig& budget_cfg, double lambda,
                               const MvoOptions& options) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("lambda must lie in [0, 1]");
  const auto polytope = allocation_polytope(stats, cat, budget_cfg);
  solver::ConcaveQuadratic f;
  f.linear = (1.0 - lambda) * flatten(stats.means);
  f.quadratic = lambda > 0.0 ? Eigen::MatrixXd(lambda * psd_projection(stats.cov))
                             : Eigen::MatrixXd::Zero(polytope.num_vars(),
                                                     polytope.num_vars());
  solver::FrankWolfeResult fw;
  try {
    fw = solver::frank_wolfe(f, polytope, options.max_iter, options.rel_tol);
  } catch (const Error& e) {
    throw Error(std::string("MVO solve failed: ") + e.what());
  }
  FractionalAllocation out;
  out.model = ModelTag::kMvo;
  out.w = unflatten(fw.x, static_cast<Eigen::Index>(stats.num_clusters()),
                    static_cast<Eigen::Index>(cat.size()));
  out.objective = fw.objective;
  out.budget = budget_cfg.total_budget;
  out.iterations = fw.iterations;
  return out;
}

double worst_case_penalty(const Eigen::MatrixXd& w,
                          const Eigen::MatrixXd& stderrs, double alpha,
                          double gamma) {
  if (w.rows() != stderrs.rows() || w.cols() != stderrs.cols()) {
    throw Error("worst_case_penalty: allocation and stderr shapes differ");
  }
  if (gamma <= 0.0 || alpha == 0.0) return 0.0;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      terms.push_back(std::max(0.0, alpha * stderrs(k, j) * w(k, j)));
    }
  }
  std::sort(terms.begin(), terms.end(), std::greater<>());
  const double g = std::min(gamma, static_cast<double>(terms.size()));
  const auto whole = static_cast<std::size_t>(std::floor(g));
  double total = 0.0;
  for (std::size_t t = 0; t < whole; ++t) total += terms[t];
  if (whole < terms.size()) total += (g - static_cast<double>(whole)) * terms[whole];
  return total;
}

solver::LinearProgram robust_program(const ClusterStats& stats,
                                     const CouponCatalog& cat,
                                     const BudgetConfig& budget_cfg,
                                     double alpha, double gamma) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error("alpha must be a nonnegative finite number");
  }
  const double pairs = static_cast<double>(stats.num_clusters() * cat.size());
  if (!(gamma >= 0.0 && gamma <= pairs + 1e-9)) {
    throw Error("gamma must lie in [0, |K x J|]");
  }
  const auto base = allocation_polytope(stats, cat, budget_cfg);
  const Eigen::Index nw = base.num_vars();
  const Eigen::Index n = 2 * nw + 1;
  const Eigen::Index h = nw;
  auto lp = solver::LinearProgram::nonnegative(n, 0);
  lp.var_names = base.var_names;
  lp.var_names.push_back("h");
  for (Eigen::Index t = 0; t < nw; ++t) lp.var_names.push_back("q" + base.var_names[static_cast<std::size_t>(t)].substr(1));
  lp.objective.head(nw) = flatten(stats.means);
  lp.objective(h) = -gamma;
  lp.objective.tail(nw).setConstant(-1.0);
  for (Eigen::Index r = 0; r < base.num_rows(); ++r) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    row.head(nw) = base.constraints.row(r).transpose();
    lp.add_row(row, base.rhs(r), base.row_names[static_cast<std::size_t>(r)]);
  }
  const Eigen::VectorXd d = flatten(stats.stderrs);
  for (Eigen::Index t = 0; t < nw; ++t) {
    const double coef = alpha * d(t);
    if (coef == 0.0) continue;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    row(t) = coef;
    row(h) = -1.0;
    row(nw + 1 + t) = -1.0;
    lp.add_row(row, 0.0, "protect_" + base.var_names[static_cast<std::size_t>(t)].substr(2));
  }
  return lp;
}

FractionalAllocation solve_ro(const ClusterStats& stats,
                              const CouponCatalog& cat,
                              const BudgetConfig& budget_cfg, double alpha,
                              double gamma) {
  const auto lp = robust_program(stats, cat, budget_cfg, alpha, gamma);
  const auto sol = solver::solve_lp(lp);
  if (sol.status != solver::LpStatus::kOptimal) {
    throw Error("robust LP is " + solver::to_string(sol.status) +
                " (check budget against proportion bounds)");
  }
  const Eigen::Index nw = static_cast<Eigen::Index>(stats.num_clusters() * cat.size());
  FractionalAllocation out;
  out.model = ModelTag::kRo;
  out.w = unflatten(sol.x.head(nw), static_cast<Eigen::Index>(stats.num_clusters()),
                    static_cast<Eigen::Index>(cat.size()));
  out.objective = sol.objective;
  out.budget = budget_cfg.total_budget;
  out.iterations = sol.iterations;
  const double nominal = flatten(stats.means).dot(sol.x.head(nw));
  const double direct = nominal - worst_case_penalty(out.w, stats.stderrs, alpha, gamma);
  if (std::abs(direct - out.objective) > 1e-6 * (1.0 + std::abs(out.objective))) {
    throw Error("robust LP failed the strong-duality check: LP objective " +
                std::to_string(out.objective) + " vs worst case " +
                std::to_string(direct));
  }
  return out;
}

Eigen::MatrixXi realized_counts(const FractionalAllocation& w,
                                const CouponCatalog& cat) {
  Eigen::MatrixXi snapped(w.w.rows(), w.w.cols());
  Eigen::MatrixXi floored(w.w.rows(), w.w.cols());
  double cost = 0.0;
  for (Eigen::Index k = 0; k < w.w.rows(); ++k) {
    for (Eigen::Index j = 0; j < w.w.cols(); ++j) {
      const double v = std::max(0.0, w.w(k, j));
      const double r = std::round(v);
      floored(k, j) = static_cast<int>(std::floor(v));
      snapped(k, j) = static_cast<int>(std::abs(v - r) <= 1e-7 ? r : std::floor(v));
      cost += cat.cost(static_cast<CouponId>(j + 1)) * snapped(k, j);
    }
  }
  return cost <= w.budget ? snapped : floored;
}

AllocationPlan realize(const FractionalAllocation& w, const ClusterStats& stats,
                       const CouponCatalog& cat, std::uint64_t seed) {
  const Eigen::MatrixXi counts = realized_counts(w, cat);
  if (counts.rows() != static_cast<Eigen::Index>(stats.num_clusters()) ||
      counts.cols() != static_cast<Eigen::Index>(cat.size())) {
    throw Error("realize: allocation shape does not match clusters x coupons");
  }
  std::map<CustomerId, CouponId> a;
  for (Eigen::Index k = 0; k < counts.rows(); ++k) {
    std::vector<CustomerId> pool = stats.members[static_cast<std::size_t>(k)];
    const auto need = static_cast<std::size_t>(counts.row(k).sum());
    if (need > pool.size()) {
      throw Error("realize: cluster " + std::to_string(k) + " needs " +
                  std::to_string(need) + " customers but has " +
                  std::to_string(pool.size()));
    }
    Rng rng(Rng::derive(seed, "realize", static_cast<std::uint64_t>(k)));
    std::size_t next = 0;
    for (Eigen::Index j = 0; j < counts.cols(); ++j) {
      for (int t = 0; t < counts(k, j); ++t) {
        const std::size_t pick =
            next + static_cast<std::size_t>(rng.uniform_index(pool.size() - next));
        std::swap(pool[next], pool[pick]);
        a[pool[next]] = static_cast<CouponId>(j + 1);
        ++next;
      }
    }
  }
  return make_plan(std::move(a), cat);
}

AllocationPlan random_allocate(const std::vector<CustomerId>& customers,
                               const CouponCatalog& cat, double budget,
                               std::uint64_t seed) {
  std::map<CustomerId, CouponId> a;
  if (cat.size() == 0) return make_plan(std::move(a), cat);
  std::vector<CustomerId> order = customers;
  Rng rng(Rng::derive(seed, "random-allocation"));
  rng.shuffle(order);
  double consumed = 0.0;
  const double cheapest = cat.min_cost();
  for (CustomerId id : order) {
    if (consumed + cheapest > budget) break;
    const auto j = static_cast<CouponId>(1 + rng.uniform_index(cat.size()));
    if (consumed + cat.cost(j) <= budget) {
      a[id] = j;
      consumed += cat.cost(j);
    }
  }
  return make_plan(std::move(a), cat);
}

AllocationPlan random_allocate(const ExperimentDataset& ds,
                               const CouponCatalog& cat, double budget,
                               std::uint64_t seed) {
  std::vector<CustomerId> ids;
  ids.reserve(ds.size());
  for (const auto& r : ds.rows) ids.push_back(r.customer_id);
  return random_allocate(ids, cat, budget, seed);
}

double plan_effect(const AllocationPlan& plan, const CateMatrix& pihat) {
  return sum_effect(plan.assignments, pihat);
}

}  // namespace couponalloc::allocation
