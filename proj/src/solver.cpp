#include "couponalloc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "couponalloc/csv.hpp"

namespace couponalloc::solver {

LinearProgram LinearProgram::nonnegative(Eigen::Index num_vars,
                                         Eigen::Index num_rows) {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(num_vars);
  lp.constraints = Eigen::MatrixXd::Zero(num_rows, num_vars);
  lp.rhs = Eigen::VectorXd::Zero(num_rows);
  lp.lower = Eigen::VectorXd::Zero(num_vars);
  lp.upper = Eigen::VectorXd::Constant(num_vars, kInf);
  return lp;
}

Eigen::Index LinearProgram::add_row(const Eigen::VectorXd& coeffs,
                                    double rhs_value, std::string name) {
  if (coeffs.size() != num_vars()) {
    throw Error("add_row: coefficient vector has wrong length");
  }
  const Eigen::Index m = num_rows();
  constraints.conservativeResize(m + 1, num_vars());
  constraints.row(m) = coeffs.transpose();
  rhs.conservativeResize(m + 1);
  rhs(m) = rhs_value;
  if (!row_names.empty() || !name.empty()) {
    row_names.resize(static_cast<std::size_t>(m));
    row_names.push_back(std::move(name));
  }
  return m;
}

void LinearProgram::validate() const {
  const Eigen::Index n = num_vars();
  const Eigen::Index m = num_rows();
  if (constraints.rows() != m || constraints.cols() != n ||
      lower.size() != n || upper.size() != n) {
    throw Error("linear program has inconsistent dimensions");
  }
  if (!objective.allFinite() || !constraints.allFinite() || !rhs.allFinite()) {
    throw Error("linear program has non-finite data");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) ||
        lower(j) == kInf || upper(j) == -kInf) {
      throw Error("variable " + std::to_string(j) + " has invalid bounds");
    }
  }
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

enum class VarKind { kShift, kReflect, kFree };

struct StandardForm {
  // maximize c'z  s.t.  A z <= b,  z >= 0
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<VarKind> kind;
  std::vector<Eigen::Index> column;  // first standard column of each var
  Eigen::Index original_rows = 0;
};

StandardForm to_standard(const LinearProgram& lp) {
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index m = lp.num_rows();
  StandardForm sf;
  sf.original_rows = m;
  std::vector<Eigen::Index> upper_rows;
  Eigen::Index cols = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lp.lower(j));
    const bool hi = std::isfinite(lp.upper(j));
    sf.column.push_back(cols);
    if (lo) {
      sf.kind.push_back(VarKind::kShift);
      if (hi) upper_rows.push_back(j);
      cols += 1;
    } else if (hi) {
      sf.kind.push_back(VarKind::kReflect);
      cols += 1;
    } else {
      sf.kind.push_back(VarKind::kFree);
      cols += 2;
    }
  }
  const Eigen::Index rows = m + static_cast<Eigen::Index>(upper_rows.size());
  sf.a = Eigen::MatrixXd::Zero(rows, cols);
  sf.b = Eigen::VectorXd::Zero(rows);
  sf.c = Eigen::VectorXd::Zero(cols);
  sf.b.head(m) = lp.rhs;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index col = sf.column[static_cast<std::size_t>(j)];
    switch (sf.kind[static_cast<std::size_t>(j)]) {
      case VarKind::kShift:
        sf.a.block(0, col, m, 1) = lp.constraints.col(j);
        sf.c(col) = lp.objective(j);
        sf.b.head(m) -= lp.constraints.col(j) * lp.lower(j);
        break;
      case VarKind::kReflect:
        sf.a.block(0, col, m, 1) = -lp.constraints.col(j);
        sf.c(col) = -lp.objective(j);
        sf.b.head(m) -= lp.constraints.col(j) * lp.upper(j);
        break;
      case VarKind::kFree:
        sf.a.block(0, col, m, 1) = lp.constraints.col(j);
        sf.a.block(0, col + 1, m, 1) = -lp.constraints.col(j);
        sf.c(col) = lp.objective(j);
        sf.c(col + 1) = -lp.objective(j);
        break;
    }
  }
  for (std::size_t r = 0; r < upper_rows.size(); ++r) {
    const Eigen::Index j = upper_rows[r];
    const Eigen::Index row = m + static_cast<Eigen::Index>(r);
    sf.a(row, sf.column[static_cast<std::size_t>(j)]) = 1.0;
    sf.b(row) = lp.upper(j) - lp.lower(j);
  }
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf, const LpTolerances& tol)
      : tol_(tol),
        m_(sf.a.rows()),
        nstruct_(sf.a.cols()),
        nslack_(sf.a.rows()) {
    std::vector<Eigen::Index> art_rows;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (sf.b(i) < 0) art_rows.push_back(i);
    }
    nart_ = static_cast<Eigen::Index>(art_rows.size());
    ncols_ = nstruct_ + nslack_ + nart_;
    width_ = ncols_ + 1;
    t_.assign(static_cast<std::size_t>((m_ + 1) * width_), 0.0);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    live_.assign(static_cast<std::size_t>(m_), true);
    Eigen::Index next_art = nstruct_ + nslack_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = sf.b(i) < 0 ? -1.0 : 1.0;
      for (Eigen::Index j = 0; j < nstruct_; ++j) at(i, j) = sign * sf.a(i, j);
      at(i, nstruct_ + i) = sign;
      at(i, ncols_) = sign * sf.b(i);
      if (sign < 0) {
        at(i, next_art) = 1.0;
        basis_[static_cast<std::size_t>(i)] = next_art++;
      } else {
        basis_[static_cast<std::size_t>(i)] = nstruct_ + i;
      }
    }
    costs_ = Eigen::VectorXd::Zero(ncols_);
    for (Eigen::Index j = 0; j < nstruct_; ++j) costs_(j) = -sf.c(j);
  }

  // Returns false if phase I proves infeasibility.
  bool phase_one(int& iterations) {
    if (nart_ == 0) return true;
    Eigen::VectorXd phase_costs = Eigen::VectorXd::Zero(ncols_);
    for (Eigen::Index j = nstruct_ + nslack_; j < ncols_; ++j) {
      phase_costs(j) = 1.0;
    }
    load_objective(phase_costs);
    const auto status = run(iterations, /*allow_artificial=*/true);
    (void)status;  // phase I is bounded below by zero
    double infeasibility = 0.0;
    double scale = 1.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      scale = std::max(scale, std::abs(at(i, ncols_)));
      if (is_artificial(basis_[static_cast<std::size_t>(i)])) {
        infeasibility += std::max(0.0, at(i, ncols_));
      }
    }
    if (infeasibility > tol_.feasibility * scale) return false;
    // Drive remaining artificials out of the basis.
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      Eigen::Index col = -1;
      double best = tol_.pivot;
      for (Eigen::Index j = 0; j < nstruct_ + nslack_; ++j) {
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        live_[static_cast<std::size_t>(i)] = false;
      }
    }
    return true;
  }

  LpStatus phase_two(int& iterations) {
    load_objective(costs_);
    return run(iterations, /*allow_artificial=*/false);
  }

  const std::vector<Eigen::Index>& basis() const { return basis_; }
  const std::vector<bool>& live() const { return live_; }
  double rhs(Eigen::Index i) const { return t_[idx(i, ncols_)]; }
  Eigen::Index num_standard_columns() const { return nstruct_ + nslack_; }

 private:
  std::size_t idx(Eigen::Index i, Eigen::Index j) const {
    return static_cast<std::size_t>(i * width_ + j);
  }
  double& at(Eigen::Index i, Eigen::Index j) { return t_[idx(i, j)]; }
  double at(Eigen::Index i, Eigen::Index j) const { return t_[idx(i, j)]; }
  bool is_artificial(Eigen::Index col) const {
    return col >= nstruct_ + nslack_;
  }

  void load_objective(const Eigen::VectorXd& costs) {
    for (Eigen::Index j = 0; j <= ncols_; ++j) {
      at(m_, j) = j < ncols_ ? costs(j) : 0.0;
    }
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!live_[static_cast<std::size_t>(i)]) continue;
      const double cb = costs(basis_[static_cast<std::size_t>(i)]);
      if (cb == 0.0) continue;
      for (Eigen::Index j = 0; j <= ncols_; ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const double inv = 1.0 / at(r, c);
    for (Eigen::Index j = 0; j <= ncols_; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    const double* prow = &t_[idx(r, 0)];
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      double* row = &t_[idx(i, 0)];
      for (Eigen::Index j = 0; j <= ncols_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  LpStatus run(int& iterations, bool allow_artificial) {
    const Eigen::Index limit_cols =
        allow_artificial ? ncols_ : nstruct_ + nslack_;
    const int bland_after = static_cast<int>(2 * (m_ + limit_cols));
    const int guard = 50 * static_cast<int>(m_ + limit_cols) + 1000;
    int phase_iters = 0;
    while (true) {
      const bool bland = phase_iters >= bland_after;
      Eigen::Index enter = -1;
      double best = -tol_.optimality;
      for (Eigen::Index j = 0; j < limit_cols; ++j) {
        const double rc = at(m_, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;

      Eigen::Index leave = -1;
      double best_ratio = kInf;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (!live_[static_cast<std::size_t>(i)]) continue;
        const double a = at(i, enter);
        if (a <= tol_.pivot) continue;
        const double ratio = std::max(0.0, at(i, ncols_)) / a;
        if (leave < 0 || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
          const bool better =
              bland ? basis_[static_cast<std::size_t>(i)] <
                          basis_[static_cast<std::size_t>(leave)]
                    : a > at(leave, enter);
          if (better) {
            leave = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      pivot(leave, enter);
      ++iterations;
      if (++phase_iters > guard) {
        throw Error("simplex: iteration guard exceeded after " +
                    std::to_string(iterations) + " iterations");
      }
    }
  }

  LpTolerances tol_;
  Eigen::Index m_, nstruct_, nslack_, nart_ = 0, ncols_ = 0, width_ = 0;
  std::vector<double> t_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> live_;
  Eigen::VectorXd costs_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol) {
  lp.validate();
  const StandardForm sf = to_standard(lp);
  Tableau tab(sf, tol);
  LpSolution sol;
  if (!tab.phase_one(sol.iterations)) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }
  sol.status = tab.phase_two(sol.iterations);
  if (sol.status != LpStatus::kOptimal) return sol;

  // Re-solve the optimal basis against [A | I] for accurate primal and dual
  // values.
  const Eigen::Index m = sf.a.rows();
  const Eigen::Index nstd = sf.a.cols();
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!tab.live()[static_cast<std::size_t>(i)]) continue;
    rows.push_back(i);
    cols.push_back(tab.basis()[static_cast<std::size_t>(i)]);
  }
  const auto k = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd basis_cost = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd b_live(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    b_live(r) = sf.b(rows[static_cast<std::size_t>(r)]);
    const Eigen::Index col = cols[static_cast<std::size_t>(r)];
    for (Eigen::Index q = 0; q < k; ++q) {
      const Eigen::Index row = rows[static_cast<std::size_t>(q)];
      basis_matrix(q, r) =
          col < nstd ? sf.a(row, col) : (col - nstd == row ? 1.0 : 0.0);
    }
    if (col < nstd) basis_cost(r) = sf.c(col);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nstd);
  Eigen::VectorXd y_std = Eigen::VectorXd::Zero(m);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
  Eigen::VectorXd xb = lu.solve(b_live);
  const double scale = 1.0 + sf.b.cwiseAbs().maxCoeff();
  bool refined_ok = xb.allFinite() && xb.minCoeff() >= -tol.feasibility * scale;
  if (!refined_ok) {
    for (Eigen::Index r = 0; r < k; ++r) {
      xb(r) = tab.rhs(rows[static_cast<std::size_t>(r)]);
    }
  }
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index col = cols[static_cast<std::size_t>(r)];
    if (col < nstd) z(col) = std::max(0.0, xb(r));
  }
  const Eigen::VectorXd y_live = lu.transpose().solve(basis_cost);
  for (Eigen::Index r = 0; r < k; ++r) {
    y_std(rows[static_cast<std::size_t>(r)]) = y_live(r);
  }

  const Eigen::Index n = lp.num_vars();
  sol.x.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index col = sf.column[static_cast<std::size_t>(j)];
    switch (sf.kind[static_cast<std::size_t>(j)]) {
      case VarKind::kShift:
        sol.x(j) = std::min(lp.lower(j) + z(col), lp.upper(j));
        break;
      case VarKind::kReflect:
        sol.x(j) = lp.upper(j) - z(col);
        break;
      case VarKind::kFree:
        sol.x(j) = z(col) - z(col + 1);
        break;
    }
  }
  sol.duals = y_std.head(sf.original_rows).cwiseMax(0.0);
  sol.reduced_costs = lp.objective - lp.constraints.transpose() * sol.duals;
  sol.objective = lp.objective.dot(sol.x);
  return sol;
}

KktReport check_kkt(const LinearProgram& lp, const LpSolution& sol) {
  KktReport rep;
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index m = lp.num_rows();
  if (sol.x.size() != n || sol.duals.size() != m) {
    rep.primal_residual = rep.dual_residual = rep.gap = kInf;
    return rep;
  }
  const Eigen::VectorXd ax = lp.constraints * sol.x;
  for (Eigen::Index i = 0; i < m; ++i) {
    rep.primal_residual =
        std::max(rep.primal_residual,
                 std::max(0.0, ax(i) - lp.rhs(i)) / (1.0 + std::abs(lp.rhs(i))));
    rep.dual_residual = std::max(rep.dual_residual, std::max(0.0, -sol.duals(i)));
  }
  const Eigen::VectorXd d = lp.objective - lp.constraints.transpose() * sol.duals;
  double dual_obj = lp.rhs.dot(sol.duals);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = lp.lower(j);
    const double hi = lp.upper(j);
    const double x = sol.x(j);
    if (std::isfinite(lo)) {
      rep.primal_residual = std::max(rep.primal_residual,
                                     std::max(0.0, lo - x) / (1.0 + std::abs(lo)));
    }
    if (std::isfinite(hi)) {
      rep.primal_residual = std::max(rep.primal_residual,
                                     std::max(0.0, x - hi) / (1.0 + std::abs(hi)));
    }
    if (d(j) > 0.0) {
      if (std::isfinite(hi)) {
        dual_obj += d(j) * hi;
      } else {
        rep.dual_residual = std::max(rep.dual_residual, d(j));
      }
    } else if (d(j) < 0.0) {
      if (std::isfinite(lo)) {
        dual_obj += d(j) * lo;
      } else {
        rep.dual_residual = std::max(rep.dual_residual, -d(j));
      }
    }
  }
  const double primal_obj = lp.objective.dot(sol.x);
  rep.gap = std::abs(dual_obj - primal_obj) / (1.0 + std::abs(primal_obj));
  return rep;
}

std::string lp_listing(const LinearProgram& lp) {
  using csv::format_double;
  std::ostringstream out;
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index m = lp.num_rows();
  auto var = [&](Eigen::Index j) {
    return static_cast<std::size_t>(j) < lp.var_names.size() &&
                   !lp.var_names[static_cast<std::size_t>(j)].empty()
               ? lp.var_names[static_cast<std::size_t>(j)]
               : "x" + std::to_string(j);
  };
  auto row = [&](Eigen::Index i) {
    return static_cast<std::size_t>(i) < lp.row_names.size() &&
                   !lp.row_names[static_cast<std::size_t>(i)].empty()
               ? lp.row_names[static_cast<std::size_t>(i)]
               : "r" + std::to_string(i);
  };
  out << "NAME LP VARS " << n << " ROWS " << m << "\n";
  out << "OBJECTIVE MAX\n";
  for (Eigen::Index j = 0; j < n; ++j) {
    if (lp.objective(j) != 0.0) {
      out << "  " << var(j) << " " << format_double(lp.objective(j)) << "\n";
    }
  }
  out << "ROWS\n";
  for (Eigen::Index i = 0; i < m; ++i) {
    out << "  " << row(i) << ":";
    for (Eigen::Index j = 0; j < n; ++j) {
      if (lp.constraints(i, j) != 0.0) {
        out << " " << format_double(lp.constraints(i, j)) << "*" << var(j);
      }
    }
    out << " <= " << format_double(lp.rhs(i)) << "\n";
  }
  out << "BOUNDS\n";
  for (Eigen::Index j = 0; j < n; ++j) {
    out << "  " << var(j) << " " << format_double(lp.lower(j)) << " "
        << format_double(lp.upper(j)) << "\n";
  }
  out << "END\n";
  return out.str();
}

void ConcaveQuadratic::check_concave() const {
  if (quadratic.rows() != linear.size() || quadratic.cols() != linear.size()) {
    throw Error("quadratic objective has inconsistent dimensions");
  }
  if (linear.size() == 0) return;
  const double scale = std::max(1.0, quadratic.cwiseAbs().maxCoeff());
  if ((quadratic - quadratic.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * scale) {
    throw Error("quadratic term is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      quadratic, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
    throw Error("objective is not concave: quadratic term has eigenvalue " +
                std::to_string(es.eigenvalues().minCoeff()));
  }
}

namespace {

Eigen::VectorXd lp_vertex(const LinearProgram& polytope,
                          const Eigen::VectorXd& direction,
                          const LpTolerances& tol) {
  LinearProgram lp = polytope;
  lp.objective = direction;
  const LpSolution sol = solve_lp(lp, tol);
  if (sol.status != LpStatus::kOptimal) {
    throw Error("Frank-Wolfe linear oracle returned " + to_string(sol.status));
  }
  return sol.x;
}

bool same_vertex(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = 1.0 + std::max(a.cwiseAbs().maxCoeff(),
                                      b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() <= 1e-9 * scale;
}

}  // namespace

FrankWolfeResult frank_wolfe(const ConcaveQuadratic& f,
                             const LinearProgram& polytope, int max_iter,
                             double rel_tol, const LpTolerances& lp_tol) {
  f.check_concave();
  if (f.linear.size() != polytope.num_vars()) {
    throw Error("Frank-Wolfe: objective and polytope dimensions differ");
  }
  FrankWolfeResult res;
  struct Atom {
    Eigen::VectorXd v;
    double weight;
  };
  std::vector<Atom> active;
  active.push_back({lp_vertex(polytope, f.linear, lp_tol), 1.0});
  Eigen::VectorXd x = active.front().v;

  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    const Eigen::VectorXd g = f.gradient(x);
    const double fx = f.value(x);
    res.trace.push_back(fx);
    const Eigen::VectorXd s = lp_vertex(polytope, g, lp_tol);
    const Eigen::VectorXd d_fw = s - x;
    const double gap = std::max(0.0, g.dot(d_fw));
    res.gap = gap;
    if (gap <= rel_tol * (1.0 + std::abs(fx))) {
      res.converged = true;
      break;
    }
    std::size_t away = 0;
    for (std::size_t a = 1; a < active.size(); ++a) {
      if (g.dot(active[a].v) < g.dot(active[away].v)) away = a;
    }
    const Eigen::VectorXd d_away = x - active[away].v;
    const bool fw_step = active.size() == 1 || gap >= g.dot(d_away);
    const Eigen::VectorXd& d = fw_step ? d_fw : d_away;
    double gamma_max = 1.0;
    if (!fw_step) {
      const double w = active[away].weight;
      gamma_max = w / (1.0 - w);
    }
    const double slope = g.dot(d);
    const double curvature = d.dot(f.quadratic * d);
    double gamma = gamma_max;
    if (curvature > 0.0) gamma = std::min(gamma_max, slope / (2.0 * curvature));
    gamma = std::max(0.0, gamma);

    if (fw_step) {
      if (gamma >= 1.0) {
        active.assign(1, {s, 1.0});
        x = s;
      } else {
        for (auto& atom : active) atom.weight *= (1.0 - gamma);
        bool merged = false;
        for (auto& atom : active) {
          if (same_vertex(atom.v, s)) {
            atom.weight += gamma;
            merged = true;
            break;
          }
        }
        if (!merged) active.push_back({s, gamma});
        x += gamma * d_fw;
      }
    } else {
      for (auto& atom : active) atom.weight *= (1.0 + gamma);
      active[away].weight -= gamma;
      x += gamma * d_away;
      if (gamma >= gamma_max || active[away].weight <= 1e-15) {
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(away));
        // Rebuild x from the atoms to stop drift after drop steps.
        double total = 0.0;
        for (const auto& atom : active) total += atom.weight;
        x.setZero();
        for (auto& atom : active) {
          atom.weight /= total;
          x += atom.weight * atom.v;
        }
      }
    }
  }
  res.x = x;
  res.objective = f.value(x);
  return res;
}

}  // namespace couponalloc::solver
