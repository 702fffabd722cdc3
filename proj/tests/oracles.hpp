#pragma once

// Independent reference computations used only by tests. None of these call
// into the library's solvers.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

struct LpResult {
  bool feasible = false;
  double objective = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
};

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// max c'x s.t. A x <= b, x >= 0, by enumerating every basis of [A | I].
// Assumes the feasible region is bounded.
inline LpResult enumerate_vertices(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& b) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  Eigen::MatrixXd full(m, n + m);
  full << a, Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  cost.head(n) = c;
  LpResult best;
  std::vector<int> pick(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pick[static_cast<std::size_t>(i)] = i;
  if (m == 0) {
    best.feasible = true;
    best.objective = 0.0;
    best.x = Eigen::VectorXd::Zero(n);
    return best;
  }
  while (true) {
    Eigen::MatrixXd basis(m, m);
    for (int r = 0; r < m; ++r) basis.col(r) = full.col(pick[static_cast<std::size_t>(r)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(b);
      if ((basis * xb - b).cwiseAbs().maxCoeff() < 1e-9 * (1 + b.cwiseAbs().maxCoeff()) &&
          xb.minCoeff() >= -1e-9) {
        double obj = 0.0;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int r = 0; r < m; ++r) {
          const int col = pick[static_cast<std::size_t>(r)];
          obj += cost(col) * xb(r);
          if (col < n) x(col) = xb(r);
        }
        if (!best.feasible || obj > best.objective) {
          best.feasible = true;
          best.objective = obj;
          best.x = x;
        }
      }
    }
    int i = m - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < m; ++k) pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
  }
  return best;
}

// max over subsets S with |S| <= gamma (integer) of sum_{s in S} t_s, walking
// all 2^n subsets in Gray-code order.
inline double subset_penalty(const std::vector<double>& t, int gamma) {
  const int n = static_cast<int>(t.size());
  double sum = 0.0, best = 0.0;
  int size = 0;
  std::uint64_t code = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int bit = __builtin_ctzll(step);
    code ^= std::uint64_t{1} << bit;
    if (code & (std::uint64_t{1} << bit)) {
      sum += t[static_cast<std::size_t>(bit)];
      ++size;
    } else {
      sum -= t[static_cast<std::size_t>(bit)];
      --size;
    }
    if (size <= gamma) best = std::max(best, sum);
  }
  return best;
}

// Exhaustive multiple-choice knapsack: every customer takes one of
// {none, 1..J}. Returns the best total effect within budget.
inline double mck_brute_force(const Eigen::MatrixXd& pihat, const std::vector<double>& cost,
                              double budget) {
  const int n = static_cast<int>(pihat.rows());
  const int J = static_cast<int>(pihat.cols());
  std::vector<int> choice(static_cast<std::size_t>(n), 0);
  double best = 0.0;
  while (true) {
    double c = 0.0, v = 0.0;
    for (int i = 0; i < n; ++i) {
      const int j = choice[static_cast<std::size_t>(i)];
      if (j > 0) {
        c += cost[static_cast<std::size_t>(j - 1)];
        v += pihat(i, j - 1);
      }
    }
    if (c <= budget + 1e-9) best = std::max(best, v);
    int i = 0;
    while (i < n && choice[static_cast<std::size_t>(i)] == J) choice[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
    ++choice[static_cast<std::size_t>(i)];
  }
  return best;
}

}  // namespace oracle
