#include "couponalloc/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace couponalloc::segmentation {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

double data_scale(const Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const double var =
      (x.rowwise() - mu).array().square().sum() /
      static_cast<double>(std::max<Eigen::Index>(1, x.rows() * x.cols()));
  return var > 0.0 ? var : 1.0;
}

void regularize(Eigen::MatrixXd& cov, double reg, double fallback_scale) {
  const double mean_diag = cov.diagonal().mean();
  const double eps = reg * (mean_diag > 0.0 ? mean_diag : fallback_scale);
  cov.diagonal().array() += eps;
  cov = 0.5 * (cov + cov.transpose()).eval();
}

// Returns the per-row mean log-likelihood for the given responsibilities'
// source parameters and fills resp.
double e_step(const GmmModel& m, const Eigen::MatrixXd& x,
              Eigen::MatrixXd& resp) {
  resp = m.weighted_log_density(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < resp.rows(); ++i) {
    const double lse = log_sum_exp(resp.row(i));
    total += lse;
    resp.row(i) = (resp.row(i).array() - lse).exp();
  }
  return total / static_cast<double>(x.rows());
}

void m_step(GmmModel& m, const Eigen::MatrixXd& x, const Eigen::MatrixXd& resp,
            double reg, double scale) {
  const double n = static_cast<double>(x.rows());
  for (std::size_t k = 0; k < m.components.size(); ++k) {
    auto& c = m.components[k];
    const auto kk = static_cast<Eigen::Index>(k);
    const double nk = resp.col(kk).sum();
    c.weight = nk / n;
    if (nk <= 1e-12 * n) continue;  // vanished component keeps its shape
    c.mean = (x.transpose() * resp.col(kk)) / nk;
    const Eigen::MatrixXd centered = x.rowwise() - c.mean.transpose();
    c.cov = (centered.transpose() *
             (centered.array().colwise() * resp.col(kk).array()).matrix()) /
            nk;
    regularize(c.cov, reg, scale);
  }
}

GmmModel seed_model(const Eigen::MatrixXd& x, std::size_t K, Rng& rng,
                    double reg, double scale) {
  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> centers;
  centers.push_back(static_cast<Eigen::Index>(rng.uniform_index(
      static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2 =
      (x.rowwise() - x.row(centers[0])).rowwise().squaredNorm();
  while (centers.size() < K) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= d2(i);
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.uniform_index(
          static_cast<std::uint64_t>(n)));
    }
    centers.push_back(pick);
    d2 = d2.cwiseMin(
        (x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  // Hard nearest-center responsibilities, then one M-step.
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(K));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      const double d = (x.row(i) - x.row(centers[k])).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<Eigen::Index>(k);
      }
    }
    resp(i, best) = 1.0;
  }
  GmmModel m;
  const Eigen::RowVectorXd mu = x.colwise().mean();
  Eigen::MatrixXd global = (x.rowwise() - mu).transpose() * (x.rowwise() - mu) /
                           static_cast<double>(n);
  regularize(global, reg, scale);
  for (std::size_t k = 0; k < K; ++k) {
    m.components.push_back(
        {1.0 / static_cast<double>(K), x.row(centers[k]).transpose(), global});
  }
  m_step(m, x, resp, reg, scale);
  // Components that captured nothing keep the global shape with a small
  // weight so every component stays usable.
  double wsum = 0.0;
  for (auto& c : m.components) {
    c.weight = std::max(c.weight, 1.0 / static_cast<double>(n));
    wsum += c.weight;
  }
  for (auto& c : m.components) c.weight /= wsum;
  return m;
}

}  // namespace

Eigen::MatrixXd GmmModel::weighted_log_density(const Eigen::MatrixXd& x) const {
  const Eigen::Index n = x.rows();
  const auto d = static_cast<double>(x.cols());
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(components.size()));
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& c = components[k];
    const Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    if (llt.info() != Eigen::Success) {
      throw Error("GMM component " + std::to_string(k) +
                  " covariance is not positive definite");
    }
    const double logdet =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const Eigen::MatrixXd centered =
        (x.rowwise() - c.mean.transpose()).transpose();
    const Eigen::MatrixXd z = llt.matrixL().solve(centered);
    const double logw = c.weight > 0.0 ? std::log(c.weight)
                                       : -std::numeric_limits<double>::infinity();
    out.col(static_cast<Eigen::Index>(k)) =
        (logw - 0.5 * (d * kLog2Pi + logdet)) -
        0.5 * z.colwise().squaredNorm().transpose().array();
  }
  return out;
}

Eigen::MatrixXd GmmModel::responsibilities(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd r = weighted_log_density(x);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const double lse = log_sum_exp(r.row(i));
    r.row(i) = (r.row(i).array() - lse).exp();
  }
  return r;
}

GmmModel fit_gmm(const Eigen::MatrixXd& x, std::size_t K, std::uint64_t seed,
                 const GmmOptions& options) {
  if (K == 0) throw Error("fit_gmm: K must be at least 1");
  if (static_cast<Eigen::Index>(K) > x.rows()) {
    throw Error("fit_gmm: K = " + std::to_string(K) + " exceeds the " +
                std::to_string(x.rows()) + " available rows");
  }
  if (!x.allFinite()) throw Error("fit_gmm: non-finite input");
  const double scale = data_scale(x);
  GmmModel best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Rng rng(Rng::derive(seed, "gmm-init", static_cast<std::uint64_t>(r)));
    GmmModel m = seed_model(x, K, rng, options.reg, scale);
    Eigen::MatrixXd resp;
    double prev = e_step(m, x, resp);
    for (int it = 0; it < options.max_iter; ++it) {
      GmmModel next = m;
      m_step(next, x, resp, options.reg, scale);
      Eigen::MatrixXd next_resp;
      const double ll = e_step(next, x, next_resp);
      m = std::move(next);
      resp = std::move(next_resp);
      m.log_likelihood.push_back(ll);
      m.iterations = it + 1;
      const double change = std::abs(ll - prev);
      prev = ll;
      if (change < options.tol * std::max(std::abs(ll), 1e-12)) {
        m.converged = true;
        break;
      }
    }
    const double final_ll =
        m.log_likelihood.empty() ? prev : m.log_likelihood.back();
    if (final_ll > best_ll) {
      best_ll = final_ll;
      best = std::move(m);
    }
  }
  return best;
}

GmmModel fit_gmm(const CateMatrix& cate, std::size_t K, std::uint64_t seed,
                 const GmmOptions& options) {
  return fit_gmm(cate.values(), K, seed, options);
}

std::vector<std::size_t> Assignment::sizes() const {
  std::vector<std::size_t> s(num_clusters, 0);
  for (int k : cluster) ++s.at(static_cast<std::size_t>(k));
  return s;
}

Assignment assign_clusters(const GmmModel& model, const CateMatrix& cate) {
  if (model.dim() != cate.coupons()) {
    throw Error("assign_clusters: model has dimension " +
                std::to_string(model.dim()) + " but CATE matrix has " +
                std::to_string(cate.coupons()) + " coupons");
  }
  const Eigen::MatrixXd logp = model.weighted_log_density(cate.values());
  Assignment a;
  a.customer_ids = cate.customer_ids();
  a.num_clusters = model.num_components();
  a.cluster.resize(cate.customers());
  for (Eigen::Index i = 0; i < logp.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < logp.cols(); ++k) {
      if (logp(i, k) > logp(i, best)) best = k;
    }
    a.cluster[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return a;
}

Assignment compact(const Assignment& a) {
  const auto sizes = a.sizes();
  std::vector<int> remap(sizes.size(), -1);
  int next = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] > 0) remap[k] = next++;
  }
  Assignment out = a;
  out.num_clusters = static_cast<std::size_t>(next);
  for (auto& k : out.cluster) k = remap[static_cast<std::size_t>(k)];
  return out;
}

std::size_t ClusterStats::total_customers() const {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  return n;
}

void ClusterStats::validate() const {
  const auto K = static_cast<Eigen::Index>(sizes.size());
  if (means.rows() != K || stderrs.rows() != K ||
      stderrs.cols() != means.cols() ||
      cov.rows() != K * means.cols() || cov.cols() != cov.rows()) {
    throw Error("cluster statistics have inconsistent dimensions");
  }
  for (auto s : sizes) {
    if (s == 0) throw Error("cluster statistics contain an empty cluster");
  }
  if (!means.allFinite() || !stderrs.allFinite() || !cov.allFinite()) {
    throw Error("cluster statistics contain non-finite values");
  }
  if ((stderrs.array() < 0.0).any()) {
    throw Error("cluster statistics contain a negative standard error");
  }
}

ClusterStats cluster_stats(const CateMatrix& cate, const Assignment& assignment,
                           int n_bootstrap, std::uint64_t seed) {
  if (assignment.size() != cate.customers()) {
    throw Error("cluster_stats: assignment covers " +
                std::to_string(assignment.size()) + " customers, CATE matrix has " +
                std::to_string(cate.customers()));
  }
  if (n_bootstrap < 2) throw Error("cluster_stats: need at least 2 bootstrap replicates");
  const std::size_t K = assignment.num_clusters;
  const auto J = static_cast<Eigen::Index>(cate.coupons());
  const Eigen::MatrixXd& v = cate.values();
  ClusterStats st;
  st.assignment = assignment;
  st.sizes = assignment.sizes();
  st.members.assign(K, {});
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    st.members[static_cast<std::size_t>(assignment.cluster[i])].push_back(
        cate.customer_ids()[i]);
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (st.sizes[k] == 0) {
      throw Error("cluster_stats: cluster " + std::to_string(k) + " is empty");
    }
  }
  const auto Ki = static_cast<Eigen::Index>(K);
  st.means = Eigen::MatrixXd::Zero(Ki, J);
  st.stderrs = Eigen::MatrixXd::Zero(Ki, J);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    st.means.row(assignment.cluster[i]) += v.row(static_cast<Eigen::Index>(i));
  }
  for (Eigen::Index k = 0; k < Ki; ++k) {
    st.means.row(k) /= static_cast<double>(st.sizes[static_cast<std::size_t>(k)]);
  }
  Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(Ki, J);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int k = assignment.cluster[i];
    ss.row(k) += (v.row(static_cast<Eigen::Index>(i)) - st.means.row(k))
                     .array()
                     .square()
                     .matrix();
  }
  for (Eigen::Index k = 0; k < Ki; ++k) {
    const auto n = static_cast<double>(st.sizes[static_cast<std::size_t>(k)]);
    if (n > 1.0) {
      st.stderrs.row(k) = (ss.row(k).array() / (n - 1.0)).sqrt() / std::sqrt(n);
    }
  }

  // Bootstrap over the full customer set with cluster labels held fixed.
  const Eigen::Index dim = Ki * J;
  const auto n = static_cast<std::uint64_t>(assignment.size());
  Rng rng(Rng::derive(seed, "bootstrap"));
  Eigen::MatrixXd reps(n_bootstrap, dim);
  Eigen::MatrixXd sums(Ki, J);
  std::vector<std::size_t> counts(K);
  for (int r = 0; r < n_bootstrap; ++r) {
    sums.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t t = 0; t < n; ++t) {
      const auto i = rng.uniform_index(n);
      const int k = assignment.cluster[i];
      sums.row(k) += v.row(static_cast<Eigen::Index>(i));
      ++counts[static_cast<std::size_t>(k)];
    }
    for (Eigen::Index k = 0; k < Ki; ++k) {
      const auto c = counts[static_cast<std::size_t>(k)];
      for (Eigen::Index j = 0; j < J; ++j) {
        reps(r, k * J + j) =
            c > 0 ? sums(k, j) / static_cast<double>(c) : st.means(k, j);
      }
    }
  }
  const Eigen::RowVectorXd mu = reps.colwise().mean();
  const Eigen::MatrixXd centered = reps.rowwise() - mu;
  st.cov = centered.transpose() * centered / static_cast<double>(n_bootstrap - 1);
  st.cov = 0.5 * (st.cov + st.cov.transpose()).eval();
  return st;
}

UpliftTable table2_report(const ClusterStats& stats, const ExperimentDataset& ds,
                          double p) {
  std::unordered_map<CustomerId, std::size_t> row_of;
  row_of.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) row_of[ds.rows[i].customer_id] = i;
  const auto K = static_cast<Eigen::Index>(stats.num_clusters());
  const auto J = static_cast<Eigen::Index>(stats.num_coupons());
  UpliftTable t;
  t.sizes = stats.sizes;
  t.mean = Eigen::MatrixXd::Zero(K, J);
  t.stderr_ = Eigen::MatrixXd::Zero(K, J);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& members = stats.members[static_cast<std::size_t>(k)];
    const auto n = static_cast<double>(members.size());
    for (Eigen::Index j = 0; j < J; ++j) {
      double sum = 0.0, sq = 0.0;
      for (CustomerId id : members) {
        const auto it = row_of.find(id);
        if (it == row_of.end()) {
          throw Error("table2_report: customer " + std::to_string(id) +
                      " is not in the dataset");
        }
        const auto& row = ds.rows[it->second];
        const double term = transformed_outcome(row.arm == j + 1, p, row.outcome);
        sum += term;
        sq += term * term;
      }
      const double mean = sum / n;
      t.mean(k, j) = mean;
      if (n > 1.0) {
        const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
        t.stderr_(k, j) = std::sqrt(var / n);
      }
    }
  }
  return t;
}

std::string UpliftTable::to_text(const CouponCatalog& cat, double scale) const {
  std::ostringstream out;
  char buf[64];
  out << "cluster\tsize";
  for (const auto& c : cat.coupons()) out << "\t" << c.label;
  out << "\n";
  for (Eigen::Index k = 0; k < mean.rows(); ++k) {
    out << k << "\t" << sizes[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < mean.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "\t%.2f (\xC2\xB1%.2f)", mean(k, j) / scale,
                    stderr_(k, j) / scale);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace couponalloc::segmentation
