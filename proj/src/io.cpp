#include "couponalloc/io.hpp"

#include <fstream>
#include <sstream>

#include "couponalloc/csv.hpp"

namespace couponalloc::io {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_dataset(const ExperimentDataset& ds, const fs::path& path) {
  std::vector<std::string> header{"customer_id"};
  for (std::size_t f = 0; f < ds.feature_dim(); ++f) header.push_back("f" + std::to_string(f));
  header.push_back("arm");
  header.push_back("outcome");
  csv::Writer w(header);
  for (const auto& r : ds.rows) {
    w.cell(r.customer_id);
    for (double x : r.features) w.cell(x);
    w.cell(r.arm).cell(r.outcome);
    w.end_row();
  }
  write_text(path, w.text());
}

ExperimentDataset load_dataset(const fs::path& path, double arm_probability) {
  const auto t = csv::Table::read(path);
  const auto id_col = t.column("customer_id");
  const auto arm_col = t.column("arm");
  const auto y_col = t.column("outcome");
  std::vector<std::size_t> feature_cols;
  for (std::size_t f = 0;; ++f) {
    const std::string name = "f" + std::to_string(f);
    if (!t.has_column(name)) break;
    feature_cols.push_back(t.column(name));
  }
  ExperimentDataset ds;
  ds.arm_probability = arm_probability;
  ds.rows.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    ExperimentRow row;
    row.customer_id = t.integer(r, id_col);
    for (auto c : feature_cols) row.features.push_back(t.number(r, c));
    row.arm = static_cast<CouponId>(t.integer(r, arm_col));
    row.outcome = t.number(r, y_col);
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

void save_catalog(const CouponCatalog& cat, const fs::path& path) {
  csv::Writer w({"coupon_id", "label", "unit_cost"});
  for (const auto& c : cat.coupons()) {
    w.cell(c.id).cell(c.label).cell(c.unit_cost);
    w.end_row();
  }
  write_text(path, w.text());
}

CouponCatalog load_catalog(const fs::path& path) {
  if (!fs::exists(path)) throw Error("catalog file not found: " + path.string());
  const auto t = csv::Table::read(path);
  const auto id = t.column("coupon_id");
  const auto label = t.column("label");
  const auto cost = t.column("unit_cost");
  std::vector<Coupon> coupons;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    coupons.push_back({static_cast<CouponId>(t.integer(r, id)), t.cell(r, label),
                       t.number(r, cost)});
  }
  try {
    return CouponCatalog(std::move(coupons));
  } catch (const Error& e) {
    throw Error(t.source() + ": " + e.what());
  }
}

void save_cate(const CateMatrix& m, const fs::path& path, const std::string& prefix) {
  std::vector<std::string> header{"customer_id"};
  for (std::size_t j = 1; j <= m.coupons(); ++j) header.push_back(prefix + "_" + std::to_string(j));
  csv::Writer w(header);
  for (std::size_t i = 0; i < m.customers(); ++i) {
    w.cell(m.customer_ids()[i]);
    for (std::size_t j = 1; j <= m.coupons(); ++j) w.cell(m.at(i, static_cast<CouponId>(j)));
    w.end_row();
  }
  write_text(path, w.text());
}

CateMatrix load_cate(const fs::path& path, const std::string& prefix) {
  const auto t = csv::Table::read(path);
  const auto id = t.column("customer_id");
  std::vector<std::size_t> cols;
  for (std::size_t j = 1;; ++j) {
    const std::string name = prefix + "_" + std::to_string(j);
    if (!t.has_column(name)) break;
    cols.push_back(t.column(name));
  }
  if (cols.empty()) t.column(prefix + "_1");  // throws naming the column
  std::vector<CustomerId> ids;
  Eigen::MatrixXd v(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    ids.push_back(t.integer(r, id));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = t.number(r, cols[j]);
    }
  }
  try {
    return CateMatrix(std::move(ids), std::move(v));
  } catch (const Error& e) {
    throw Error(t.source() + ": " + e.what());
  }
}

namespace {

void save_cluster_matrix(const Eigen::MatrixXd& m, const std::string& prefix,
                         const fs::path& path) {
  std::vector<std::string> header{"k"};
  for (Eigen::Index j = 1; j <= m.cols(); ++j) header.push_back(prefix + "_" + std::to_string(j));
  csv::Writer w(header);
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    w.cell(static_cast<std::int64_t>(k));
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.cell(m(k, j));
    w.end_row();
  }
  write_text(path, w.text());
}

Eigen::MatrixXd load_cluster_matrix(const fs::path& path, const std::string& prefix) {
  const auto t = csv::Table::read(path);
  const auto kc = t.column("k");
  std::vector<std::size_t> cols;
  for (std::size_t j = 1; t.has_column(prefix + "_" + std::to_string(j)); ++j) {
    cols.push_back(t.column(prefix + "_" + std::to_string(j)));
  }
  if (cols.empty()) t.column(prefix + "_1");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.integer(r, kc) != static_cast<std::int64_t>(r)) {
      throw Error(t.source() + ": row " + std::to_string(r + 1) +
                  ", column 'k': clusters must be listed in order 0..K-1");
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = t.number(r, cols[j]);
    }
  }
  return m;
}

}  // namespace

void save_stats(const segmentation::ClusterStats& stats, const fs::path& dir) {
  fs::create_directories(dir);
  csv::Writer cl({"customer_id", "k"});
  for (std::size_t i = 0; i < stats.assignment.size(); ++i) {
    cl.cell(stats.assignment.customer_ids[i]).cell(stats.assignment.cluster[i]);
    cl.end_row();
  }
  write_text(dir / "clusters.csv", cl.text());
  save_cluster_matrix(stats.means, "pibar", dir / "means.csv");
  save_cluster_matrix(stats.stderrs, "delta", dir / "stderrs.csv");
  std::vector<std::string> header{"label"};
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < stats.num_clusters(); ++k) {
    for (std::size_t j = 1; j <= stats.num_coupons(); ++j) {
      labels.push_back(std::to_string(k) + ":" + std::to_string(j));
    }
  }
  header.insert(header.end(), labels.begin(), labels.end());
  csv::Writer cv(header);
  for (Eigen::Index r = 0; r < stats.cov.rows(); ++r) {
    cv.cell(labels[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < stats.cov.cols(); ++c) cv.cell(stats.cov(r, c));
    cv.end_row();
  }
  write_text(dir / "cov.csv", cv.text());
}

segmentation::ClusterStats load_stats(const fs::path& dir) {
  segmentation::ClusterStats st;
  st.means = load_cluster_matrix(dir / "means.csv", "pibar");
  st.stderrs = load_cluster_matrix(dir / "stderrs.csv", "delta");
  const auto K = static_cast<std::size_t>(st.means.rows());
  const auto J = static_cast<std::size_t>(st.means.cols());
  if (st.stderrs.rows() != st.means.rows() || st.stderrs.cols() != st.means.cols()) {
    throw Error((dir / "stderrs.csv").string() + ": shape differs from means.csv");
  }
  const auto cl = csv::Table::read(dir / "clusters.csv");
  const auto idc = cl.column("customer_id");
  const auto kc = cl.column("k");
  st.assignment.num_clusters = K;
  st.members.assign(K, {});
  for (std::size_t r = 0; r < cl.rows(); ++r) {
    const auto id = cl.integer(r, idc);
    const auto k = cl.integer(r, kc);
    if (k < 0 || static_cast<std::size_t>(k) >= K) {
      throw Error(cl.source() + ": row " + std::to_string(r + 1) +
                  ", column 'k': cluster " + std::to_string(k) + " out of range");
    }
    st.assignment.customer_ids.push_back(id);
    st.assignment.cluster.push_back(static_cast<int>(k));
    st.members[static_cast<std::size_t>(k)].push_back(id);
  }
  st.sizes = st.assignment.sizes();
  const auto cv = csv::Table::read(dir / "cov.csv");
  const std::size_t dim = K * J;
  if (cv.rows() != dim || cv.header().size() != dim + 1) {
    throw Error(cv.source() + ": expected a " + std::to_string(dim) + " x " +
                std::to_string(dim) + " covariance");
  }
  st.cov.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 1; j <= J; ++j) {
      const std::string label = std::to_string(k) + ":" + std::to_string(j);
      const auto col = cv.column(label);
      const std::size_t r = k * J + (j - 1);
      if (cv.cell(r, 0) != label) {
        throw Error(cv.source() + ": row " + std::to_string(r + 1) +
                    ", column 'label': expected " + label);
      }
      for (std::size_t q = 0; q < dim; ++q) {
        st.cov(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(r)) = cv.number(q, col);
      }
    }
  }
  st.validate();
  return st;
}

void save_allocation(const allocation::FractionalAllocation& w, const fs::path& path) {
  csv::Writer out({"k", "j", "w"});
  for (Eigen::Index k = 0; k < w.w.rows(); ++k) {
    for (Eigen::Index j = 0; j < w.w.cols(); ++j) {
      out.cell(static_cast<std::int64_t>(k)).cell(static_cast<std::int64_t>(j + 1)).cell(w.w(k, j));
      out.end_row();
    }
  }
  write_text(path, out.text());
}

allocation::FractionalAllocation load_allocation(const fs::path& path,
                                                 std::size_t clusters,
                                                 std::size_t coupons,
                                                 double budget) {
  const auto t = csv::Table::read(path);
  const auto kc = t.column("k");
  const auto jc = t.column("j");
  const auto wc = t.column("w");
  allocation::FractionalAllocation a;
  a.budget = budget;
  a.w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(clusters),
                              static_cast<Eigen::Index>(coupons));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto k = t.integer(r, kc);
    const auto j = t.integer(r, jc);
    if (k < 0 || static_cast<std::size_t>(k) >= clusters || j < 1 ||
        static_cast<std::size_t>(j) > coupons) {
      throw Error(t.source() + ": row " + std::to_string(r + 1) + ": (k, j) = (" +
                  std::to_string(k) + ", " + std::to_string(j) + ") out of range");
    }
    a.w(k, j - 1) = t.number(r, wc);
  }
  return a;
}

void save_plan(const AllocationPlan& plan, const fs::path& path) {
  csv::Writer w({"customer_id", "coupon_id"});
  for (const auto& [id, j] : plan.assignments) {
    w.cell(id).cell(j);
    w.end_row();
  }
  write_text(path, w.text());
}

AllocationPlan load_plan(const fs::path& path, const CouponCatalog& cat) {
  const auto t = csv::Table::read(path);
  const auto idc = t.column("customer_id");
  const auto jc = t.column("coupon_id");
  std::map<CustomerId, CouponId> a;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto id = t.integer(r, idc);
    if (!a.emplace(id, static_cast<CouponId>(t.integer(r, jc))).second) {
      throw Error(t.source() + ": row " + std::to_string(r + 1) + ": customer " +
                  std::to_string(id) + " appears twice");
    }
  }
  try {
    return make_plan(std::move(a), cat);
  } catch (const Error& e) {
    throw Error(t.source() + ": " + e.what());
  }
}

}  // namespace couponalloc::io
