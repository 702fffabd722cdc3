#pragma once

#include <filesystem>
#include <string>

#include "couponalloc/allocation.hpp"
#include "couponalloc/cate_matrix.hpp"
#include "couponalloc/core.hpp"
#include "couponalloc/segmentation.hpp"

// CSV persistence for every artifact passed between pipeline stages. All
// numbers are written in shortest round-trip form, so reading a file back
// reproduces the in-memory values exactly.
namespace couponalloc::io {

namespace fs = std::filesystem;

/// customer_id,f0..f{d-1},arm,outcome
void save_dataset(const ExperimentDataset& ds, const fs::path& path);
ExperimentDataset load_dataset(const fs::path& path, double arm_probability);

/// coupon_id,label,unit_cost
void save_catalog(const CouponCatalog& cat, const fs::path& path);
CouponCatalog load_catalog(const fs::path& path);

/// customer_id,{prefix}_1..{prefix}_|J|  ("pihat" or "tau").
void save_cate(const CateMatrix& m, const fs::path& path, const std::string& prefix);
CateMatrix load_cate(const fs::path& path, const std::string& prefix);

/// clusters.csv, means.csv, stderrs.csv and cov.csv inside dir.
void save_stats(const segmentation::ClusterStats& stats, const fs::path& dir);
segmentation::ClusterStats load_stats(const fs::path& dir);

/// k,j,w
void save_allocation(const allocation::FractionalAllocation& w, const fs::path& path);
allocation::FractionalAllocation load_allocation(const fs::path& path,
                                                 std::size_t clusters,
                                                 std::size_t coupons,
                                                 double budget);

/// customer_id,coupon_id
void save_plan(const AllocationPlan& plan, const fs::path& path);
AllocationPlan load_plan(const fs::path& path, const CouponCatalog& cat);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace couponalloc::io
