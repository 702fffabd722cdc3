#include "couponalloc/cate_matrix.hpp"

#include <cmath>

namespace couponalloc {

CateMatrix::CateMatrix(std::vector<CustomerId> customer_ids,
                       Eigen::MatrixXd values)
    : ids_(std::move(customer_ids)), values_(std::move(values)) {
  if (static_cast<Eigen::Index>(ids_.size()) != values_.rows()) {
    throw Error("CATE matrix has " + std::to_string(values_.rows()) +
                " rows but " + std::to_string(ids_.size()) + " customer ids");
  }
  if (!values_.allFinite()) throw Error("CATE matrix has non-finite entries");
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw Error("duplicate customer id " + std::to_string(ids_[i]) +
                  " in CATE matrix");
    }
  }
}

std::size_t CateMatrix::row_of(CustomerId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error("customer " + std::to_string(id) + " not in CATE matrix");
  }
  return it->second;
}

}  // namespace couponalloc
