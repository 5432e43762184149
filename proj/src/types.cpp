#include "crowdwise/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crowdwise {

VarianceProfile::VarianceProfile(Eigen::VectorXd values)
    : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw std::invalid_argument("VarianceProfile: group size must be >= 2");
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] <= 0.0) {
      throw std::invalid_argument(
          "VarianceProfile: every variance must be strictly positive and finite");
    }
  }
}

bool VarianceProfile::uniform() const {
  for (Eigen::Index i = 1; i < values_.size(); ++i) {
    if (values_[i] != values_[0]) return false;
  }
  return true;
}

std::vector<int> VarianceProfile::ascending_order() const {
  std::vector<int> order(values_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values_[a] < values_[b]; });
  return order;
}

VarianceProfile VarianceProfile::sorted_ascending() const {
  const std::vector<int> order = ascending_order();
  Eigen::VectorXd sorted(values_.size());
  for (std::size_t k = 0; k < order.size(); ++k) sorted[static_cast<Eigen::Index>(k)] = values_[order[k]];
  return VarianceProfile(std::move(sorted));
}

bool VarianceProfile::is_ascending() const {
  for (Eigen::Index i = 1; i < values_.size(); ++i) {
    if (values_[i] < values_[i - 1]) return false;
  }
  return true;
}

Allocation::Allocation(Eigen::VectorXd weights, double sum_tol)
    : weights_(std::move(weights)) {
  if (weights_.size() < 1) {
    throw std::invalid_argument("Allocation: empty weight vector");
  }
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      throw std::invalid_argument("Allocation: weights must be nonnegative and finite");
    }
  }
  if (std::abs(weights_.sum() - 1.0) > sum_tol) {
    throw std::invalid_argument("Allocation: weights must sum to 1");
  }
}

Allocation Allocation::uniform(int n) {
  return Allocation(Eigen::VectorXd::Constant(n, 1.0 / n));
}

bool Allocation::is_uniform_point(double tol) const {
  const double u = 1.0 / static_cast<double>(weights_.size());
  return (weights_.array() - u).abs().maxCoeff() <= tol;
}

}  // namespace crowdwise
