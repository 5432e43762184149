#pragma once

#include <Eigen/Dense>

namespace crowdwise {

/// Default absolute tolerance for strict-inequality and equality tests on
/// computed quantities. Comparisons between user-supplied variance literals
/// are exact.
inline constexpr double kDefaultTol = 1e-12;

/// Per-individual estimate variances sigma_i^2 > 0 for a group of n >= 2.
class VarianceProfile {
 public:
  explicit VarianceProfile(Eigen::VectorXd values);

  int size() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }

  double sum() const { return values_.sum(); }
  double max() const { return values_.maxCoeff(); }
  double min() const { return values_.minCoeff(); }

  /// True iff sigma^2 lies in span{1_n}. Exact comparison: variances are
  /// user-provided literals, not computed values.
  bool uniform() const;

  /// Stable ascending order: result[k] is the index of the k-th smallest
  /// variance, ties kept in original order.
  std::vector<int> ascending_order() const;

  /// Profile relabeled so variances are ascending (stable).
  VarianceProfile sorted_ascending() const;

  bool is_ascending() const;

 private:
  Eigen::VectorXd values_;
};

/// A social power allocation: a point of the n-simplex.
class Allocation {
 public:
  explicit Allocation(Eigen::VectorXd weights, double sum_tol = kDefaultTol);

  static Allocation uniform(int n);

  int size() const { return static_cast<int>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  double operator[](int i) const { return weights_[i]; }

  /// True iff max_i |x_i - 1/n| <= tol.
  bool is_uniform_point(double tol = kDefaultTol) const;

 private:
  Eigen::VectorXd weights_;
};

}  // namespace crowdwise
