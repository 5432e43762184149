#include "crowdwise/core.hpp"

#include <cmath>
#include <stdexcept>

namespace crowdwise {

namespace {

void check_dims(const Allocation& x, const VarianceProfile& s) {
  if (x.size() != s.size()) {
    throw std::invalid_argument("allocation and variance profile dimensions differ");
  }
}

}  // namespace

double collective_variance(const Allocation& z, const VarianceProfile& s) {
  check_dims(z, s);
  return (z.weights().array().square() * s.values().array()).sum();
}

double baseline_variance(const VarianceProfile& s) {
  const double n = static_cast<double>(s.size());
  return s.sum() / (n * n);
}

Membership classify_membership(const Allocation& x, const VarianceProfile& s,
                               double tol) {
  const double e = collective_variance(x, s);
  const double b = baseline_variance(s);
  if (e < b - tol) return Membership::Improves;
  if (e > b + tol) return Membership::Undermines;
  return Membership::Neutral;
}

bool ordering_consistent(const Allocation& x, const VarianceProfile& s,
                         double tol) {
  check_dims(x, s);
  const int n = s.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (s[i] >= s[j] && x[i] > x[j] + tol) return false;
    }
  }
  // x = 1_n/n is ordering-consistent only for uniform sigma^2.
  if (x.is_uniform_point(tol) && !s.uniform()) return false;
  return true;
}

bool gap_consistent(const Allocation& x, const VarianceProfile& s, double tol) {
  if (!ordering_consistent(x, s, tol)) return false;
  const int n = s.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (s[i] >= s[j] && x[i] * s[i] < x[j] * s[j] - tol) return false;
    }
  }
  return true;
}

bool maximally_consistent(const Allocation& x, const VarianceProfile& s,
                          double tol) {
  check_dims(x, s);
  // x_i / x_j = sigma_j^2 / sigma_i^2 for all pairs, i.e. the products
  // x_i sigma_i^2 all coincide; x must also be interior.
  const int n = s.size();
  for (int i = 0; i < n; ++i) {
    if (x[i] <= 0.0) return false;
    if (std::abs(x[i] * s[i] - x[0] * s[0]) > tol) return false;
  }
  return true;
}

Consistency classify_consistency(const Allocation& x, const VarianceProfile& s,
                                 double tol) {
  if (maximally_consistent(x, s, tol)) return Consistency::Maximal;
  if (gap_consistent(x, s, tol)) return Consistency::Gap;
  if (ordering_consistent(x, s, tol)) return Consistency::Ordering;
  return Consistency::NotOrdering;
}

OptimalAllocation optimal_allocation(const VarianceProfile& s) {
  const Eigen::ArrayXd accuracy = s.values().array().inverse();
  const double total = accuracy.sum();
  Eigen::VectorXd x = (accuracy / total).matrix();
  return OptimalAllocation{Allocation(std::move(x)), 1.0 / total};
}

bool gap_improvement_check(const Allocation& x, const VarianceProfile& s,
                           double tol) {
  if (s.uniform()) return false;
  const Consistency c = classify_consistency(x, s, tol);
  return c == Consistency::Gap || c == Consistency::Maximal;
}

RegionVerdict analyze_allocation(const Allocation& x, const VarianceProfile& s,
                                 double tol) {
  return RegionVerdict{classify_membership(x, s, tol), collective_variance(x, s),
                       baseline_variance(s), classify_consistency(x, s, tol)};
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::Improves: return "Improves";
    case Membership::Undermines: return "Undermines";
    case Membership::Neutral: return "Neutral";
  }
  return "?";
}

const char* to_string(Consistency c) {
  switch (c) {
    case Consistency::NotOrdering: return "NotOrdering";
    case Consistency::Ordering: return "Ordering";
    case Consistency::Gap: return "Gap";
    case Consistency::Maximal: return "Maximal";
  }
  return "?";
}

}  // namespace crowdwise
