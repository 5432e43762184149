#pragma once

#include "crowdwise/types.hpp"

namespace crowdwise {

enum class Membership { Improves, Undermines, Neutral };

/// Alignment grades between social power and accuracy (reciprocal variance),
/// from weakest to strongest.
enum class Consistency { NotOrdering, Ordering, Gap, Maximal };

struct RegionVerdict {
  Membership membership;
  double collective_variance;
  double baseline_variance;
  Consistency consistency;
};

/// Final collective variance E(z) = sum_i z_i^2 sigma_i^2.
double collective_variance(const Allocation& z, const VarianceProfile& s);

/// Variance of the initial collective estimate, (1/n^2) sum_i sigma_i^2.
double baseline_variance(const VarianceProfile& s);

/// Improves iff E(x) < baseline - tol, Undermines iff E(x) > baseline + tol,
/// Neutral within the tolerance band (the boundary is left open by the
/// definitions; Neutral is our explicit third verdict).
Membership classify_membership(const Allocation& x, const VarianceProfile& s,
                               double tol = kDefaultTol);

bool ordering_consistent(const Allocation& x, const VarianceProfile& s,
                         double tol = kDefaultTol);
bool gap_consistent(const Allocation& x, const VarianceProfile& s,
                    double tol = kDefaultTol);
bool maximally_consistent(const Allocation& x, const VarianceProfile& s,
                          double tol = kDefaultTol);

/// Strongest consistency grade satisfied by (x, sigma^2).
Consistency classify_consistency(const Allocation& x, const VarianceProfile& s,
                                 double tol = kDefaultTol);

struct OptimalAllocation {
  Allocation x;
  double variance;  // E(x*), the simplex-wide minimum of E
};

/// Closed-form minimizer of E over the simplex: x*_i proportional to
/// 1/sigma_i^2, with minimum value 1 / sum_i (1/sigma_i^2).
OptimalAllocation optimal_allocation(const VarianceProfile& s);

/// True iff sigma^2 is non-uniform and (x, sigma^2) is gap- or maximally
/// consistent; a true result guarantees classify_membership == Improves.
bool gap_improvement_check(const Allocation& x, const VarianceProfile& s,
                           double tol = kDefaultTol);

/// Full verdict for one allocation: membership, both variances, consistency.
RegionVerdict analyze_allocation(const Allocation& x, const VarianceProfile& s,
                                 double tol = kDefaultTol);

const char* to_string(Membership m);
const char* to_string(Consistency c);

}  // namespace crowdwise
