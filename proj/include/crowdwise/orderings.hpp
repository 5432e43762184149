#pragma once

#include <optional>
#include <vector>

#include "crowdwise/core.hpp"
#include "crowdwise/rational.hpp"
#include "crowdwise/types.hpp"

namespace crowdwise {

/// A permutation tau of {1..n} naming the hypertriangle
/// { z in simplex \ {1_n/n} : z_{tau_i} >= z_{tau_{i+1}} }.
/// Stored 0-based; all I/O is 1-based.
class PermutationOrdering {
 public:
  explicit PermutationOrdering(std::vector<int> zero_based);

  static PermutationOrdering identity(int n);
  static PermutationOrdering from_one_based(const std::vector<int>& one_based);

  int size() const { return static_cast<int>(tau_.size()); }
  int operator[](int i) const { return tau_[i]; }
  const std::vector<int>& indices() const { return tau_; }
  std::vector<int> to_one_based() const;

  /// The inverse ordering tau^{-1} = (tau_n, ..., tau_1).
  PermutationOrdering reversed() const;

  bool operator==(const PermutationOrdering& rhs) const { return tau_ == rhs.tau_; }
  bool operator<(const PermutationOrdering& rhs) const { return tau_ < rhs.tau_; }

 private:
  std::vector<int> tau_;
};

/// Intermediate quantities of the modified permutation generation run:
/// prefix sums s, thresholds u, threshold indices f, segment heads h, segment
/// count d and the candidate count N = prod (h_{i+1} - h_i)!.
template <typename Scalar>
struct MpgStateT {
  std::vector<Scalar> s;  // s[i] = sum of the first i variances, s[0] = 0
  std::vector<Scalar> u;  // u[i] = (i^2/n^2) s_n - s_{i-1}, u[0] = sigma_1^2
  std::vector<int> f;     // f[i] for i in 1..n, f[0] unused
  std::vector<int> h;     // segment heads, h.front() == 1, 1-based positions
  int d = 0;
  unsigned long long candidate_count = 0;
};

using MpgState = MpgStateT<double>;

/// The ordering that sorts x descending (stable: ties by ascending index);
/// nullopt for the uniform point, which belongs to no hypertriangle.
std::optional<PermutationOrdering> hypertriangle_of(const Allocation& x,
                                                    double tol = kDefaultTol);

/// Membership of x in the hypertriangle of tau: non-strict inequalities,
/// uniform point excluded.
bool in_hypertriangle(const Allocation& x, const PermutationOrdering& tau,
                      double tol = kDefaultTol);

/// Condition (1/i^2) sum_{r<=i} sigma_{tau_r}^2 < (1/n^2) sum_j sigma_j^2 for
/// all i in 1..n-1; when it holds, the whole hypertriangle of tau lies in the
/// improvement region.
bool permutation_condition(const VarianceProfile& s, const PermutationOrdering& tau);
bool permutation_condition(const std::vector<Rational>& s, const PermutationOrdering& tau);

/// Same condition specialized to the identity ordering of an ascending
/// profile: ordering-consistency is sufficient for improvement iff this holds.
/// Throws if the profile is not ascending.
bool ordering_sufficiency(const VarianceProfile& ascending);
bool ordering_sufficiency(const std::vector<Rational>& ascending);

/// Prefix sums, thresholds and segment structure for an ascending profile.
MpgState mpg_analyze(const VarianceProfile& ascending);
MpgStateT<Rational> mpg_analyze(const std::vector<Rational>& ascending);

/// Modified permutation generation: every ordering whose hypertriangle is
/// contained in the improvement region, and only those. Requires an ascending
/// profile; output is sorted lexicographically.
std::vector<PermutationOrdering> mpg(const VarianceProfile& ascending);
std::vector<PermutationOrdering> mpg(const std::vector<Rational>& ascending);

/// Brute-force oracle for mpg: checks the permutation condition over all n!
/// orderings. Throws when n exceeds the cap.
std::vector<PermutationOrdering> enumerate_improving_orderings(const VarianceProfile& s,
                                                               int cap = 9);

/// All orderings reachable from tau by swapping inversions one by one
/// (any inversion pair, not only adjacent ones), including tau itself.
std::vector<PermutationOrdering> downward_closure(const PermutationOrdering& tau);

/// Select-crowd test: x_tau puts descending positive power on the first m
/// individuals and none on the rest, and every powered individual's variance
/// clears its (2j-1)/n^2-of-total bound. True guarantees improvement.
bool select_crowd_check(const Allocation& x, const VarianceProfile& s,
                        const PermutationOrdering& tau, int m);

/// True iff x lies in the hypertriangle of the reversed ascending-variance
/// ordering; such allocations always undermine the wisdom.
bool reverse_ordering_undermines(const Allocation& x, const VarianceProfile& s,
                                 double tol = kDefaultTol);

enum class DualityVerdict {
  ImprovesWholeTriangle,
  ThereforeReverseUndermines,
  NoConclusion,
};

/// If the permutation condition holds for tau, the hypertriangle of tau
/// improves and, by duality, the whole reversed hypertriangle undermines.
/// The converse direction gives no conclusion.
DualityVerdict reversal_duality(const VarianceProfile& s, const PermutationOrdering& tau);

const char* to_string(DualityVerdict v);

}  // namespace crowdwise
