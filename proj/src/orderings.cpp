#include "crowdwise/orderings.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace crowdwise {

namespace {

// All condition checks below use the cross-multiplied form
//   n^2 * prefix < i^2 * total      (condition on prefix averages)
//   n^2 * (sigma_i^2 + s_{j-1}) >= j^2 * total   (threshold test)
// so integer-valued profiles are compared exactly in doubles, and the
// rational instantiation is exact by construction.

double reciprocal_of(double v) { return 1.0 / v; }
Rational reciprocal_of(const Rational& v) {
  return Rational(v.denominator(), v.numerator());
}

template <typename Scalar>
std::vector<Scalar> prefix_sums(const std::vector<Scalar>& v) {
  std::vector<Scalar> s(v.size() + 1, Scalar(0));
  for (std::size_t i = 0; i < v.size(); ++i) s[i + 1] = s[i] + v[i];
  return s;
}

template <typename Scalar>
bool condition_31(const std::vector<Scalar>& sigma2, const std::vector<int>& tau) {
  const int n = static_cast<int>(sigma2.size());
  Scalar total(0);
  for (const Scalar& v : sigma2) total = total + v;
  const Scalar n2 = Scalar(static_cast<std::int64_t>(n) * n);
  Scalar prefix(0);
  for (int i = 1; i <= n - 1; ++i) {
    prefix = prefix + sigma2[tau[i - 1]];
    const Scalar i2 = Scalar(static_cast<std::int64_t>(i) * i);
    if (!(n2 * prefix < i2 * total)) return false;
  }
  return true;
}

template <typename Scalar>
void require_ascending(const std::vector<Scalar>& sigma2) {
  for (std::size_t i = 1; i < sigma2.size(); ++i) {
    if (sigma2[i] < sigma2[i - 1]) {
      throw std::invalid_argument("variance profile must be sorted ascending");
    }
  }
}

template <typename Scalar>
MpgStateT<Scalar> mpg_analyze_impl(const std::vector<Scalar>& sigma2) {
  require_ascending(sigma2);
  const int n = static_cast<int>(sigma2.size());
  if (n < 2) throw std::invalid_argument("mpg: group size must be >= 2");

  MpgStateT<Scalar> st;
  st.s = prefix_sums(sigma2);
  const Scalar total = st.s[n];
  const Scalar n2 = Scalar(static_cast<std::int64_t>(n) * n);

  // u_i = (i^2/n^2) s_n - s_{i-1}; kept in divided form for reporting, while
  // the threshold tests stay cross-multiplied.
  st.u.resize(n + 1);
  st.u[0] = sigma2[0];
  for (int i = 1; i <= n; ++i) {
    const Scalar i2 = Scalar(static_cast<std::int64_t>(i) * i);
    st.u[i] = i2 * total * reciprocal_of(n2) - st.s[i - 1];
  }

  // f_i = max { j in 0..i-1 : sigma_i^2 >= u_j }; j = 0 always qualifies for
  // an ascending profile since u_0 = sigma_1^2.
  st.f.assign(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    int best = 0;
    for (int j = 1; j <= i - 1; ++j) {
      const Scalar j2 = Scalar(static_cast<std::int64_t>(j) * j);
      if (n2 * (sigma2[i - 1] + st.s[j - 1]) >= j2 * total) best = j;
    }
    st.f[i] = best;
  }

  // Segment heads: positions where f_i == i - 1.
  st.h.clear();
  for (int i = 1; i <= n; ++i) {
    if (st.f[i] == i - 1) st.h.push_back(i);
  }
  st.d = static_cast<int>(st.h.size());
  st.h.push_back(n + 1);

  unsigned long long count = 1;
  for (int i = 0; i < st.d; ++i) {
    const int len = st.h[i + 1] - st.h[i];
    for (int k = 2; k <= len; ++k) {
      if (count > (~0ULL) / static_cast<unsigned long long>(k)) {
        count = ~0ULL;  // saturate
        break;
      }
      count *= static_cast<unsigned long long>(k);
    }
  }
  st.candidate_count = count;
  return st;
}

// Heap's algorithm; calls emit for every permutation of items.
template <typename Emit>
void heap_permutations_rec(std::vector<int>& items, int k, Emit&& emit) {
  if (k <= 1) {
    emit(items);
    return;
  }
  for (int i = 0; i < k - 1; ++i) {
    heap_permutations_rec(items, k - 1, emit);
    if (k % 2 == 0) {
      std::swap(items[i], items[k - 1]);
    } else {
      std::swap(items[0], items[k - 1]);
    }
  }
  heap_permutations_rec(items, k - 1, emit);
}

template <typename Emit>
void heap_permutations(std::vector<int> items, Emit&& emit) {
  heap_permutations_rec(items, static_cast<int>(items.size()), emit);
}

template <typename Scalar>
std::vector<PermutationOrdering> mpg_impl(const std::vector<Scalar>& sigma2) {
  const MpgStateT<Scalar> st = mpg_analyze_impl(sigma2);
  const int n = static_cast<int>(sigma2.size());

  // Per-segment permutations via Heap's algorithm.
  std::vector<std::vector<std::vector<int>>> segment_perms(st.d);
  for (int i = 0; i < st.d; ++i) {
    std::vector<int> segment;
    for (int p = st.h[i]; p < st.h[i + 1]; ++p) segment.push_back(p - 1);  // 0-based
    heap_permutations(segment, [&](const std::vector<int>& perm) {
      segment_perms[i].push_back(perm);
    });
  }

  // Concatenate one permutation per segment (mixed-radix counter over the
  // segment choices), then apply the final filter.
  std::vector<PermutationOrdering> out;
  std::vector<int> pick(st.d, 0);
  std::vector<int> candidate(n);
  while (true) {
    int pos = 0;
    for (int i = 0; i < st.d; ++i) {
      for (int v : segment_perms[i][pick[i]]) candidate[pos++] = v;
    }
    if (condition_31(sigma2, candidate)) {
      out.emplace_back(candidate);
    }
    int carry = st.d - 1;
    while (carry >= 0) {
      if (++pick[carry] < static_cast<int>(segment_perms[carry].size())) break;
      pick[carry] = 0;
      --carry;
    }
    if (carry < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> to_std(const VarianceProfile& s) {
  return std::vector<double>(s.values().data(), s.values().data() + s.size());
}

}  // namespace

PermutationOrdering::PermutationOrdering(std::vector<int> zero_based)
    : tau_(std::move(zero_based)) {
  const int n = static_cast<int>(tau_.size());
  if (n == 0) throw std::invalid_argument("PermutationOrdering: empty");
  std::vector<bool> seen(n, false);
  for (int v : tau_) {
    if (v < 0 || v >= n || seen[v]) {
      throw std::invalid_argument("PermutationOrdering: not a bijection on {1..n}");
    }
    seen[v] = true;
  }
}

PermutationOrdering PermutationOrdering::identity(int n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return PermutationOrdering(std::move(idx));
}

PermutationOrdering PermutationOrdering::from_one_based(const std::vector<int>& one_based) {
  std::vector<int> idx(one_based.size());
  for (std::size_t i = 0; i < one_based.size(); ++i) idx[i] = one_based[i] - 1;
  return PermutationOrdering(std::move(idx));
}

std::vector<int> PermutationOrdering::to_one_based() const {
  std::vector<int> out(tau_.size());
  for (std::size_t i = 0; i < tau_.size(); ++i) out[i] = tau_[i] + 1;
  return out;
}

PermutationOrdering PermutationOrdering::reversed() const {
  return PermutationOrdering(std::vector<int>(tau_.rbegin(), tau_.rend()));
}

std::optional<PermutationOrdering> hypertriangle_of(const Allocation& x, double tol) {
  if (x.is_uniform_point(tol)) return std::nullopt;
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x[a] > x[b]; });
  return PermutationOrdering(std::move(order));
}

bool in_hypertriangle(const Allocation& x, const PermutationOrdering& tau, double tol) {
  if (x.size() != tau.size()) {
    throw std::invalid_argument("allocation and ordering dimensions differ");
  }
  if (x.is_uniform_point(tol)) return false;
  for (int i = 0; i + 1 < tau.size(); ++i) {
    if (x[tau[i]] < x[tau[i + 1]]) return false;
  }
  return true;
}

bool permutation_condition(const VarianceProfile& s, const PermutationOrdering& tau) {
  if (s.size() != tau.size()) {
    throw std::invalid_argument("profile and ordering dimensions differ");
  }
  return condition_31(to_std(s), tau.indices());
}

bool permutation_condition(const std::vector<Rational>& s, const PermutationOrdering& tau) {
  if (static_cast<int>(s.size()) != tau.size()) {
    throw std::invalid_argument("profile and ordering dimensions differ");
  }
  return condition_31(s, tau.indices());
}

bool ordering_sufficiency(const VarianceProfile& ascending) {
  if (!ascending.is_ascending()) {
    throw std::invalid_argument("ordering_sufficiency: profile must be ascending");
  }
  return permutation_condition(ascending, PermutationOrdering::identity(ascending.size()));
}

bool ordering_sufficiency(const std::vector<Rational>& ascending) {
  require_ascending(ascending);
  return permutation_condition(
      ascending, PermutationOrdering::identity(static_cast<int>(ascending.size())));
}

MpgState mpg_analyze(const VarianceProfile& ascending) {
  return mpg_analyze_impl(to_std(ascending));
}

MpgStateT<Rational> mpg_analyze(const std::vector<Rational>& ascending) {
  return mpg_analyze_impl(ascending);
}

std::vector<PermutationOrdering> mpg(const VarianceProfile& ascending) {
  return mpg_impl(to_std(ascending));
}

std::vector<PermutationOrdering> mpg(const std::vector<Rational>& ascending) {
  return mpg_impl(ascending);
}

std::vector<PermutationOrdering> enumerate_improving_orderings(const VarianceProfile& s,
                                                               int cap) {
  const int n = s.size();
  if (n > cap) {
    throw std::invalid_argument("enumerate_improving_orderings: group size above cap");
  }
  const std::vector<double> sigma2 = to_std(s);
  std::vector<int> tau(n);
  std::iota(tau.begin(), tau.end(), 0);
  std::vector<PermutationOrdering> out;
  do {
    if (condition_31(sigma2, tau)) out.emplace_back(tau);
  } while (std::next_permutation(tau.begin(), tau.end()));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PermutationOrdering> downward_closure(const PermutationOrdering& tau) {
  const int n = tau.size();
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> frontier{tau.indices()};
  seen.insert(tau.indices());
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& t : frontier) {
      for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
          if (t[p] <= t[q]) continue;  // only inversions may be swapped
          std::vector<int> swapped = t;
          std::swap(swapped[p], swapped[q]);
          if (seen.insert(swapped).second) next.push_back(std::move(swapped));
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<PermutationOrdering> out;
  out.reserve(seen.size());
  for (const auto& t : seen) out.emplace_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

bool select_crowd_check(const Allocation& x, const VarianceProfile& s,
                        const PermutationOrdering& tau, int m) {
  const int n = s.size();
  if (x.size() != n || tau.size() != n) {
    throw std::invalid_argument("select_crowd_check: dimension mismatch");
  }
  if (m < 1 || m >= n) {
    throw std::invalid_argument("select_crowd_check: m must satisfy 1 <= m < n");
  }
  // x_tau must be descending with the first m entries positive and the rest
  // exactly zero (allocations are user literals).
  for (int i = 0; i + 1 < n; ++i) {
    if (x[tau[i]] < x[tau[i + 1]]) return false;
  }
  if (!(x[tau[m - 1]] > 0.0)) return false;
  for (int i = m; i < n; ++i) {
    if (x[tau[i]] != 0.0) return false;
  }
  // sigma_{tau_j}^2 < (2j-1)/n^2 * total for all j <= m, cross-multiplied.
  const double total = s.sum();
  const double n2 = static_cast<double>(n) * n;
  for (int j = 1; j <= m; ++j) {
    if (!(n2 * s[tau[j - 1]] < (2.0 * j - 1.0) * total)) return false;
  }
  return true;
}

bool reverse_ordering_undermines(const Allocation& x, const VarianceProfile& s,
                                 double tol) {
  if (x.size() != s.size()) {
    throw std::invalid_argument("reverse_ordering_undermines: dimension mismatch");
  }
  const PermutationOrdering ascending(s.ascending_order());
  return in_hypertriangle(x, ascending.reversed(), tol);
}

DualityVerdict reversal_duality(const VarianceProfile& s, const PermutationOrdering& tau) {
  if (permutation_condition(s, tau)) return DualityVerdict::ThereforeReverseUndermines;
  return DualityVerdict::NoConclusion;
}

const char* to_string(DualityVerdict v) {
  switch (v) {
    case DualityVerdict::ImprovesWholeTriangle: return "ImprovesWholeTriangle";
    case DualityVerdict::ThereforeReverseUndermines: return "ThereforeReverseUndermines";
    case DualityVerdict::NoConclusion: return "NoConclusion";
  }
  return "?";
}

}  // namespace crowdwise
