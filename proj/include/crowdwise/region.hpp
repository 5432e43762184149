#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crowdwise/core.hpp"
#include "crowdwise/orderings.hpp"
#include "crowdwise/types.hpp"

namespace crowdwise {

struct RegionPoint {
  std::vector<int> coeffs;  // barycentric lattice coordinates, sum = resolution
  Allocation allocation;
  Membership membership;
  Consistency consistency;
  std::optional<PermutationOrdering> hypertriangle;  // nullopt at the uniform point
  bool gap_polytope;  // membership in the ratio-chain gap polytope
};

struct RegionMap {
  int resolution;
  VarianceProfile sigma2;
  std::vector<RegionPoint> points;  // lexicographic in coeffs
  Allocation optimal_point;
  double optimal_variance;
  std::vector<std::string> warnings;
};

/// Number of barycentric lattice points: C(resolution + n - 1, n - 1).
unsigned long long simplex_grid_size(int n, int resolution);

/// All lattice points (k_1,...,k_n)/resolution with sum k_i = resolution, in
/// lexicographic order of the integer tuples.
std::vector<Allocation> simplex_grid(int n, int resolution);

/// The ratio-chain form of the gap region: after relabeling variances
/// ascending, z interior, z != uniform and
/// 1 <= z_i/z_{i+1} <= sigma_{i+1}^2/sigma_i^2 along the chain. Kept as an
/// independent route beside the pairwise gap classifier.
bool gap_polytope_member(const Eigen::VectorXd& z, const VarianceProfile& s,
                         double tol = kDefaultTol);

/// Classifies every grid point; any dimension is accepted for counting,
/// CSV export below requires n = 3.
RegionMap region_map(const VarianceProfile& s, int resolution,
                     double tol = kDefaultTol);

/// CSV "b1,b2,b3,membership,consistency,hypertriangle", one row per grid
/// point, byte-identical across runs. Requires n = 3.
void export_region_csv(const RegionMap& map, const std::string& path);

struct RegionSummary {
  unsigned long long total = 0;
  unsigned long long improvement = 0;
  unsigned long long undermining = 0;
  unsigned long long neutral = 0;
  unsigned long long ordering_consistent = 0;  // grade >= Ordering
  unsigned long long gap_consistent = 0;       // grade >= Gap
};

RegionSummary summarize(const RegionMap& map);

}  // namespace crowdwise
