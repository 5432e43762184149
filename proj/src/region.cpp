#include "crowdwise/region.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace crowdwise {

unsigned long long simplex_grid_size(int n, int resolution) {
  // C(resolution + n - 1, n - 1), product form with interleaved division.
  unsigned long long result = 1;
  for (int k = 1; k <= n - 1; ++k) {
    result = result * static_cast<unsigned long long>(resolution + k) /
             static_cast<unsigned long long>(k);
  }
  return result;
}

namespace {

void lattice_rec(int n, int remaining, std::vector<int>& partial,
                 std::vector<std::vector<int>>& out) {
  if (static_cast<int>(partial.size()) == n - 1) {
    partial.push_back(remaining);
    out.push_back(partial);
    partial.pop_back();
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    partial.push_back(k);
    lattice_rec(n, remaining - k, partial, out);
    partial.pop_back();
  }
}

std::vector<std::vector<int>> simplex_lattice(int n, int resolution) {
  std::vector<std::vector<int>> out;
  std::vector<int> partial;
  lattice_rec(n, resolution, partial, out);
  return out;
}

Allocation lattice_to_allocation(const std::vector<int>& coeffs, int resolution) {
  Eigen::VectorXd w(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    w[static_cast<Eigen::Index>(i)] = static_cast<double>(coeffs[i]) / resolution;
  }
  return Allocation(std::move(w));
}

}  // namespace

std::vector<Allocation> simplex_grid(int n, int resolution) {
  if (n < 2) throw std::invalid_argument("simplex_grid: dimension must be >= 2");
  if (resolution < 1) throw std::invalid_argument("simplex_grid: resolution must be >= 1");
  std::vector<Allocation> out;
  for (const auto& coeffs : simplex_lattice(n, resolution)) {
    out.push_back(lattice_to_allocation(coeffs, resolution));
  }
  return out;
}

bool gap_polytope_member(const Eigen::VectorXd& z, const VarianceProfile& s,
                         double tol) {
  if (z.size() != s.size()) {
    throw std::invalid_argument("gap_polytope_member: dimension mismatch");
  }
  const int n = s.size();
  const std::vector<int> order = s.ascending_order();
  for (int i = 0; i < n; ++i) {
    if (!(z[order[i]] > 0.0)) return false;
  }
  const double u = 1.0 / n;
  if ((z.array() - u).abs().maxCoeff() <= tol) return false;  // uniform excluded
  for (int i = 0; i + 1 < n; ++i) {
    const double zi = z[order[i]];
    const double zj = z[order[i + 1]];
    if (zi < zj - tol) return false;                              // z_i/z_{i+1} >= 1
    if (zi * s[order[i]] > zj * s[order[i + 1]] + tol) return false;  // <= sigma ratio
  }
  return true;
}

RegionMap region_map(const VarianceProfile& s, int resolution, double tol) {
  if (resolution < 1) throw std::invalid_argument("region_map: resolution must be >= 1");
  const int n = s.size();
  const OptimalAllocation opt = optimal_allocation(s);
  RegionMap map{resolution, s, {}, opt.x, opt.variance, {}};
  if (resolution < n) {
    map.warnings.push_back("resolution below group size: grid contains no interior points");
  }
  for (auto& coeffs : simplex_lattice(n, resolution)) {
    Allocation z = lattice_to_allocation(coeffs, resolution);
    RegionPoint point{std::move(coeffs),
                      z,
                      classify_membership(z, s, tol),
                      classify_consistency(z, s, tol),
                      hypertriangle_of(z, tol),
                      gap_polytope_member(z.weights(), s, tol)};
    map.points.push_back(std::move(point));
  }
  return map;
}

namespace {

const char* region_label(Membership m) {
  switch (m) {
    case Membership::Improves: return "Improvement";
    case Membership::Undermines: return "Undermining";
    case Membership::Neutral: return "Neutral";
  }
  return "?";
}

}  // namespace

void export_region_csv(const RegionMap& map, const std::string& path) {
  if (map.sigma2.size() != 3) {
    throw std::invalid_argument("export_region_csv: CSV export is defined for n = 3");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_region_csv: cannot write " + path);
  out << "b1,b2,b3,membership,consistency,hypertriangle\n";
  char buf[64];
  for (const RegionPoint& p : map.points) {
    for (int i = 0; i < 3; ++i) {
      std::snprintf(buf, sizeof(buf), "%.10g", p.allocation[i]);
      out << buf << ',';
    }
    out << region_label(p.membership) << ',' << to_string(p.consistency) << ',';
    if (p.hypertriangle.has_value()) {
      for (int v : p.hypertriangle->to_one_based()) out << v;  // e.g. 213
    } else {
      out << "uniform";
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("export_region_csv: write failed for " + path);
}

RegionSummary summarize(const RegionMap& map) {
  RegionSummary s;
  s.total = map.points.size();
  for (const RegionPoint& p : map.points) {
    switch (p.membership) {
      case Membership::Improves: ++s.improvement; break;
      case Membership::Undermines: ++s.undermining; break;
      case Membership::Neutral: ++s.neutral; break;
    }
    if (p.consistency != Consistency::NotOrdering) ++s.ordering_consistent;
    if (p.consistency == Consistency::Gap || p.consistency == Consistency::Maximal) {
      ++s.gap_consistent;
    }
  }
  return s;
}

}  // namespace crowdwise
