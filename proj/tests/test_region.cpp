#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "crowdwise/region.hpp"
#include "crowdwise/sampling.hpp"
#include "helpers.hpp"

using namespace crowdwise;
using crowdwise::testing::random_profile;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("simplex grid") {
  CHECK(simplex_grid_size(3, 2) == 6);
  CHECK(simplex_grid_size(3, 100) == 5151);
  CHECK(simplex_grid(3, 2).size() == 6);
  CHECK(simplex_grid(3, 100).size() == 5151);

  const std::vector<Allocation> line = simplex_grid(2, 4);
  REQUIRE(line.size() == 5);
  CHECK(line[0][0] == doctest::Approx(0.0));
  CHECK(line[0][1] == doctest::Approx(1.0));
  CHECK(line[1][0] == doctest::Approx(0.25));
  CHECK(line[2][0] == doctest::Approx(0.5));
  CHECK(line[4][0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(simplex_grid(3, 0), std::invalid_argument);
}

TEST_CASE("gap polytope predicate agrees with the pairwise classifier") {
  std::mt19937_64 gen(8080);
  for (int rep = 0; rep < 3000; ++rep) {
    const int n = 2 + static_cast<int>(gen() % 5);
    const VarianceProfile s = random_profile(gen, n);
    const Eigen::VectorXd z = sample_simplex(n, gen);
    const bool chain = gap_polytope_member(z, s);
    const bool pairwise = gap_consistent(Allocation(z), s);
    CHECK(chain == pairwise);
  }
}

TEST_CASE("region map labeling") {
  SUBCASE("the optimum is labeled improvement and gap-consistent") {
    const VarianceProfile s(vec({1, 4, 9}));
    const RegionMap map = region_map(s, 50);
    CHECK(classify_membership(map.optimal_point, s) == Membership::Improves);
    CHECK(gap_polytope_member(map.optimal_point.weights(), s));
    CHECK(map.optimal_variance == doctest::Approx(36.0 / 49).epsilon(1e-12));
  }
  SUBCASE("uniform profile has an empty improvement region") {
    const RegionMap map = region_map(VarianceProfile(vec({2, 2, 2})), 60);
    CHECK(summarize(map).improvement == 0);
  }
  SUBCASE("gap label implies improvement, hypertriangle ids are consistent") {
    const VarianceProfile s(vec({1, 2, 3}));
    const RegionMap map = region_map(s, 40);
    for (const RegionPoint& p : map.points) {
      if (p.gap_polytope) CHECK(p.membership == Membership::Improves);
      if (p.consistency == Consistency::Gap || p.consistency == Consistency::Maximal) {
        CHECK(p.gap_polytope);
      }
      if (p.hypertriangle.has_value()) {
        CHECK(in_hypertriangle(p.allocation, *p.hypertriangle));
      } else {
        CHECK(p.allocation.is_uniform_point());
      }
    }
  }
  SUBCASE("both hypertriangles of (2,1,16) lie in the improvement region") {
    const VarianceProfile s(vec({2, 1, 16}));
    const RegionMap map = region_map(s, 200);
    const PermutationOrdering t213 = PermutationOrdering::from_one_based({2, 1, 3});
    const PermutationOrdering t123 = PermutationOrdering::from_one_based({1, 2, 3});
    int covered = 0;
    for (const RegionPoint& p : map.points) {
      if (in_hypertriangle(p.allocation, t213) || in_hypertriangle(p.allocation, t123)) {
        CHECK(p.membership == Membership::Improves);
        ++covered;
      }
    }
    CHECK(covered > 1000);
  }
  SUBCASE("low resolution warns about missing interior") {
    CHECK_FALSE(region_map(VarianceProfile(vec({1, 2, 3})), 2).warnings.empty());
    CHECK(region_map(VarianceProfile(vec({1, 2, 3})), 3).warnings.empty());
  }
}

TEST_CASE("improvement region is convex on the grid") {
  const VarianceProfile s(vec({1, 3, 4}));
  const int res = 60;
  const RegionMap map = region_map(s, res);
  std::vector<const RegionPoint*> improving;
  for (const RegionPoint& p : map.points) {
    if (p.membership == Membership::Improves) improving.push_back(&p);
  }
  REQUIRE(improving.size() > 10);
  // Midpoints land exactly on the grid at double resolution.
  for (std::size_t a = 0; a < improving.size(); a += 3) {
    for (std::size_t b = a + 1; b < improving.size(); b += 3) {
      Eigen::VectorXd mid =
          0.5 * (improving[a]->allocation.weights() + improving[b]->allocation.weights());
      CHECK(classify_membership(Allocation(mid), s) == Membership::Improves);
    }
  }
}

TEST_CASE("csv export") {
  const VarianceProfile s(vec({1, 4, 9}));
  const std::string path = "test_region_out.csv";

  SUBCASE("row count and header") {
    export_region_csv(region_map(s, 2), path);
    const std::string content = slurp(path);
    CHECK(content.rfind("b1,b2,b3,membership,consistency,hypertriangle\n", 0) == 0);
    int lines = 0;
    for (char ch : content) lines += ch == '\n';
    CHECK(lines == 7);  // header + C(4,2) grid rows
  }
  SUBCASE("re-export is byte-identical") {
    export_region_csv(region_map(s, 25), path);
    const std::string first = slurp(path);
    export_region_csv(region_map(s, 25), path);
    CHECK(first == slurp(path));
    CHECK_FALSE(first.empty());
  }
  SUBCASE("improvement fraction of (1,2,3) is positive and below one half") {
    const RegionMap map = region_map(VarianceProfile(vec({1, 2, 3})), 200);
    const RegionSummary sum = summarize(map);
    const double frac = static_cast<double>(sum.improvement) / sum.total;
    CHECK(frac > 0.0);
    CHECK(frac < 0.5);
  }
  SUBCASE("export rejects other dimensions") {
    const RegionMap map = region_map(VarianceProfile(vec({1, 2, 3, 4})), 8);
    CHECK_THROWS_AS(export_region_csv(map, path), std::invalid_argument);
  }
  std::remove(path.c_str());
}
