#include <doctest.h>

#include <random>

#include "crowdwise/core.hpp"
#include "crowdwise/fd.hpp"
#include "helpers.hpp"

using namespace crowdwise;
using crowdwise::testing::random_interaction_matrix;
using crowdwise::testing::random_profile;
using crowdwise::testing::random_susceptibility;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Eigen::MatrixXd symmetric3() {
  Eigen::MatrixXd C(3, 3);
  C << 0, .5, .5, .5, 0, .5, .5, .5, 0;
  return C;
}

Eigen::MatrixXi path3() {
  Eigen::MatrixXi M(3, 3);
  M << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  return M;
}

}  // namespace

TEST_CASE("influence matrix construction") {
  const Eigen::VectorXd gamma = vec({1.0 / 9, 4.0 / 9, 1.0});
  const InfluenceNetwork net = build_influence_matrix(symmetric3(), gamma);
  CHECK(net.influence_matrix()(0, 0) == doctest::Approx(8.0 / 9).epsilon(1e-15));
  CHECK(net.influence_matrix()(1, 1) == doctest::Approx(5.0 / 9).epsilon(1e-15));
  CHECK(net.influence_matrix()(2, 2) == doctest::Approx(0.0));
  for (int i = 0; i < 3; ++i) {
    CHECK(net.influence_matrix().row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
  }

  CHECK_THROWS_AS(build_influence_matrix(symmetric3(), vec({1, 1, 1})), std::invalid_argument);
  Eigen::MatrixXd bad = symmetric3();
  bad(0, 0) = 0.1;
  bad(0, 1) = 0.45;
  bad(0, 2) = 0.45;
  CHECK_THROWS_AS(build_influence_matrix(bad, vec({.5, .5, .5})), std::invalid_argument);
  Eigen::MatrixXd nonstochastic = symmetric3();
  nonstochastic(1, 2) = 0.7;
  CHECK_THROWS_AS(build_influence_matrix(nonstochastic, vec({.5, .5, .5})),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_influence_matrix(symmetric3(), vec({.5, .5, 1.2})),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_influence_matrix(symmetric3(), vec({.5, .5, 0.0})),
                  std::invalid_argument);
}

TEST_CASE("simulation") {
  const InfluenceNetwork net = build_influence_matrix(symmetric3(), vec({.2, .5, .9}));

  SUBCASE("consensus is a fixed point") {
    const Eigen::MatrixXd traj = simulate(net, vec({.7, .7, .7}), 20);
    CHECK((traj.rowwise() - traj.row(0)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("zero steps returns the initial row") {
    const Eigen::MatrixXd traj = simulate(net, vec({1, 2, 3}), 0);
    CHECK(traj.rows() == 1);
    CHECK(traj(0, 1) == doctest::Approx(2.0));
    CHECK_THROWS_AS(simulate(net, vec({1, 2, 3}), -1), std::invalid_argument);
    CHECK_THROWS_AS(simulate(net, vec({1, 2}), 5), std::invalid_argument);
  }
  SUBCASE("each step is a convex combination") {
    const Eigen::MatrixXd traj = simulate(net, vec({-3, 0.25, 11}), 30);
    for (int k = 1; k <= 30; ++k) {
      CHECK(traj.row(k).minCoeff() >= traj.row(k - 1).minCoeff() - 1e-14);
      CHECK(traj.row(k).maxCoeff() <= traj.row(k - 1).maxCoeff() + 1e-14);
    }
  }
}

TEST_CASE("stationary social power on the maximal PAP instance") {
  // Democratic network, susceptibilities proportional to variances (1,4,9):
  // the stationary power is exactly the optimal allocation of (1,4,9).
  const Eigen::VectorXd gamma = vec({1.0 / 9, 4.0 / 9, 1.0});
  const InfluenceNetwork net = build_influence_matrix(symmetric3(), gamma);
  const Allocation power = stationary_social_power(net);
  CHECK(power[0] == doctest::Approx(36.0 / 49).epsilon(1e-11));
  CHECK(power[1] == doctest::Approx(9.0 / 49).epsilon(1e-11));
  CHECK(power[2] == doctest::Approx(4.0 / 49).epsilon(1e-11));

  const VarianceProfile s(vec({1, 4, 9}));
  const OptimalAllocation opt = optimal_allocation(s);
  CHECK((power.weights() - opt.x.weights()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(collective_variance(power, s) == doctest::Approx(opt.variance).epsilon(1e-9));

  // Trajectory from (1,0,0) converges to consensus at power[0].
  const Eigen::MatrixXd traj = simulate(net, vec({1, 0, 0}), 600);
  CHECK((traj.row(600).array() - power[0]).abs().maxCoeff() < 1e-9);
}

TEST_CASE("centrality") {
  SUBCASE("doubly stochastic matrices are democratic") {
    const CentralityVector c = centrality(symmetric3());
    CHECK((c.values.array() - 1.0 / 3).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("equal-neighbor path graph, periodic chain") {
    const Eigen::MatrixXd C = equal_neighbor(path3());
    CHECK(C(0, 1) == doctest::Approx(1.0));
    CHECK(C(1, 0) == doctest::Approx(0.5));
    const CentralityVector c = centrality(C);
    CHECK(c.values[0] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(c.values[1] == doctest::Approx(0.50).epsilon(1e-10));
    CHECK(c.values[2] == doctest::Approx(0.25).epsilon(1e-10));
  }
  SUBCASE("star center holds score one half") {
    Eigen::MatrixXi M(4, 4);
    M << 0, 1, 1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0;
    const Eigen::MatrixXd C = equal_neighbor(M);
    CHECK(C(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(C(1, 0) == doctest::Approx(1.0));
    const CentralityVector c = centrality(C);
    CHECK(c.values[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(c.values[1] == doctest::Approx(1.0 / 6).epsilon(1e-9));
  }
  SUBCASE("reducible matrices are rejected with their sink components") {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 3);
    C(0, 1) = 1.0;  // node 0 feeds the sink {1,2}
    C(1, 2) = 1.0;
    C(2, 1) = 1.0;
    try {
      centrality(C);
      FAIL("expected ReducibleMatrixError");
    } catch (const ReducibleMatrixError& e) {
      REQUIRE(e.sink_components.size() == 1);
      CHECK(e.sink_components[0] == std::vector<int>{1, 2});
    }
  }
}

TEST_CASE("equal neighbor validation") {
  Eigen::MatrixXi disconnected(4, 4);
  disconnected << 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
  CHECK_THROWS_AS(equal_neighbor(disconnected), std::invalid_argument);
  Eigen::MatrixXi selfloop = path3();
  selfloop(1, 1) = 1;
  CHECK_THROWS_AS(equal_neighbor(selfloop), std::invalid_argument);
  Eigen::MatrixXi asymmetric = path3();
  asymmetric(0, 2) = 1;
  CHECK_THROWS_AS(equal_neighbor(asymmetric), std::invalid_argument);

  // Complete graph: every off-diagonal weight 1/2.
  Eigen::MatrixXi K3(3, 3);
  K3 << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  const Eigen::MatrixXd C = equal_neighbor(K3);
  CHECK(C(0, 1) == doctest::Approx(0.5));
  CHECK(C(2, 0) == doctest::Approx(0.5));
}

TEST_CASE("susceptibility estimation") {
  std::mt19937_64 gen(11);

  SUBCASE("round trip through one dynamics step") {
    for (int rep = 0; rep < 50; ++rep) {
      const int n = 3 + static_cast<int>(gen() % 4);
      const Eigen::MatrixXd C = random_interaction_matrix(gen, n);
      const Eigen::VectorXd gamma = random_susceptibility(gen, n);
      const InfluenceNetwork net = build_influence_matrix(C, gamma);
      std::uniform_real_distribution<double> y_dist(-5.0, 5.0);
      Eigen::VectorXd y0(n);
      for (int i = 0; i < n; ++i) y0[i] = y_dist(gen);
      const Eigen::MatrixXd traj = simulate(net, y0, 1);
      const SusceptibilityEstimate est =
          estimate_susceptibility(C, traj.row(0).transpose(), traj.row(1).transpose());
      for (int i = 0; i < n; ++i) {
        if (est.observable[i]) {
          CHECK(est.gamma[i] == doctest::Approx(gamma[i]).epsilon(1e-10));
        }
      }
    }
  }
  SUBCASE("consensus state is fully unobservable") {
    const SusceptibilityEstimate est =
        estimate_susceptibility(symmetric3(), vec({2, 2, 2}), vec({2, 2, 2}));
    for (bool obs : est.observable) CHECK_FALSE(obs);
  }
  SUBCASE("an individual at its neighborhood average is flagged") {
    // Node 2 of the path graph sees the average of 1 and 3.
    const Eigen::MatrixXd C = equal_neighbor(path3());
    const Eigen::VectorXd gamma = vec({.3, .6, .9});
    const InfluenceNetwork net = build_influence_matrix(C, gamma);
    const Eigen::VectorXd y0 = vec({1.0, 2.0, 3.0});
    const Eigen::MatrixXd traj = simulate(net, y0, 1);
    const SusceptibilityEstimate est =
        estimate_susceptibility(C, traj.row(0).transpose(), traj.row(1).transpose());
    CHECK(est.observable[0]);
    CHECK_FALSE(est.observable[1]);
    CHECK(est.observable[2]);
    CHECK(est.gamma[0] == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(est.gamma[2] == doctest::Approx(0.9).epsilon(1e-10));
  }
}

TEST_CASE("PAP classification") {
  CHECK(classify_pap(Population(VarianceProfile(vec({1, 4, 9})), vec({1.0 / 9, 4.0 / 9, 1.0}))) ==
        PapGrade::MaximalPap);
  CHECK(classify_pap(Population(VarianceProfile(vec({1, 2})), vec({0.5, 0.8}))) ==
        PapGrade::StrongPap);
  CHECK(classify_pap(Population(VarianceProfile(vec({1, 2, 3})), vec({0.5, 0.5, 0.5}))) ==
        PapGrade::NotPap);
  // Ordered but too resistant at the top: PAP without the strong bound.
  CHECK(classify_pap(Population(VarianceProfile(vec({1, 2})), vec({0.1, 0.8}))) ==
        PapGrade::Pap);
  // Uniform susceptibilities on a uniform profile stay maximal.
  CHECK(classify_pap(Population(VarianceProfile(vec({2, 2})), vec({0.5, 0.5}))) ==
        PapGrade::MaximalPap);
}

TEST_CASE("uniform susceptibility makes power equal centrality") {
  std::mt19937_64 gen(181);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3 + static_cast<int>(gen() % 4);
    const Eigen::MatrixXd C = random_interaction_matrix(gen, n);
    const InfluenceNetwork net = build_influence_matrix(C, Eigen::VectorXd::Constant(n, 0.5));
    const Allocation power = stationary_social_power(net);
    const CentralityVector c = centrality(C);
    CHECK((power.weights() - c.values).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("stationary power agrees with the centrality ratio identity") {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 3 + static_cast<int>(gen() % 6);
    const Eigen::MatrixXd C = random_interaction_matrix(gen, n);
    const Eigen::VectorXd gamma = random_susceptibility(gen, n);
    const InfluenceNetwork net = build_influence_matrix(C, gamma);
    const Allocation direct = stationary_social_power(net);
    const Allocation via_ratio = stationary_power_from_centrality(centrality(C), gamma);
    CHECK((direct.weights() - via_ratio.weights()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("column averages of matrix powers converge to the social power") {
  std::mt19937_64 gen(31);
  const int n = 5;
  const Eigen::MatrixXd C = random_interaction_matrix(gen, n);
  const Eigen::VectorXd gamma = random_susceptibility(gen, n);
  const InfluenceNetwork net = build_influence_matrix(C, gamma);
  const Allocation power = stationary_social_power(net);

  Eigen::MatrixXd Wk = net.influence_matrix();
  for (int doubling = 0; doubling < 8; ++doubling) Wk = Wk * Wk;  // W^256
  const Eigen::VectorXd column_average = Wk.colwise().mean().transpose();
  CHECK((column_average - power.weights()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("consensus value equals the power-weighted initial estimates") {
  std::mt19937_64 gen(77);
  const int n = 4;
  const Eigen::MatrixXd C = random_interaction_matrix(gen, n);
  const Eigen::VectorXd gamma = random_susceptibility(gen, n);
  const InfluenceNetwork net = build_influence_matrix(C, gamma);
  const Allocation power = stationary_social_power(net);
  const Eigen::VectorXd y0 = vec({0.3, -1.2, 4.0, 0.9});
  const Eigen::MatrixXd traj = simulate(net, y0, 400);
  const double predicted = power.weights().dot(y0);
  CHECK((traj.row(400).array() - predicted).abs().maxCoeff() < 1e-9);
  CHECK(traj.row(400).mean() == doctest::Approx(predicted).epsilon(1e-9));
}

TEST_CASE("corollary 1") {
  const VarianceProfile s(vec({1, 4, 9}));
  const Eigen::VectorXd gamma_max = vec({1.0 / 9, 4.0 / 9, 1.0});

  SUBCASE("democratic centrality with a maximal PAP population") {
    const CentralityVector c{Eigen::VectorXd::Constant(3, 1.0 / 3)};
    CHECK(corollary1_check(Population(s, gamma_max), c) == Cor1Verdict::OptimalDemocraticMaxPap);
  }
  SUBCASE("perturbed centrality inside the sandwich") {
    const CentralityVector c{vec({0.32, 0.34, 0.34})};
    const Population pop(s, gamma_max);
    CHECK(corollary1_check(pop, c) == Cor1Verdict::ImprovesByGap);
    // the verdict is sound for the implied stationary power
    const Allocation x = stationary_power_from_centrality(c, gamma_max);
    CHECK(classify_membership(x, s) == Membership::Improves);
  }
  SUBCASE("uniform variances never yield a conclusion") {
    const CentralityVector c{Eigen::VectorXd::Constant(3, 1.0 / 3)};
    CHECK(corollary1_check(Population(VarianceProfile(vec({2, 2, 2})), vec({.5, .5, .5})), c) ==
          Cor1Verdict::NoConclusion);
  }
  SUBCASE("ordering clause") {
    // Centrality concentrates so much on the accurate individual that the
    // sandwich's lower bound breaks, yet the ratio chain along the improving
    // ordering (1,2,3) still decides improvement.
    const Eigen::VectorXd gamma = vec({0.5, 0.5, 0.5});
    const CentralityVector c{vec({0.8, 0.15, 0.05})};
    CHECK(corollary1_check(Population(s, gamma), c) == Cor1Verdict::ImprovesByOrdering);
    const Allocation x = stationary_power_from_centrality(c, gamma);
    CHECK(classify_membership(x, s) == Membership::Improves);
  }
}

TEST_CASE("corollary 2 democratic") {
  const Eigen::MatrixXd C = symmetric3();
  SUBCASE("maximal PAP population is optimal") {
    const Population pop(VarianceProfile(vec({1, 4, 9})), vec({1.0 / 9, 4.0 / 9, 1.0}));
    const InfluenceNetwork net = build_influence_matrix(C, pop.gamma());
    const Cor2Verdict v = corollary2_check(pop, net, NetworkKind::Democratic);
    CHECK(v.outcome == Cor2Verdict::Outcome::Optimal);
    const Allocation power = stationary_social_power(net);
    const OptimalAllocation opt = optimal_allocation(pop.sigma2());
    CHECK((power.weights() - opt.x.weights()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("strong PAP improves") {
    Eigen::MatrixXd C2(2, 2);
    C2 << 0, 1, 1, 0;
    const Population pop(VarianceProfile(vec({1, 2})), vec({0.5, 0.8}));
    const InfluenceNetwork net = build_influence_matrix(C2, pop.gamma());
    const Cor2Verdict v = corollary2_check(pop, net, NetworkKind::Democratic);
    CHECK(v.outcome == Cor2Verdict::Outcome::Improves);
    CHECK(classify_membership(stationary_social_power(net), pop.sigma2()) ==
          Membership::Improves);
  }
  SUBCASE("declared democratic must be doubly stochastic") {
    Eigen::MatrixXd lopsided(3, 3);
    lopsided << 0, .9, .1, .5, 0, .5, .5, .5, 0;
    const Population pop(VarianceProfile(vec({1, 4, 9})), vec({.5, .5, .5}));
    const InfluenceNetwork net = build_influence_matrix(lopsided, pop.gamma());
    CHECK_THROWS_AS(corollary2_check(pop, net, NetworkKind::Democratic),
                    std::invalid_argument);
  }
}

TEST_CASE("corollary 2 autocratic") {
  // Star with center 1 (0-based 0); susceptibilities matched so that the
  // stationary power is the optimum of (4,1,2).
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 3);
  C(0, 1) = 0.6;
  C(0, 2) = 0.4;
  C(1, 0) = 1.0;
  C(2, 0) = 1.0;
  const VarianceProfile s(vec({4, 1, 2}));
  const Eigen::VectorXd gamma = vec({0.8, 0.12, 0.16});
  const Population pop(s, gamma);
  const InfluenceNetwork net = build_influence_matrix(C, gamma);

  const Cor2Verdict v = corollary2_check(pop, net, NetworkKind::Autocratic, 0);
  CHECK(v.outcome == Cor2Verdict::Outcome::Optimal);

  const Allocation power = stationary_social_power(net);
  const OptimalAllocation opt = optimal_allocation(s);
  CHECK((power.weights() - opt.x.weights()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(opt.x[0] == doctest::Approx(1.0 / 7).epsilon(1e-12));

  SUBCASE("sandwiched center weights improve") {
    const VarianceProfile s2(vec({1.0, 2.0, 8.0}));
    Eigen::MatrixXd C2 = Eigen::MatrixXd::Zero(3, 3);
    C2(0, 1) = 0.55;
    C2(0, 2) = 0.45;
    C2(1, 0) = 1.0;
    C2(2, 0) = 1.0;
    const Eigen::VectorXd g3 = vec({0.9, 0.6, 0.5});
    const Population pop2(s2, g3);
    const InfluenceNetwork net2 = build_influence_matrix(C2, g3);
    const Cor2Verdict verdict = corollary2_check(pop2, net2, NetworkKind::Autocratic, 0);
    CHECK(verdict.outcome == Cor2Verdict::Outcome::Improves);
    CHECK(classify_membership(stationary_social_power(net2), s2) == Membership::Improves);
  }
  SUBCASE("declared autocratic must be an exact star") {
    CHECK_THROWS_AS(corollary2_check(pop, build_influence_matrix(symmetric3(), gamma),
                                     NetworkKind::Autocratic, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("corollary 3") {
  const VarianceProfile s(vec({1, 4, 9}));
  SUBCASE("centrality favoring the inaccurate undermines") {
    const Eigen::VectorXd gamma = vec({0.5, 0.5, 0.5});
    const CentralityVector c{vec({0.2, 0.3, 0.5})};
    CHECK(corollary3_check(Population(s, gamma), c) == Cor3Verdict::Undermines);
    CHECK(classify_membership(stationary_power_from_centrality(c, gamma), s) ==
          Membership::Undermines);
  }
  SUBCASE("uniform variances yield no conclusion") {
    const CentralityVector c{vec({0.2, 0.3, 0.5})};
    CHECK(corollary3_check(Population(VarianceProfile(vec({3, 3, 3})), vec({.5, .5, .5})), c) ==
          Cor3Verdict::NoConclusion);
  }
  SUBCASE("reversed ratios along an improving ordering undermine") {
    // Clause 1 needs c ratios >= gamma ratios on *all* inaccuracy-ordered
    // pairs and fails at (2,1); the chain along the improving ordering
    // (2,1,3) of (1,2,16) is reversed, so clause 2 decides.
    const VarianceProfile s2(vec({1, 2, 16}));
    const Eigen::VectorXd gamma = vec({0.5, 0.4, 0.5});
    const CentralityVector c{vec({0.35, 0.25, 0.40})};
    CHECK(corollary3_check(Population(s2, gamma), c) ==
          Cor3Verdict::UnderminesByReversedOrdering);
    CHECK(classify_membership(stationary_power_from_centrality(c, gamma), s2) ==
          Membership::Undermines);
  }
}

TEST_CASE("corollary soundness on random irreducible instances") {
  std::mt19937_64 gen(909);
  int cor1_hits = 0, cor3_hits = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const int n = 3 + static_cast<int>(gen() % 3);
    const VarianceProfile s = random_profile(gen, n);
    const Eigen::MatrixXd C = random_interaction_matrix(gen, n);
    const Eigen::VectorXd gamma = random_susceptibility(gen, n);
    const Population pop(s, gamma);
    const CentralityVector c = centrality(C);
    const Allocation power =
        stationary_social_power(build_influence_matrix(C, gamma));

    const Cor1Verdict v1 = corollary1_check(pop, c);
    if (v1 == Cor1Verdict::ImprovesByGap || v1 == Cor1Verdict::ImprovesByOrdering) {
      CHECK(classify_membership(power, s) == Membership::Improves);
      ++cor1_hits;
    }
    const Cor3Verdict v3 = corollary3_check(pop, c);
    if (v3 != Cor3Verdict::NoConclusion) {
      CHECK(classify_membership(power, s) == Membership::Undermines);
      ++cor3_hits;
    }
  }
  // random instances do trip the sufficient conditions occasionally
  CHECK(cor1_hits + cor3_hits > 0);
}
