#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "crowdwise/types.hpp"

namespace crowdwise::testing {

/// Random profile with entries in [lo, hi]; redraws until max/min >= 1.2 when
/// non-uniformity is requested, so classification margins stay healthy.
inline VarianceProfile random_profile(std::mt19937_64& gen, int n, double lo = 0.5,
                                      double hi = 5.0, bool ensure_nonuniform = true) {
  std::uniform_real_distribution<double> dist(lo, hi);
  while (true) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(gen);
    if (!ensure_nonuniform || v.maxCoeff() / v.minCoeff() >= 1.2) {
      return VarianceProfile(std::move(v));
    }
  }
}

inline VarianceProfile random_int_profile(std::mt19937_64& gen, int n, int lo = 1,
                                          int hi = 30) {
  std::uniform_int_distribution<int> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return VarianceProfile(std::move(v));
}

/// Random dense row-stochastic zero-diagonal matrix; strictly positive
/// off-diagonal entries, hence irreducible and aperiodic.
inline Eigen::MatrixXd random_interaction_matrix(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      C(i, j) = dist(gen);
      row += C(i, j);
    }
    C.row(i) /= row;
    C(i, i) = 0.0;
  }
  return C;
}

inline Eigen::VectorXd random_susceptibility(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = dist(gen);
  return g;
}

}  // namespace crowdwise::testing
