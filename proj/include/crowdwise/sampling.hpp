#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "crowdwise/orderings.hpp"

namespace crowdwise {

/// Dirichlet(1,...,1) draw: uniform over the n-simplex.
template <typename Urbg>
Eigen::VectorXd sample_simplex(int n, Urbg& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd z(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = unit(gen);
    while (u <= 0.0) u = unit(gen);
    z[i] = -std::log(u);
    total += z[i];
  }
  return z / total;
}

/// Uniform draw inside the hypertriangle of tau: sample the simplex, sort
/// descending, place the k-th largest component at position tau_k.
template <typename Urbg>
Eigen::VectorXd sample_hypertriangle(const PermutationOrdering& tau, Urbg& gen) {
  const int n = tau.size();
  Eigen::VectorXd w = sample_simplex(n, gen);
  std::sort(w.data(), w.data() + n, std::greater<double>());
  Eigen::VectorXd z(n);
  for (int k = 0; k < n; ++k) z[tau[k]] = w[k];
  return z;
}

}  // namespace crowdwise
