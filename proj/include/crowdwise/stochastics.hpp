#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "crowdwise/rng.hpp"
#include "crowdwise/types.hpp"

namespace crowdwise {

enum class Distribution {
  Gaussian,
  UniformMatched,  // symmetric uniform with halfwidth sqrt(3 sigma_i^2)
};

/// Generator of initial estimates y_i(0) ~ (mu, sigma_i^2), independent
/// across individuals and trials, reproducible from the seed.
struct EstimateModel {
  double mu;
  VarianceProfile sigma2;
  Distribution distribution = Distribution::Gaussian;
  std::uint64_t seed = 0;
};

/// One matrix of draws, trials x n; draw (t, i) depends only on
/// (seed, t, i), never on evaluation order.
Eigen::MatrixXd sample_initials(const EstimateModel& model, int n_trials);

struct McReport {
  long trials;
  double empirical_mean;
  double empirical_variance;
  double analytic_variance;
  double stderr_of_variance;
  double stderr_of_mean;
  bool variance_within_gate;  // |empirical - analytic| <= 4 stderr
  bool mean_within_gate;      // |empirical_mean - mu| <= 4 stderr
};

/// Monte Carlo estimate of Var[sum_i x_i y_i(0)] against the analytic value
/// sum_i x_i^2 sigma_i^2. Gates use 4 standard errors; the variance standard
/// error uses the moment-based (kurtosis-aware) formula so both distribution
/// families are covered. Requires n_trials >= 1000.
McReport mc_collective_variance(const Allocation& x, const EstimateModel& model,
                                long n_trials);

enum class ProfileRule {
  UniformBeta,    // sigma_i^2 = beta for everyone
  RandomBounded,  // sigma_i^2 uniform in [beta/10, beta]
};

enum class AllocationRule {
  Uniform,
  GapMidpoint,  // midpoint of the uniform point and the optimum: always gap-consistent
  Optimal,
};

struct TruthConvergenceConfig {
  double beta;
  std::vector<int> n_grid;
  Distribution distribution = Distribution::Gaussian;
  ProfileRule profile_rule = ProfileRule::RandomBounded;
  AllocationRule allocation_rule = AllocationRule::GapMidpoint;
  int trials = 10000;
  std::uint64_t seed = 0;
  double exceedance_threshold = 0.1;
};

struct TruthConvergenceRow {
  int n;
  double analytic_variance;   // E(x) for the constructed allocation
  double bound;               // beta / n
  double exceedance;          // empirical P(|y_col - mu| > threshold)
  double abs_err_q50;
  double abs_err_q90;
};

/// Demonstrates that improving allocations drive the collective estimate to
/// the truth as the group grows: the analytic collective variance stays below
/// beta/n and the empirical exceedance shrinks along the grid. Aborts if the
/// allocation rule fails to improve at some n (the exact uniform-profile,
/// uniform-allocation reference case is allowed through at E = beta/n).
std::vector<TruthConvergenceRow> truth_convergence_experiment(
    const TruthConvergenceConfig& config);

const char* to_string(Distribution d);

}  // namespace crowdwise
