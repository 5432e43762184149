#include "crowdwise/stochastics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crowdwise/core.hpp"

namespace crowdwise {

namespace {

double draw(const KeyedRng& rng, Distribution dist, double mu, double sigma2,
            std::uint64_t trial, std::uint64_t individual) {
  switch (dist) {
    case Distribution::Gaussian:
      return mu + std::sqrt(sigma2) * rng.gaussian(trial, individual);
    case Distribution::UniformMatched: {
      const double halfwidth = std::sqrt(3.0 * sigma2);
      return mu + halfwidth * (2.0 * rng.uniform01(trial, individual) - 1.0);
    }
  }
  return mu;
}

}  // namespace

Eigen::MatrixXd sample_initials(const EstimateModel& model, int n_trials) {
  if (n_trials < 1) throw std::invalid_argument("sample_initials: need at least one trial");
  const int n = model.sigma2.size();
  const KeyedRng rng(model.seed);
  Eigen::MatrixXd draws(n_trials, n);
  for (int t = 0; t < n_trials; ++t) {
    for (int i = 0; i < n; ++i) {
      draws(t, i) = draw(rng, model.distribution, model.mu, model.sigma2[i],
                         static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i));
    }
  }
  return draws;
}

McReport mc_collective_variance(const Allocation& x, const EstimateModel& model,
                                long n_trials) {
  if (n_trials < 1000) {
    throw std::invalid_argument("mc_collective_variance: need at least 1000 trials");
  }
  const int n = model.sigma2.size();
  if (x.size() != n) {
    throw std::invalid_argument("mc_collective_variance: allocation dimension differs");
  }
  const KeyedRng rng(model.seed);

  // Collective estimates per trial; two passes keep the moment computation
  // simple and stable.
  Eigen::VectorXd collective(n_trials);
  for (long t = 0; t < n_trials; ++t) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += x[i] * draw(rng, model.distribution, model.mu, model.sigma2[i],
                         static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i));
    }
    collective[t] = acc;
  }

  const double nt = static_cast<double>(n_trials);
  const double mean = collective.mean();
  const Eigen::ArrayXd centered = collective.array() - mean;
  const double m2 = centered.square().sum() / nt;
  const double m4 = centered.square().square().sum() / nt;
  const double s2 = m2 * nt / (nt - 1.0);

  // Var(s^2) = (mu4 - (N-3)/(N-1) sigma^4) / N, estimated from the sample.
  const double var_of_var = std::max(0.0, (m4 - (nt - 3.0) / (nt - 1.0) * s2 * s2) / nt);
  const double se_var = std::sqrt(var_of_var);
  const double se_mean = std::sqrt(s2 / nt);

  McReport report;
  report.trials = n_trials;
  report.empirical_mean = mean;
  report.empirical_variance = s2;
  report.analytic_variance = collective_variance(x, model.sigma2);
  report.stderr_of_variance = se_var;
  report.stderr_of_mean = se_mean;
  report.variance_within_gate =
      std::abs(s2 - report.analytic_variance) <= 4.0 * se_var;
  report.mean_within_gate = std::abs(mean - model.mu) <= 4.0 * se_mean;
  return report;
}

namespace {

VarianceProfile make_profile(ProfileRule rule, double beta, int n,
                             const KeyedRng& rng, std::uint64_t n_key) {
  Eigen::VectorXd sigma2(n);
  switch (rule) {
    case ProfileRule::UniformBeta:
      sigma2.setConstant(beta);
      break;
    case ProfileRule::RandomBounded:
      for (int i = 0; i < n; ++i) {
        // keyed by (n, individual) on a salt lane distinct from the trial draws
        const double u = rng.uniform01(n_key, static_cast<std::uint64_t>(i), 0xA110C8ULL);
        sigma2[i] = beta * (0.1 + 0.9 * u);
      }
      break;
  }
  return VarianceProfile(std::move(sigma2));
}

Allocation make_allocation(AllocationRule rule, const VarianceProfile& s) {
  switch (rule) {
    case AllocationRule::Uniform:
      return Allocation::uniform(s.size());
    case AllocationRule::GapMidpoint: {
      const Eigen::VectorXd opt = optimal_allocation(s).x.weights();
      Eigen::VectorXd mid =
          0.5 * (opt + Eigen::VectorXd::Constant(s.size(), 1.0 / s.size()));
      return Allocation(std::move(mid));
    }
    case AllocationRule::Optimal:
      return optimal_allocation(s).x;
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::vector<TruthConvergenceRow> truth_convergence_experiment(
    const TruthConvergenceConfig& config) {
  if (config.beta <= 0.0) {
    throw std::invalid_argument("truth_convergence_experiment: beta must be positive");
  }
  if (config.trials < 1) {
    throw std::invalid_argument("truth_convergence_experiment: need at least one trial");
  }
  const KeyedRng rng(config.seed);
  const double mu = 0.0;

  std::vector<TruthConvergenceRow> table;
  for (const int n : config.n_grid) {
    if (n < 2) {
      throw std::invalid_argument("truth_convergence_experiment: group sizes must be >= 2");
    }
    const VarianceProfile sigma2 =
        make_profile(config.profile_rule, config.beta, n, rng, static_cast<std::uint64_t>(n));
    const Allocation x = make_allocation(config.allocation_rule, sigma2);

    const Membership verdict = classify_membership(x, sigma2);
    const bool uniform_reference =
        sigma2.uniform() && x.is_uniform_point() && verdict == Membership::Neutral;
    if (verdict != Membership::Improves && !uniform_reference) {
      throw std::runtime_error(
          "truth_convergence_experiment: allocation rule fails to improve at n = " +
          std::to_string(n));
    }

    TruthConvergenceRow row;
    row.n = n;
    row.analytic_variance = collective_variance(x, sigma2);
    row.bound = config.beta / n;

    // Draw the weighted collective estimate directly; trials keyed by
    // (n ^ trial mix) to keep grid rows independent.
    std::vector<double> abs_err(config.trials);
    long exceed = 0;
    for (int t = 0; t < config.trials; ++t) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const std::uint64_t trial_key =
            (static_cast<std::uint64_t>(n) << 32) ^ static_cast<std::uint64_t>(t);
        acc += x[i] * draw(rng, config.distribution, mu, sigma2[i], trial_key,
                           static_cast<std::uint64_t>(i));
      }
      abs_err[t] = std::abs(acc - mu);
      if (abs_err[t] > config.exceedance_threshold) ++exceed;
    }
    std::sort(abs_err.begin(), abs_err.end());
    row.exceedance = static_cast<double>(exceed) / config.trials;
    row.abs_err_q50 = abs_err[static_cast<std::size_t>(0.50 * (config.trials - 1))];
    row.abs_err_q90 = abs_err[static_cast<std::size_t>(0.90 * (config.trials - 1))];
    table.push_back(row);
  }
  return table;
}

const char* to_string(Distribution d) {
  switch (d) {
    case Distribution::Gaussian: return "gaussian";
    case Distribution::UniformMatched: return "uniform";
  }
  return "?";
}

}  // namespace crowdwise
