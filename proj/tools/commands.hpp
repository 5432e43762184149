#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "crowdwise/rational.hpp"
#include "crowdwise/stochastics.hpp"
#include "crowdwise/types.hpp"

namespace crowdwise::cli {

/// Instance-file violation; the message names the offending key path.
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed instance file. "sigma2" is required; everything else optional.
/// With "rational": true the sigma2 entries must be integers or decimal
/// strings and are carried exactly for the ordering-condition checks.
struct Instance {
  VarianceProfile sigma2;
  std::optional<std::vector<Rational>> sigma2_rational;
  std::optional<Allocation> x;
  std::optional<Eigen::VectorXd> gamma;
  std::optional<Eigen::MatrixXd> C;
  std::optional<Eigen::MatrixXi> adjacency;
  double mu = 0.0;
  std::uint64_t seed = 0;
};

Instance parse_instance(const nlohmann::json& j);
Instance load_instance(const std::string& path);

struct CommandResult {
  nlohmann::json output;
  int exit_code;  // 0 ok, 1 input error (thrown instead), 2 gate/assertion failure
};

CommandResult cmd_analyze(const Instance& inst, double tol);
CommandResult cmd_mpg(const Instance& inst, bool oracle, int oracle_cap);
CommandResult cmd_region(const Instance& inst, int resolution, const std::string& out_path,
                         double tol);
CommandResult cmd_fd(const Instance& inst, int steps, bool power_details, double tol);
CommandResult cmd_mc(const Instance& inst, long trials, Distribution dist);

}  // namespace crowdwise::cli
