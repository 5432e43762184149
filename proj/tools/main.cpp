#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "crowdwise/fd.hpp"

namespace {

int run(int argc, char** argv) {
  using crowdwise::cli::CommandResult;
  using crowdwise::cli::Instance;

  CLI::App app{"Social-power analysis of crowd wisdom under weighted-average opinion dynamics"};
  app.require_subcommand(1);

  std::string instance_path;
  double tol = 1e-12;
  bool oracle = false;
  int oracle_cap = 9;
  int resolution = 200;
  std::string out_path = "region.csv";
  int steps = 0;
  bool power_details = false;
  long trials = 100000;
  std::string dist_name = "gaussian";

  CLI::App* analyze = app.add_subcommand("analyze", "Classify an allocation against a variance profile");
  analyze->add_option("instance", instance_path, "instance JSON file")->required();
  analyze->add_option("--tol", tol, "classification tolerance");

  CLI::App* mpg_cmd = app.add_subcommand("mpg", "All orderings whose hypertriangle improves the wisdom");
  mpg_cmd->add_option("instance", instance_path, "instance JSON file")->required();
  mpg_cmd->add_flag("--oracle", oracle, "also run the factorial enumeration oracle and compare");
  mpg_cmd->add_option("--cap", oracle_cap, "largest group size the oracle accepts");

  CLI::App* region = app.add_subcommand("region", "Grid classification of the 3-simplex, CSV export");
  region->add_option("instance", instance_path, "instance JSON file")->required();
  region->add_option("--resolution", resolution, "barycentric subdivisions per axis");
  region->add_option("--out", out_path, "output CSV path");
  region->add_option("--tol", tol, "classification tolerance");

  CLI::App* fd = app.add_subcommand("fd", "French-DeGroot pipeline: influence matrix, power, verdicts");
  fd->add_option("instance", instance_path, "instance JSON file")->required();
  fd->add_option("--steps", steps, "simulate a trajectory of this many steps");
  fd->add_flag("--power", power_details, "report the ratio-formula cross-check");
  fd->add_option("--tol", tol, "classification tolerance");

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo check of the collective variance law");
  mc->add_option("instance", instance_path, "instance JSON file")->required();
  mc->add_option("--trials", trials, "number of trials (>= 1000)");
  mc->add_option("--dist", dist_name, "gaussian | uniform")
      ->check(CLI::IsMember({"gaussian", "uniform"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    const Instance inst = crowdwise::cli::load_instance(instance_path);
    CommandResult result{nlohmann::json{}, 0};
    if (analyze->parsed()) {
      result = crowdwise::cli::cmd_analyze(inst, tol);
    } else if (mpg_cmd->parsed()) {
      result = crowdwise::cli::cmd_mpg(inst, oracle, oracle_cap);
    } else if (region->parsed()) {
      result = crowdwise::cli::cmd_region(inst, resolution, out_path, tol);
    } else if (fd->parsed()) {
      result = crowdwise::cli::cmd_fd(inst, steps, power_details, tol);
    } else if (mc->parsed()) {
      const auto dist = dist_name == "uniform" ? crowdwise::Distribution::UniformMatched
                                               : crowdwise::Distribution::Gaussian;
      result = crowdwise::cli::cmd_mc(inst, trials, dist);
    }
    std::cout << result.output.dump(2) << "\n";
    return result.exit_code;
  } catch (const crowdwise::ReducibleMatrixError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "sink components (1-based):";
    for (const auto& component : e.sink_components) {
      std::cerr << " {";
      for (std::size_t i = 0; i < component.size(); ++i) {
        std::cerr << (i ? "," : "") << component[i] + 1;
      }
      std::cerr << "}";
    }
    std::cerr << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
