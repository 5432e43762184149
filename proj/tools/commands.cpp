#include "commands.hpp"

#include <fstream>

#include "crowdwise/core.hpp"
#include "crowdwise/fd.hpp"
#include "crowdwise/orderings.hpp"
#include "crowdwise/region.hpp"

namespace crowdwise::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw InstanceError("instance." + path + ": " + why);
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "must be a number");
  return j.get<double>();
}

Eigen::VectorXd vector_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "must be a non-empty array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = number_at(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd matrix_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) fail(row_path, "must be an array (row of the matrix)");
    if (r == 0) {
      cols = j[r].size();
      m.resize(rows, cols);
    } else if (j[r].size() != cols) {
      fail(row_path, "rows must all have the same length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number_at(j[r][c], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json orderings_to_json(const std::vector<PermutationOrdering>& taus) {
  json out = json::array();
  for (const auto& tau : taus) out.push_back(tau.to_one_based());
  return out;
}

template <typename Fn>
auto rewrap(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

}  // namespace

Instance parse_instance(const json& j) {
  if (!j.is_object()) throw InstanceError("instance: top level must be a JSON object");
  static const char* known[] = {"sigma2", "x", "gamma", "C", "adjacency",
                                "mu",     "seed", "rational"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InstanceError("instance." + key + ": unknown key");
  }
  if (!j.contains("sigma2")) throw InstanceError("instance.sigma2: required key missing");

  const bool rational = j.value("rational", false);
  std::optional<std::vector<Rational>> sigma2_rational;
  Eigen::VectorXd sigma2_values;

  if (rational) {
    const json& arr = j["sigma2"];
    if (!arr.is_array() || arr.empty()) fail("sigma2", "must be a non-empty array");
    std::vector<Rational> rs;
    sigma2_values.resize(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "sigma2[" + std::to_string(i) + "]";
      Rational r(0);
      if (arr[i].is_string()) {
        r = rewrap(path, [&] { return Rational::from_decimal_string(arr[i].get<std::string>()); });
      } else if (arr[i].is_number_integer()) {
        r = Rational(arr[i].get<std::int64_t>());
      } else {
        fail(path, "rational mode needs integers or decimal strings");
      }
      if (!(Rational(0) < r)) fail(path, "must be a positive variance");
      rs.push_back(r);
      sigma2_values[static_cast<Eigen::Index>(i)] = r.to_double();
    }
    sigma2_rational = std::move(rs);
  } else {
    sigma2_values = vector_at(j["sigma2"], "sigma2");
  }

  Instance inst{
      rewrap("sigma2", [&] { return VarianceProfile(sigma2_values); }),
      std::move(sigma2_rational),
      std::nullopt,
      std::nullopt,
      std::nullopt,
      std::nullopt,
      0.0,
      0,
  };
  const int n = inst.sigma2.size();

  if (j.contains("x")) {
    Eigen::VectorXd x = vector_at(j["x"], "x");
    if (x.size() != n) fail("x", "length must match sigma2");
    inst.x = rewrap("x", [&] { return Allocation(std::move(x)); });
  }
  if (j.contains("gamma")) {
    Eigen::VectorXd g = vector_at(j["gamma"], "gamma");
    if (g.size() != n) fail("gamma", "length must match sigma2");
    inst.gamma = std::move(g);
  }
  if (j.contains("C") && j.contains("adjacency")) {
    throw InstanceError("instance.C: mutually exclusive with adjacency");
  }
  if (j.contains("C")) {
    Eigen::MatrixXd C = matrix_at(j["C"], "C");
    if (C.rows() != n || C.cols() != n) fail("C", "must be n x n with n = len(sigma2)");
    inst.C = std::move(C);
  }
  if (j.contains("adjacency")) {
    Eigen::MatrixXd a = matrix_at(j["adjacency"], "adjacency");
    if (a.rows() != n || a.cols() != n) fail("adjacency", "must be n x n with n = len(sigma2)");
    Eigen::MatrixXi m(a.rows(), a.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        if (a(r, c) != 0.0 && a(r, c) != 1.0) {
          fail("adjacency[" + std::to_string(r) + "][" + std::to_string(c) + "]",
               "entries must be 0 or 1");
        }
        m(r, c) = static_cast<int>(a(r, c));
      }
    }
    inst.adjacency = std::move(m);
  }
  if (j.contains("mu")) inst.mu = number_at(j["mu"], "mu");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) fail("seed", "must be an integer");
    inst.seed = j["seed"].get<std::uint64_t>();
  }
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("instance: cannot open file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InstanceError(std::string("instance: JSON parse error: ") + e.what());
  }
  return parse_instance(j);
}

CommandResult cmd_analyze(const Instance& inst, double tol) {
  if (!inst.x.has_value()) throw InstanceError("instance.x: required by analyze");
  const RegionVerdict verdict = analyze_allocation(*inst.x, inst.sigma2, tol);
  const OptimalAllocation opt = optimal_allocation(inst.sigma2);
  json out{
      {"membership", to_string(verdict.membership)},
      {"consistency", to_string(verdict.consistency)},
      {"collective_variance", verdict.collective_variance},
      {"baseline_variance", verdict.baseline_variance},
      {"optimal_allocation", vector_to_json(opt.x.weights())},
      {"optimal_variance", opt.variance},
      {"tol", tol},
  };
  return {out, 0};
}

CommandResult cmd_mpg(const Instance& inst, bool oracle, int oracle_cap) {
  const std::vector<int> order = inst.sigma2.ascending_order();
  const VarianceProfile sorted = inst.sigma2.sorted_ascending();

  std::vector<PermutationOrdering> sorted_taus;
  bool exact = false;
  if (inst.sigma2_rational.has_value()) {
    std::vector<Rational> rs;
    for (int idx : order) rs.push_back((*inst.sigma2_rational)[idx]);
    sorted_taus = mpg(rs);
    exact = true;
  } else {
    sorted_taus = mpg(sorted);
  }

  // Report in the instance's original labels.
  std::vector<PermutationOrdering> original_taus;
  for (const auto& tau : sorted_taus) {
    std::vector<int> relabeled(tau.size());
    for (int k = 0; k < tau.size(); ++k) relabeled[k] = order[tau[k]];
    original_taus.emplace_back(std::move(relabeled));
  }
  std::sort(original_taus.begin(), original_taus.end());

  std::vector<int> relabeling_one_based(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) relabeling_one_based[i] = order[i] + 1;

  const MpgState state = mpg_analyze(sorted);
  json out{
      {"ascending_relabeling", relabeling_one_based},
      {"sorted_sigma2", vector_to_json(sorted.values())},
      {"orderings", orderings_to_json(original_taus)},
      {"count", original_taus.size()},
      {"segments", state.d},
      {"candidate_count", state.candidate_count},
      {"exact_arithmetic", exact},
  };

  int exit_code = 0;
  if (oracle) {
    const std::vector<PermutationOrdering> reference =
        enumerate_improving_orderings(sorted, oracle_cap);
    const bool agree = reference == sorted_taus;
    out["oracle_agrees"] = agree;
    if (!agree) exit_code = 2;
  }
  return {out, exit_code};
}

CommandResult cmd_region(const Instance& inst, int resolution, const std::string& out_path,
                         double tol) {
  if (inst.sigma2.size() != 3) {
    throw InstanceError("instance.sigma2: region export needs exactly 3 individuals");
  }
  const RegionMap map = region_map(inst.sigma2, resolution, tol);
  export_region_csv(map, out_path);
  const RegionSummary s = summarize(map);
  const double total = static_cast<double>(s.total);
  json out{
      {"csv_path", out_path},
      {"resolution", resolution},
      {"points", s.total},
      {"fractions",
       {{"improvement", s.improvement / total},
        {"undermining", s.undermining / total},
        {"neutral", s.neutral / total},
        {"ordering_consistent", s.ordering_consistent / total},
        {"gap_consistent", s.gap_consistent / total}}},
      {"optimal_point", vector_to_json(map.optimal_point.weights())},
      {"optimal_variance", map.optimal_variance},
      {"warnings", map.warnings},
  };
  return {out, 0};
}

CommandResult cmd_fd(const Instance& inst, int steps, bool power_details, double tol) {
  if (!inst.gamma.has_value()) throw InstanceError("instance.gamma: required by fd");
  if (!inst.C.has_value() && !inst.adjacency.has_value()) {
    throw InstanceError("instance.C: fd needs C or adjacency");
  }
  Eigen::MatrixXd C = inst.C.has_value() ? *inst.C : equal_neighbor(*inst.adjacency);
  const InfluenceNetwork net = build_influence_matrix(C, *inst.gamma);
  const Population pop(inst.sigma2, *inst.gamma);

  const Allocation power = stationary_social_power(net, tol);
  const CentralityVector c = centrality(net.relative_interaction(), tol);
  const Allocation power_ratio = stationary_power_from_centrality(c, *inst.gamma);
  const RegionVerdict verdict = analyze_allocation(power, inst.sigma2, tol);

  json out{
      {"W", matrix_to_json(net.influence_matrix())},
      {"stationary_power", vector_to_json(power.weights())},
      {"centrality", vector_to_json(c.values)},
      {"pap_grade", to_string(classify_pap(pop, tol))},
      {"membership", to_string(verdict.membership)},
      {"consistency", to_string(verdict.consistency)},
      {"collective_variance", verdict.collective_variance},
      {"baseline_variance", verdict.baseline_variance},
      {"corollary1", to_string(corollary1_check(pop, c, tol))},
      {"corollary3", to_string(corollary3_check(pop, c, tol))},
  };

  // Corollary 2 applies to the recognized special topologies.
  if (is_doubly_stochastic(net.relative_interaction(), tol)) {
    const Cor2Verdict v = corollary2_check(pop, net, NetworkKind::Democratic, -1, tol);
    out["corollary2"] = {{"kind", "democratic"},
                         {"verdict", to_string(v.outcome)},
                         {"detail", v.detail}};
  } else if (const std::optional<int> center = star_center(net.relative_interaction())) {
    const Cor2Verdict v = corollary2_check(pop, net, NetworkKind::Autocratic, *center, tol);
    out["corollary2"] = {{"kind", "autocratic"},
                         {"center", *center + 1},
                         {"verdict", to_string(v.outcome)},
                         {"detail", v.detail}};
  } else {
    out["corollary2"] = {{"kind", "none"}, {"verdict", "NoConclusion"}, {"detail", ""}};
  }

  if (power_details) {
    out["power_iteration"] = {
        {"ratio_formula_power", vector_to_json(power_ratio.weights())},
        {"max_abs_disagreement",
         (power.weights() - power_ratio.weights()).cwiseAbs().maxCoeff()},
    };
  }

  if (steps > 0) {
    const EstimateModel model{inst.mu, inst.sigma2, Distribution::Gaussian, inst.seed};
    const Eigen::VectorXd y0 = sample_initials(model, 1).row(0).transpose();
    const Eigen::MatrixXd traj = simulate(net, y0, steps);
    const double consensus = power.weights().dot(y0);
    out["trajectory"] = {
        {"steps", steps},
        {"y0", vector_to_json(y0)},
        {"y_final", vector_to_json(traj.row(steps).transpose())},
        {"predicted_consensus", consensus},
        {"max_abs_gap", (traj.row(steps).transpose().array() - consensus).abs().maxCoeff()},
    };
  }
  return {out, 0};
}

CommandResult cmd_mc(const Instance& inst, long trials, Distribution dist) {
  if (!inst.x.has_value()) throw InstanceError("instance.x: required by mc");
  if (trials < 1000) throw InstanceError("instance: mc needs --trials >= 1000");
  const EstimateModel model{inst.mu, inst.sigma2, dist, inst.seed};
  const McReport report = mc_collective_variance(*inst.x, model, trials);
  const bool pass = report.variance_within_gate && report.mean_within_gate;
  json out{
      {"trials", report.trials},
      {"distribution", to_string(dist)},
      {"mu", inst.mu},
      {"seed", inst.seed},
      {"empirical_mean", report.empirical_mean},
      {"empirical_variance", report.empirical_variance},
      {"analytic_variance", report.analytic_variance},
      {"stderr_of_variance", report.stderr_of_variance},
      {"stderr_of_mean", report.stderr_of_mean},
      {"variance_within_gate", report.variance_within_gate},
      {"mean_within_gate", report.mean_within_gate},
      {"gate_passed", pass},
  };
  return {out, pass ? 0 : 2};
}

}  // namespace crowdwise::cli
