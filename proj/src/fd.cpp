#include "crowdwise/fd.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "crowdwise/orderings.hpp"

namespace crowdwise {

namespace {

void validate_gamma(const Eigen::VectorXd& gamma) {
  if (gamma.size() < 2) {
    throw std::invalid_argument("susceptibility vector must have size >= 2");
  }
  bool any_below_one = false;
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    if (!(gamma[i] > 0.0) || gamma[i] > 1.0 || !std::isfinite(gamma[i])) {
      throw std::invalid_argument("susceptibilities must lie in (0, 1]");
    }
    if (gamma[i] != 1.0) any_below_one = true;
  }
  if (!any_below_one) {
    throw std::invalid_argument(
        "susceptibilities must not all equal 1 (someone must hold their own estimate)");
  }
}

void validate_relative_interaction(const Eigen::MatrixXd& C) {
  const Eigen::Index n = C.rows();
  if (n < 2 || C.cols() != n) {
    throw std::invalid_argument("relative interaction matrix must be square with n >= 2");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (C(i, i) != 0.0) {
      throw std::invalid_argument("relative interaction matrix must have zero diagonal");
    }
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (C(i, j) < 0.0 || !std::isfinite(C(i, j))) {
        throw std::invalid_argument("relative interaction weights must be nonnegative");
      }
      row_sum += C(i, j);
    }
    if (std::abs(row_sum - 1.0) > kDefaultTol) {
      throw std::invalid_argument("relative interaction matrix must be row-stochastic");
    }
  }
}

std::vector<std::vector<int>> adjacency_lists(const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(C.rows());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && C(i, j) > 0.0) adj[i].push_back(j);
    }
  }
  return adj;
}

void require_irreducible(const Eigen::MatrixXd& C, const char* op) {
  SccPartition part = strongly_connected_components(C);
  if (part.components.size() > 1) {
    throw ReducibleMatrixError(std::string(op) +
                                   ": relative interaction matrix is reducible; social "
                                   "power concentrates on the sink components",
                               std::move(part.sinks));
  }
}

}  // namespace

SccPartition strongly_connected_components(const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(C.rows());
  const std::vector<std::vector<int>> adj = adjacency_lists(C);

  // Iterative Tarjan.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> frames;
  int counter = 0;
  SccPartition out;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, ei] = frames.back();
      if (ei < adj[v].size()) {
        const int w = adj[v][ei++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          std::vector<int> component;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = static_cast<int>(out.components.size());
            component.push_back(w);
          } while (w != v);
          std::sort(component.begin(), component.end());
          out.components.push_back(std::move(component));
        }
        const int finished = v;
        frames.pop_back();
        if (!frames.empty()) {
          low[frames.back().first] = std::min(low[frames.back().first], low[finished]);
        }
      }
    }
  }

  std::vector<bool> has_out_edge(out.components.size(), false);
  for (int i = 0; i < n; ++i) {
    for (int j : adj[i]) {
      if (comp[i] != comp[j]) has_out_edge[comp[i]] = true;
    }
  }
  for (std::size_t c = 0; c < out.components.size(); ++c) {
    if (!has_out_edge[c]) out.sinks.push_back(out.components[c]);
  }
  return out;
}

bool is_irreducible(const Eigen::MatrixXd& C) {
  return strongly_connected_components(C).components.size() == 1;
}

InfluenceNetwork::InfluenceNetwork(Eigen::MatrixXd C, Eigen::VectorXd gamma)
    : C_(std::move(C)), gamma_(std::move(gamma)) {
  validate_relative_interaction(C_);
  validate_gamma(gamma_);
  if (gamma_.size() != C_.rows()) {
    throw std::invalid_argument("susceptibility vector and matrix dimensions differ");
  }
  W_ = gamma_.asDiagonal() * C_;
  W_.diagonal().array() += 1.0 - gamma_.array();
}

InfluenceNetwork build_influence_matrix(Eigen::MatrixXd C, Eigen::VectorXd gamma) {
  return InfluenceNetwork(std::move(C), std::move(gamma));
}

Population::Population(VarianceProfile sigma2, Eigen::VectorXd gamma)
    : sigma2_(std::move(sigma2)), gamma_(std::move(gamma)) {
  validate_gamma(gamma_);
  if (gamma_.size() != sigma2_.size()) {
    throw std::invalid_argument("variance profile and susceptibility dimensions differ");
  }
}

Eigen::MatrixXd simulate(const InfluenceNetwork& net, const Eigen::VectorXd& y0,
                         int steps) {
  if (y0.size() != net.size()) {
    throw std::invalid_argument("simulate: initial estimate dimension differs");
  }
  if (steps < 0) throw std::invalid_argument("simulate: steps must be >= 0");
  Eigen::MatrixXd traj(steps + 1, net.size());
  traj.row(0) = y0.transpose();
  for (int k = 0; k < steps; ++k) {
    traj.row(k + 1) = (net.influence_matrix() * traj.row(k).transpose()).transpose();
  }
  return traj;
}

namespace {

// Left power iteration on a row-stochastic matrix; the iterate stays on the
// simplex. When the 1-norm increment stalls (periodic or near-periodic
// chain), switches to averaged iterates v <- (v + M^T v)/2, which targets the
// same fixed point and converges geometrically.
Eigen::VectorXd left_stationary(const Eigen::MatrixXd& M, double tol, long max_iter,
                                const char* op) {
  const int n = static_cast<int>(M.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
  bool damped = false;
  std::deque<double> recent;
  for (long k = 0; k < max_iter; ++k) {
    Eigen::VectorXd w = M.transpose() * v;
    if (damped) w = 0.5 * (v + w);
    w /= w.sum();
    const double delta = (w - v).lpNorm<1>();
    v = std::move(w);
    if (delta < tol) return v;
    recent.push_back(delta);
    if (recent.size() > 8) recent.pop_front();
    if (!damped && k >= 16 && recent.size() == 8 && delta > 0.9 * recent.front()) {
      damped = true;
    }
  }
  throw std::runtime_error(std::string(op) + ": power iteration did not converge");
}

}  // namespace

Allocation stationary_social_power(const InfluenceNetwork& net, double tol,
                                   long max_iterations) {
  require_irreducible(net.relative_interaction(), "stationary_social_power");
  // gamma in Gamma puts at least one positive entry on the diagonal of W, so
  // irreducibility gives primitivity and the iteration converges.
  return Allocation(
      left_stationary(net.influence_matrix(), tol, max_iterations, "stationary_social_power"));
}

CentralityVector centrality(const Eigen::MatrixXd& C, double tol, long max_iterations) {
  validate_relative_interaction(C);
  require_irreducible(C, "centrality");
  return CentralityVector{left_stationary(C, tol, max_iterations, "centrality")};
}

Allocation stationary_power_from_centrality(const CentralityVector& c,
                                            const Eigen::VectorXd& gamma) {
  if (c.values.size() != gamma.size()) {
    throw std::invalid_argument("centrality and susceptibility dimensions differ");
  }
  Eigen::VectorXd x = c.values.array() / gamma.array();
  x /= x.sum();
  return Allocation(std::move(x));
}

Eigen::MatrixXd equal_neighbor(const Eigen::MatrixXi& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (n < 2 || adjacency.cols() != n) {
    throw std::invalid_argument("equal_neighbor: adjacency matrix must be square, n >= 2");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0) {
      throw std::invalid_argument("equal_neighbor: adjacency diagonal must be zero");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (adjacency(i, j) != 0 && adjacency(i, j) != 1) {
        throw std::invalid_argument("equal_neighbor: adjacency entries must be 0 or 1");
      }
      if (adjacency(i, j) != adjacency(j, i)) {
        throw std::invalid_argument("equal_neighbor: adjacency matrix must be symmetric");
      }
    }
  }
  // Connectivity by BFS.
  std::vector<bool> seen(n, false);
  std::vector<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (adjacency(v, j) == 1 && !seen[j]) {
        seen[j] = true;
        queue.push_back(static_cast<int>(j));
      }
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("equal_neighbor: graph must be connected");
  }

  Eigen::MatrixXd C(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double degree = adjacency.row(i).cast<double>().sum();
    if (degree == 0.0) {
      throw std::invalid_argument("equal_neighbor: isolated node");
    }
    for (Eigen::Index j = 0; j < n; ++j) C(i, j) = adjacency(i, j) / degree;
  }
  return C;
}

SusceptibilityEstimate estimate_susceptibility(const Eigen::MatrixXd& C,
                                               const Eigen::VectorXd& y_k,
                                               const Eigen::VectorXd& y_k1,
                                               double denom_tol) {
  validate_relative_interaction(C);
  const Eigen::Index n = C.rows();
  if (y_k.size() != n || y_k1.size() != n) {
    throw std::invalid_argument("estimate_susceptibility: estimate dimensions differ");
  }
  SusceptibilityEstimate est;
  est.gamma = Eigen::VectorXd::Zero(n);
  est.observable.assign(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double neighborhood = C.row(i).dot(y_k);
    const double denom = neighborhood - y_k[i];
    if (std::abs(denom) <= denom_tol) continue;  // individual i sits at its neighborhood average
    est.gamma[i] = (y_k1[i] - y_k[i]) / denom;
    est.observable[i] = true;
  }
  return est;
}

PapGrade classify_pap(const Population& pop, double tol) {
  const VarianceProfile& s = pop.sigma2();
  const Eigen::VectorXd& g = pop.gamma();
  const int n = pop.size();

  bool maximal = true;
  for (int i = 0; i < n && maximal; ++i) {
    if (std::abs(g[i] * s[0] - g[0] * s[i]) > tol) maximal = false;
  }
  if (maximal) return PapGrade::MaximalPap;

  bool pap = true;
  for (int i = 0; i < n && pap; ++i) {
    for (int j = 0; j < n && pap; ++j) {
      if (s[i] >= s[j] && g[i] < g[j] - tol) pap = false;
    }
  }
  if (pap && (g.maxCoeff() - g.minCoeff() <= tol) && !s.uniform()) pap = false;
  if (!pap) return PapGrade::NotPap;

  bool strong = true;
  for (int i = 0; i < n && strong; ++i) {
    for (int j = 0; j < n && strong; ++j) {
      if (s[i] >= s[j] && g[j] * s[i] < g[i] * s[j] - tol) strong = false;
    }
  }
  return strong ? PapGrade::StrongPap : PapGrade::Pap;
}

namespace {

// Orderings satisfying the prefix-average condition, translated back to the
// population's original labels. Skipped (empty result) when the candidate
// count is impractically large.
std::vector<PermutationOrdering> improving_orderings_original_labels(
    const VarianceProfile& s) {
  const std::vector<int> order = s.ascending_order();
  const VarianceProfile sorted = s.sorted_ascending();
  if (mpg_analyze(sorted).candidate_count > 500000ULL) return {};
  std::vector<PermutationOrdering> out;
  for (const PermutationOrdering& tau : mpg(sorted)) {
    std::vector<int> relabeled(tau.size());
    for (int k = 0; k < tau.size(); ++k) relabeled[k] = order[tau[k]];
    out.emplace_back(std::move(relabeled));
  }
  return out;
}

bool ratio_chain_at_least(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          const PermutationOrdering& tau, double tol) {
  // a_{tau_i}/a_{tau_{i+1}} >= b_{tau_i}/b_{tau_{i+1}} along the chain, with
  // at least one strict inequality.
  bool strict = false;
  for (int i = 0; i + 1 < tau.size(); ++i) {
    const double lhs = a[tau[i]] * b[tau[i + 1]];
    const double rhs = a[tau[i + 1]] * b[tau[i]];
    if (lhs < rhs - tol) return false;
    if (lhs > rhs + tol) strict = true;
  }
  return strict;
}

}  // namespace

Cor1Verdict corollary1_check(const Population& pop, const CentralityVector& c,
                             double tol) {
  const VarianceProfile& s = pop.sigma2();
  const Eigen::VectorXd& g = pop.gamma();
  const Eigen::VectorXd& cv = c.values;
  const int n = pop.size();
  if (cv.size() != n) {
    throw std::invalid_argument("corollary1_check: centrality dimension differs");
  }
  if (s.uniform()) return Cor1Verdict::NoConclusion;

  const bool democratic = (cv.maxCoeff() - cv.minCoeff()) <= tol;
  if (democratic && classify_pap(pop, tol) == PapGrade::MaximalPap) {
    return Cor1Verdict::OptimalDemocraticMaxPap;
  }

  // Sandwich (sigma_j^2/sigma_i^2)(gamma_i/gamma_j) <= c_i/c_j <= gamma_i/gamma_j
  // over all pairs with sigma_i^2 >= sigma_j^2, with one strict upper bound.
  bool sandwich = true;
  bool strict = false;
  for (int i = 0; i < n && sandwich; ++i) {
    for (int j = 0; j < n && sandwich; ++j) {
      if (i == j || s[i] < s[j]) continue;
      if (s[j] * g[i] * cv[j] > s[i] * g[j] * cv[i] + tol) sandwich = false;
      if (cv[i] * g[j] > cv[j] * g[i] + tol) sandwich = false;
      if (cv[i] * g[j] < cv[j] * g[i] - tol) strict = true;
    }
  }
  if (sandwich && strict) return Cor1Verdict::ImprovesByGap;

  for (const PermutationOrdering& tau : improving_orderings_original_labels(s)) {
    if (ratio_chain_at_least(cv, g, tau, tol)) return Cor1Verdict::ImprovesByOrdering;
  }
  return Cor1Verdict::NoConclusion;
}

bool is_doubly_stochastic(const Eigen::MatrixXd& C, double tol) {
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    if (std::abs(C.col(j).sum() - 1.0) > tol) return false;
  }
  return true;
}

std::optional<int> star_center(const Eigen::MatrixXd& C) {
  const Eigen::Index n = C.rows();
  for (Eigen::Index l = 0; l < n; ++l) {
    bool ok = true;
    for (Eigen::Index i = 0; i < n && ok; ++i) {
      if (i == l) continue;
      for (Eigen::Index j = 0; j < n && ok; ++j) {
        const double expected = (j == l) ? 1.0 : 0.0;
        if (C(i, j) != expected) ok = false;
      }
    }
    if (ok) return static_cast<int>(l);
  }
  return std::nullopt;
}

Cor2Verdict corollary2_check(const Population& pop, const InfluenceNetwork& net,
                             NetworkKind kind, int center, double tol) {
  const VarianceProfile& s = pop.sigma2();
  const Eigen::VectorXd& g = pop.gamma();
  const Eigen::MatrixXd& C = net.relative_interaction();
  const int n = pop.size();
  if (net.size() != n) {
    throw std::invalid_argument("corollary2_check: network dimension differs");
  }

  if (kind == NetworkKind::Democratic) {
    if (!is_doubly_stochastic(C, tol)) {
      throw std::invalid_argument("corollary2_check: declared democratic but C is not doubly stochastic");
    }
    const PapGrade grade = classify_pap(pop, tol);
    if (grade == PapGrade::MaximalPap) {
      return {Cor2Verdict::Outcome::Optimal, "maximal PAP population in a democratic network"};
    }
    if (!s.uniform() && grade == PapGrade::StrongPap) {
      return {Cor2Verdict::Outcome::Improves, "strong PAP population, non-uniform variances"};
    }
    if (grade == PapGrade::Pap && ordering_sufficiency(s.sorted_ascending())) {
      return {Cor2Verdict::Outcome::Improves,
              "PAP population and the ascending prefix-average condition holds"};
    }
    return {Cor2Verdict::Outcome::NoConclusion, ""};
  }

  // Autocratic: exact star topology around the declared center.
  const std::optional<int> detected = star_center(C);
  if (!detected.has_value() || *detected != center) {
    throw std::invalid_argument(
        "corollary2_check: declared autocratic but C is not an exact star with that center");
  }
  const int l = center;

  bool optimal = true;
  for (int i = 0; i < n && optimal; ++i) {
    if (i == l) continue;
    if (std::abs(g[i] * s[l] - g[l] * C(l, i) * s[i]) > tol) optimal = false;
  }
  if (optimal) {
    return {Cor2Verdict::Outcome::Optimal, "susceptibilities matched to center weights"};
  }

  if (!s.uniform()) {
    // Centrality is proportional to the center's weight row with 1 in the
    // center slot; the sandwich then reads exactly as gap-consistency of the
    // stationary power.
    Eigen::VectorXd chat = C.row(l).transpose();
    chat[l] = 1.0;
    bool sandwich = true;
    bool strict = false;
    for (int i = 0; i < n && sandwich; ++i) {
      for (int j = 0; j < n && sandwich; ++j) {
        if (i == j || s[i] < s[j]) continue;
        if (g[i] * s[j] * chat[j] > chat[i] * g[j] * s[i] + tol) sandwich = false;
        if (chat[i] * g[j] > chat[j] * g[i] + tol) sandwich = false;
        if (chat[i] * g[j] < chat[j] * g[i] - tol) strict = true;
      }
    }
    if (sandwich && strict) {
      return {Cor2Verdict::Outcome::Improves, "center weights within the susceptibility sandwich"};
    }
  }
  return {Cor2Verdict::Outcome::NoConclusion, ""};
}

Cor3Verdict corollary3_check(const Population& pop, const CentralityVector& c,
                             double tol) {
  const VarianceProfile& s = pop.sigma2();
  const Eigen::VectorXd& g = pop.gamma();
  const Eigen::VectorXd& cv = c.values;
  const int n = pop.size();
  if (cv.size() != n) {
    throw std::invalid_argument("corollary3_check: centrality dimension differs");
  }
  if (s.uniform()) return Cor3Verdict::NoConclusion;

  // c_i/c_j >= gamma_i/gamma_j for all sigma_i^2 >= sigma_j^2, one strict.
  bool reversed = true;
  bool strict = false;
  for (int i = 0; i < n && reversed; ++i) {
    for (int j = 0; j < n && reversed; ++j) {
      if (i == j || s[i] < s[j]) continue;
      if (cv[i] * g[j] < cv[j] * g[i] - tol) reversed = false;
      if (cv[i] * g[j] > cv[j] * g[i] + tol) strict = true;
    }
  }
  if (reversed && strict) return Cor3Verdict::Undermines;

  for (const PermutationOrdering& tau : improving_orderings_original_labels(s)) {
    if (ratio_chain_at_least(g, cv, tau, tol)) {
      return Cor3Verdict::UnderminesByReversedOrdering;
    }
  }
  return Cor3Verdict::NoConclusion;
}

const char* to_string(PapGrade grade) {
  switch (grade) {
    case PapGrade::NotPap: return "NotPAP";
    case PapGrade::Pap: return "PAP";
    case PapGrade::StrongPap: return "StrongPAP";
    case PapGrade::MaximalPap: return "MaximalPAP";
  }
  return "?";
}

const char* to_string(Cor1Verdict v) {
  switch (v) {
    case Cor1Verdict::ImprovesByGap: return "ImprovesByGap";
    case Cor1Verdict::OptimalDemocraticMaxPap: return "OptimalDemocraticMaxPAP";
    case Cor1Verdict::ImprovesByOrdering: return "ImprovesByOrdering";
    case Cor1Verdict::NoConclusion: return "NoConclusion";
  }
  return "?";
}

const char* to_string(Cor2Verdict::Outcome o) {
  switch (o) {
    case Cor2Verdict::Outcome::Optimal: return "Optimal";
    case Cor2Verdict::Outcome::Improves: return "Improves";
    case Cor2Verdict::Outcome::NoConclusion: return "NoConclusion";
  }
  return "?";
}

const char* to_string(Cor3Verdict v) {
  switch (v) {
    case Cor3Verdict::Undermines: return "Undermines";
    case Cor3Verdict::UnderminesByReversedOrdering: return "UnderminesByReversedOrdering";
    case Cor3Verdict::NoConclusion: return "NoConclusion";
  }
  return "?";
}

}  // namespace crowdwise
