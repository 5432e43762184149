#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crowdwise/core.hpp"
#include "crowdwise/types.hpp"

namespace crowdwise {

/// Thrown when an operation needs an irreducible relative interaction matrix.
/// Social power then concentrates on the sink strongly-connected components,
/// which are reported so the caller can analyze them separately.
class ReducibleMatrixError : public std::runtime_error {
 public:
  ReducibleMatrixError(std::string what, std::vector<std::vector<int>> sinks)
      : std::runtime_error(std::move(what)), sink_components(std::move(sinks)) {}

  std::vector<std::vector<int>> sink_components;  // 0-based node ids
};

/// Relative interaction matrix C (row-stochastic, zero diagonal), the
/// susceptibility vector gamma with 0 < gamma_i <= 1 and gamma != 1_n, and
/// the derived influence matrix W = [gamma] C + I - [gamma].
class InfluenceNetwork {
 public:
  InfluenceNetwork(Eigen::MatrixXd C, Eigen::VectorXd gamma);

  int size() const { return static_cast<int>(C_.rows()); }
  const Eigen::MatrixXd& relative_interaction() const { return C_; }
  const Eigen::VectorXd& susceptibility() const { return gamma_; }
  const Eigen::MatrixXd& influence_matrix() const { return W_; }

 private:
  Eigen::MatrixXd C_;
  Eigen::VectorXd gamma_;
  Eigen::MatrixXd W_;
};

InfluenceNetwork build_influence_matrix(Eigen::MatrixXd C, Eigen::VectorXd gamma);

struct CentralityVector {
  Eigen::VectorXd values;  // interior simplex point with c^T C = c^T
};

/// A group characterized by variances and susceptibilities.
class Population {
 public:
  Population(VarianceProfile sigma2, Eigen::VectorXd gamma);

  int size() const { return sigma2_.size(); }
  const VarianceProfile& sigma2() const { return sigma2_; }
  const Eigen::VectorXd& gamma() const { return gamma_; }

 private:
  VarianceProfile sigma2_;
  Eigen::VectorXd gamma_;
};

/// Strongly connected components of the digraph of C (edge i->j iff
/// C_ij > 0); second member lists the sink components.
struct SccPartition {
  std::vector<std::vector<int>> components;
  std::vector<std::vector<int>> sinks;
};
SccPartition strongly_connected_components(const Eigen::MatrixXd& C);
bool is_irreducible(const Eigen::MatrixXd& C);

/// y(0..steps) under y(k+1) = W y(k), one row per time step.
Eigen::MatrixXd simulate(const InfluenceNetwork& net, const Eigen::VectorXd& y0,
                         int steps);

/// Left dominant eigenvector of W on the simplex, by power iteration from
/// 1_n/n (tolerance on the 1-norm increment). Requires irreducible C.
Allocation stationary_social_power(const InfluenceNetwork& net,
                                   double tol = kDefaultTol,
                                   long max_iterations = 1000000);

/// Left dominant eigenvector of C. Periodic chains are handled by switching
/// to averaged iterates when the increment pattern stalls.
CentralityVector centrality(const Eigen::MatrixXd& C, double tol = kDefaultTol,
                            long max_iterations = 1000000);

/// Stationary power from the ratio identity x_i proportional to c_i/gamma_i;
/// the algebraic cross-check for the power-iteration route.
Allocation stationary_power_from_centrality(const CentralityVector& c,
                                            const Eigen::VectorXd& gamma);

/// Equal-neighbor relative interaction matrix of a connected undirected
/// graph: rows of the adjacency matrix normalized by degree.
Eigen::MatrixXd equal_neighbor(const Eigen::MatrixXi& adjacency);

struct SusceptibilityEstimate {
  Eigen::VectorXd gamma;        // meaningful only where observable
  std::vector<bool> observable; // false where the denominator vanishes
};

/// Recovers gamma_i = (y_i(k+1)-y_i(k)) / (sum_j C_ij y_j(k) - y_i(k)) from
/// one transition; entries whose denominator is below denom_tol are flagged.
SusceptibilityEstimate estimate_susceptibility(const Eigen::MatrixXd& C,
                                               const Eigen::VectorXd& y_k,
                                               const Eigen::VectorXd& y_k1,
                                               double denom_tol = 1e-8);

enum class PapGrade { NotPap, Pap, StrongPap, MaximalPap };

/// Strongest grade of alignment between susceptibility and variance:
/// more accurate individuals are (progressively more tightly) less
/// susceptible.
PapGrade classify_pap(const Population& pop, double tol = kDefaultTol);

enum class Cor1Verdict {
  ImprovesByGap,
  OptimalDemocraticMaxPap,
  ImprovesByOrdering,
  NoConclusion,
};

/// Sufficient conditions on (sigma^2, gamma, c) in an irreducible network:
/// democratic + maximal-PAP optimality, the centrality/susceptibility
/// sandwich, or an improving ordering matched by the c/gamma ratio chain.
Cor1Verdict corollary1_check(const Population& pop, const CentralityVector& c,
                             double tol = kDefaultTol);

enum class NetworkKind { Democratic, Autocratic };

struct Cor2Verdict {
  enum class Outcome { Optimal, Improves, NoConclusion };
  Outcome outcome;
  std::string detail;
};

/// Democratic (doubly stochastic C) and autocratic (star topology) special
/// cases. `center` is the star's 0-based center node; ignored for Democratic.
Cor2Verdict corollary2_check(const Population& pop, const InfluenceNetwork& net,
                             NetworkKind kind, int center = -1,
                             double tol = kDefaultTol);

enum class Cor3Verdict { Undermines, UnderminesByReversedOrdering, NoConclusion };

/// Sufficient conditions for undermining: centrality favoring the inaccurate
/// against susceptibility, or a reversed improving ordering.
Cor3Verdict corollary3_check(const Population& pop, const CentralityVector& c,
                             double tol = kDefaultTol);

bool is_doubly_stochastic(const Eigen::MatrixXd& C, double tol = kDefaultTol);

/// Center of an exact star topology (non-center rows equal to e_center), or
/// nullopt if C is not a star.
std::optional<int> star_center(const Eigen::MatrixXd& C);

const char* to_string(PapGrade g);
const char* to_string(Cor1Verdict v);
const char* to_string(Cor2Verdict::Outcome o);
const char* to_string(Cor3Verdict v);

}  // namespace crowdwise
