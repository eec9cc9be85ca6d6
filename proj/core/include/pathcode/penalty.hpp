#pragma once

#include <Eigen/Dense>

#include "pathcode/flow.hpp"
#include "pathcode/graph.hpp"

namespace pathcode {

// Vectors are 0-based Eigen vectors: entry j corresponds to graph vertex j+1.

enum class PenaltyKind { Phi, Psi, L0, L1 };

// Penalty definition. `net` is non-owning and must outlive the spec; Phi
// requires nonnegative arc costs, Psi additionally a strictly positive weight
// for every path (checked on use).
struct PenaltySpec {
    const AugmentedNetwork* net = nullptr;
    PenaltyKind kind = PenaltyKind::Psi;
    double lambda = 0.0;
    FlowSolverConfig solver;
};

struct PenaltyValue {
    double value = 0.0;
    std::vector<std::pair<Path, double>> support_cover;  // (path, amount)
};

// Explicit enumeration of all paths of a tiny DAG: binary incidence matrix N
// (p x |paths|) and weight vector eta. Oracle support; exponential in general.
struct PathBasis {
    std::vector<Path> paths;
    Eigen::MatrixXd N;
    Eigen::VectorXd eta;
};

struct DualNormResult {
    double tau = 0.0;
    Path witness;
    int iterations = 0;
};

// Cheapest path cover of Supp(w): a min-cost flow with unit lower capacity on
// the throughput of every support vertex. Depends on w only through Supp(w).
PenaltyValue phi(const PenaltySpec& spec, const Eigen::VectorXd& w);

// Convex counterpart: throughput of vertex j must dominate |w_j|.
PenaltyValue psi(const PenaltySpec& spec, const Eigen::VectorXd& w);

// Global optimum of  min_w 0.5||u-w||^2 + lambda*phi(w)  via the piecewise
// linear flow recast; keeps u_j wherever the optimal flow passes through j.
Eigen::VectorXd prox_phi(const PenaltySpec& spec, const Eigen::VectorXd& u);

// Unique prox of the norm psi via the piecewise quadratic flow problem:
// w_j = sign(u_j) * min(|u_j|, s_j(f*)).
Eigen::VectorXd prox_psi(const PenaltySpec& spec, const Eigen::VectorXd& u,
                         ConvexScratch* scratch = nullptr);

// Dual norm psi*(kappa) = max over paths of ||kappa_g||_1 / eta_g, computed
// by alternating ratio updates with DAG shortest paths; at most p iterations
// under uniform costs. kappa = 0 returns tau = 0.
DualNormResult dual_norm_psi(const PenaltySpec& spec, const Eigen::VectorXd& kappa);

Eigen::VectorXd prox_l1(double lambda, const Eigen::VectorXd& u);
Eigen::VectorXd prox_l0(double lambda, const Eigen::VectorXd& u);  // ties to zero

PathBasis enumerate_paths(const Dag& dag, const CostConfig& costs,
                          std::size_t max_paths = 2'000'000);

// dispatch over PenaltyKind -------------------------------------------------

PenaltyValue evaluate_penalty(const PenaltySpec& spec, const Eigen::VectorXd& w);

// prox of spec.lambda * Omega
Eigen::VectorXd prox_penalty(const PenaltySpec& spec, const Eigen::VectorXd& u,
                             ConvexScratch* scratch = nullptr);

// Omega*(kappa) for the convex kinds (Psi, L1); throws for Phi/L0
double dual_norm_value(const PenaltySpec& spec, const Eigen::VectorXd& kappa);

bool is_convex(PenaltyKind k);

}  // namespace pathcode
