#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pathcode/penalty.hpp"

namespace pathcode {

enum class LossKind { Square, WeightedLogistic };

struct Dataset {
    Eigen::MatrixXd X;  // n x p
    Eigen::VectorXd y;  // length n; +-1 for classification
};

struct SolverConfig {
    double rho = 0.0;  // Lipschitz upper bound; 0 = power iteration + backtracking
    int max_iterations = 2000;
    double tolerance = 1e-4;         // relative duality gap (convex solvers)
    double stationarity_tol = 1e-8;  // ista stopping, scaled by max(1, ||w||_inf)
    int gap_check_every = 10;
    double active_set_slack = 1e-6;      // certificate: tau <= lambda * (1 + slack)
    double subproblem_tolerance = 1e-6;  // active-set inner relative gap
};

// Non-owning view of the problem; data and penalty.net must outlive it.
struct ProblemSpec {
    const Dataset* data = nullptr;
    LossKind loss = LossKind::Square;
    PenaltySpec penalty;
    SolverConfig solver;
};

struct FitResult {
    Eigen::VectorXd w;
    std::vector<double> objective_trace;
    double gap = -1.0;           // final relative duality gap; -1 when not available
    double primal = 0.0;
    std::vector<std::pair<Path, double>> selected_paths;
    int support_size = 0;
    int iterations = 0;
    bool converged = false;
    std::string reason;
    double lambda = 0.0;
};

struct GapInfo {
    double primal = 0.0;
    double gap = 0.0;       // primal - dual, nonnegative
    double relative = 0.0;  // gap / max(1, |primal|)
};

std::pair<double, Eigen::VectorXd> square_loss(const Dataset& data, const Eigen::VectorXd& w);
std::pair<double, Eigen::VectorXd> logistic_loss(const Dataset& data, const Eigen::VectorXd& w);
std::pair<double, Eigen::VectorXd> loss_value_grad(LossKind kind, const Dataset& data,
                                                   const Eigen::VectorXd& w);

// power-iteration bound on the gradient Lipschitz constant, inflated by 1e-3
double lipschitz_bound(LossKind kind, const Dataset& data);

// Fenchel duality gap from the scaled dual candidate kappa = grad L(w),
// alpha = min(1, lambda / Omega*(kappa)); convex penalties only.
GapInfo duality_gap(const ProblemSpec& problem, const Eigen::VectorXd& w);

// proximal gradient with backtracking; monotone objective; any penalty kind
FitResult ista(const ProblemSpec& problem, const Eigen::VectorXd* w0 = nullptr);

// accelerated proximal gradient, stopping on the relative duality gap
FitResult fista(const ProblemSpec& problem, const Eigen::VectorXd* w0 = nullptr);

// working-graph method: solve restricted problems, grow the graph along the
// dual-norm witness path until the certificate tau <= lambda(1+slack) holds
FitResult active_set(const ProblemSpec& problem);

// warm-started sweep over a descending lambda grid (fista for convex kinds,
// ista otherwise); solver failures are recorded per grid point
std::vector<FitResult> continuation(const ProblemSpec& problem,
                                    const std::vector<double>& lambdas);

// least squares on the support columns, zeros elsewhere; applies a 1e-8 ridge
// when the restricted design is rank deficient (and reports it via `ridged`)
Eigen::VectorXd ols_refit(const Dataset& data, const std::vector<int>& support,
                          bool* ridged = nullptr);

// smallest lambda whose solution is exactly zero (convex kinds), or the
// analogous prox-zero threshold for Phi/L0
double lambda_max(const ProblemSpec& problem);

std::vector<double> auto_lambda_grid(const ProblemSpec& problem, int points = 25,
                                     double ratio = 0.84089641525371454);  // 2^(-1/4)

}  // namespace pathcode
