#include "pathcode/optim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pathcode/rng.hpp"

namespace pathcode {

namespace {

void check_dataset(const Dataset& data, LossKind kind, int p) {
    if (data.X.cols() != p) throw DimensionMismatch("X has wrong column count");
    if (data.X.rows() != data.y.size()) throw DimensionMismatch("X rows != y length");
    if (!data.X.allFinite() || !data.y.allFinite()) throw Error("non-finite data");
    if (kind == LossKind::WeightedLogistic) {
        int pos = 0, neg = 0;
        for (int i = 0; i < data.y.size(); ++i) {
            if (data.y[i] == 1.0)
                ++pos;
            else if (data.y[i] == -1.0)
                ++neg;
            else
                throw Error("classification labels must be +-1");
        }
        if (pos == 0 || neg == 0) throw Error("both classes must be present");
    }
}

std::pair<double, double> class_weights(const Dataset& data) {
    int pos = 0, neg = 0;
    for (int i = 0; i < data.y.size(); ++i) (data.y[i] > 0 ? pos : neg)++;
    return {1.0 / pos, 1.0 / neg};
}

double logistic_term(double margin) {  // log(1 + exp(-margin)), stable
    return margin >= 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

}  // namespace

std::pair<double, Eigen::VectorXd> square_loss(const Dataset& data, const Eigen::VectorXd& w) {
    Eigen::VectorXd r = data.X * w - data.y;
    return {0.5 * r.squaredNorm(), data.X.transpose() * r};
}

std::pair<double, Eigen::VectorXd> logistic_loss(const Dataset& data, const Eigen::VectorXd& w) {
    auto [wpos, wneg] = class_weights(data);
    Eigen::VectorXd m = data.X * w;
    double value = 0.0;
    Eigen::VectorXd q(m.size());
    for (int i = 0; i < m.size(); ++i) {
        const double omega = data.y[i] > 0 ? wpos : wneg;
        const double margin = data.y[i] * m[i];
        value += omega * logistic_term(margin);
        // d/dm of omega*log(1+exp(-y m)) = -omega*y*sigmoid(-y m)
        const double sig = margin >= 0.0 ? std::exp(-margin) / (1.0 + std::exp(-margin))
                                         : 1.0 / (1.0 + std::exp(margin));
        q[i] = -omega * data.y[i] * sig;
    }
    return {value, data.X.transpose() * q};
}

std::pair<double, Eigen::VectorXd> loss_value_grad(LossKind kind, const Dataset& data,
                                                   const Eigen::VectorXd& w) {
    return kind == LossKind::Square ? square_loss(data, w) : logistic_loss(data, w);
}

double lipschitz_bound(LossKind kind, const Dataset& data) {
    const int p = static_cast<int>(data.X.cols());
    Rng rng(0x9e3779b97f4a7c15ull);
    Eigen::VectorXd v(p);
    for (int j = 0; j < p; ++j) v[j] = rng.normal();
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < 30; ++it) {
        Eigen::VectorXd next = data.X.transpose() * (data.X * v);
        est = next.norm();
        if (est == 0.0) break;
        v = next / est;
    }
    double rho = est * (1.0 + 1e-3);
    if (kind == LossKind::WeightedLogistic) {
        auto [wpos, wneg] = class_weights(data);
        rho *= 0.5 * std::max(wpos, wneg);
    }
    return std::max(rho, 1e-12);
}

GapInfo duality_gap(const ProblemSpec& problem, const Eigen::VectorXd& w) {
    if (!is_convex(problem.penalty.kind)) throw Error("duality gap needs a convex penalty");
    const Dataset& data = *problem.data;
    const double lambda = problem.penalty.lambda;

    auto [lw, kappa] = loss_value_grad(problem.loss, data, w);
    const double omega_val = evaluate_penalty(problem.penalty, w).value;
    const double primal = lw + lambda * omega_val;

    const double dn = dual_norm_value(problem.penalty, kappa);
    const double alpha = dn <= lambda ? 1.0 : lambda / dn;

    double dual;
    if (problem.loss == LossKind::Square) {
        Eigen::VectorXd r = data.X * w - data.y;
        dual = -alpha * r.dot(data.y) - 0.5 * alpha * alpha * r.squaredNorm();
    } else {
        auto [wpos, wneg] = class_weights(data);
        Eigen::VectorXd m = data.X * w;
        double hstar = 0.0;
        for (int i = 0; i < m.size(); ++i) {
            const double omega = data.y[i] > 0 ? wpos : wneg;
            const double margin = data.y[i] * m[i];
            const double sig = margin >= 0.0 ? std::exp(-margin) / (1.0 + std::exp(-margin))
                                             : 1.0 / (1.0 + std::exp(margin));
            const double a = alpha * sig;
            auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
            hstar += omega * (xlogx(a) + xlogx(1.0 - a));
        }
        dual = -hstar;
    }

    GapInfo g;
    g.primal = primal;
    g.gap = primal - dual;
    if (g.gap < 0.0 && g.gap > -1e-9 * std::max(1.0, std::abs(primal))) g.gap = 0.0;
    g.relative = g.gap / std::max(1.0, std::abs(primal));
    return g;
}

namespace {

void finalize(FitResult& r, const ProblemSpec& problem) {
    PenaltyValue v = evaluate_penalty(problem.penalty, r.w);
    r.selected_paths = std::move(v.support_cover);
    r.support_size = 0;
    for (int j = 0; j < r.w.size(); ++j)
        if (r.w[j] != 0.0) ++r.support_size;
    r.lambda = problem.penalty.lambda;
}

// one backtracked proximal step from `point`; returns the new iterate and
// leaves rho large enough for the majorization test to pass at it
Eigen::VectorXd prox_step(const ProblemSpec& problem, const Eigen::VectorXd& point, double loss_at,
                          const Eigen::VectorXd& grad, double& rho, ConvexScratch* scratch) {
    for (int halvings = 0;; ++halvings) {
        PenaltySpec ps = problem.penalty;
        ps.lambda = problem.penalty.lambda / rho;
        Eigen::VectorXd next = prox_penalty(ps, point - grad / rho, scratch);
        Eigen::VectorXd d = next - point;
        double lhs = loss_value_grad(problem.loss, *problem.data, next).first;
        double model = loss_at + grad.dot(d) + 0.5 * rho * d.squaredNorm();
        if (lhs <= model + 1e-10 * std::max(1.0, std::abs(lhs))) return next;
        if (halvings >= 60) throw Error("backtracking failed to find a valid step");
        rho *= 2.0;
    }
}

}  // namespace

FitResult ista(const ProblemSpec& problem, const Eigen::VectorXd* w0) {
    const int p = static_cast<int>(problem.data->X.cols());
    check_dataset(*problem.data, problem.loss, problem.penalty.net ? problem.penalty.net->base.p : p);
    const SolverConfig& cfg = problem.solver;
    double rho = cfg.rho > 0.0 ? cfg.rho : lipschitz_bound(problem.loss, *problem.data);

    FitResult r;
    r.w = w0 ? *w0 : Eigen::VectorXd::Zero(p);
    ConvexScratch scratch;

    double omega_val = evaluate_penalty(problem.penalty, r.w).value;
    auto [lw, grad] = loss_value_grad(problem.loss, *problem.data, r.w);
    r.objective_trace.push_back(lw + problem.penalty.lambda * omega_val);

    for (int it = 0; it < cfg.max_iterations; ++it) {
        Eigen::VectorXd next = prox_step(problem, r.w, lw, grad, rho, &scratch);
        double move = (next - r.w).lpNorm<Eigen::Infinity>();
        r.w = next;
        std::tie(lw, grad) = loss_value_grad(problem.loss, *problem.data, r.w);
        omega_val = evaluate_penalty(problem.penalty, r.w).value;
        r.objective_trace.push_back(lw + problem.penalty.lambda * omega_val);
        r.iterations = it + 1;
        if (move <= cfg.stationarity_tol * std::max(1.0, r.w.lpNorm<Eigen::Infinity>())) {
            r.converged = true;
            r.reason = "stationary";
            break;
        }
    }
    if (!r.converged) r.reason = "max_iterations";
    r.primal = r.objective_trace.back();
    finalize(r, problem);
    return r;
}

FitResult fista(const ProblemSpec& problem, const Eigen::VectorXd* w0) {
    if (!is_convex(problem.penalty.kind)) throw Error("fista expects a convex penalty");
    const int p = static_cast<int>(problem.data->X.cols());
    check_dataset(*problem.data, problem.loss, problem.penalty.net ? problem.penalty.net->base.p : p);
    const SolverConfig& cfg = problem.solver;
    double rho = cfg.rho > 0.0 ? cfg.rho : lipschitz_bound(problem.loss, *problem.data);

    FitResult r;
    r.w = w0 ? *w0 : Eigen::VectorXd::Zero(p);

    GapInfo gi = duality_gap(problem, r.w);
    r.gap = gi.relative;
    r.primal = gi.primal;
    if (gi.relative <= cfg.tolerance) {
        r.converged = true;
        r.reason = "duality_gap";
        finalize(r, problem);
        return r;
    }

    ConvexScratch scratch;
    Eigen::VectorXd y = r.w;
    double t = 1.0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        auto [ly, grad] = loss_value_grad(problem.loss, *problem.data, y);
        Eigen::VectorXd next = prox_step(problem, y, ly, grad, rho, &scratch);
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = next + ((t - 1.0) / tn) * (next - r.w);
        r.w = next;
        t = tn;
        r.iterations = it + 1;
        if ((it + 1) % cfg.gap_check_every == 0 || it + 1 == cfg.max_iterations) {
            gi = duality_gap(problem, r.w);
            r.gap = gi.relative;
            r.primal = gi.primal;
            if (gi.relative <= cfg.tolerance) {
                r.converged = true;
                r.reason = "duality_gap";
                break;
            }
        }
    }
    if (!r.converged) r.reason = "max_iterations";
    finalize(r, problem);
    return r;
}

namespace {

// restriction of an augmented network to a vertex subset (1-based ids),
// keeping the listed arcs and the parent's arc costs
AugmentedNetwork restrict_network(const AugmentedNetwork& net, const std::vector<int>& verts,
                                  const std::set<std::pair<int, int>>& arcs) {
    const int q = static_cast<int>(verts.size());
    std::vector<int> local(net.base.p + 1, 0);
    for (int i = 0; i < q; ++i) local[verts[i]] = i + 1;
    std::vector<std::pair<int, int>> sub_arcs;
    std::vector<double> arc_cost;
    for (auto [u, v] : arcs) {
        sub_arcs.emplace_back(local[u], local[v]);
        arc_cost.push_back(net.arc_cost[net.base.arc_index(u, v)]);
    }
    Dag sub = build_dag(sub_arcs, q);
    std::vector<double> src(q + 1, 0.0), snk(q + 1, 0.0);
    for (int i = 0; i < q; ++i) {
        src[i + 1] = net.source_cost[verts[i]];
        snk[i + 1] = net.sink_cost[verts[i]];
    }
    return augment(sub, CostConfig::explicit_costs(src, arc_cost, snk));
}

}  // namespace

FitResult active_set(const ProblemSpec& problem) {
    if (problem.penalty.kind != PenaltyKind::Psi)
        throw Error("active_set drives the path norm; use kind Psi (gamma=0 recovers l1)");
    const AugmentedNetwork& net = *problem.penalty.net;
    const Dataset& data = *problem.data;
    const int p = net.base.p;
    check_dataset(data, problem.loss, p);
    const double lambda = problem.penalty.lambda;

    std::vector<int> verts;                 // sorted active vertices
    std::set<std::pair<int, int>> arcs;     // active arcs
    FitResult r;
    r.w = Eigen::VectorXd::Zero(p);
    double sub_tol = problem.solver.subproblem_tolerance;
    const int max_rounds = p + static_cast<int>(net.base.arcs.size()) + 64;

    for (int round = 0; round < max_rounds; ++round) {
        if (!verts.empty()) {
            AugmentedNetwork sub_net = restrict_network(net, verts, arcs);
            Dataset sub_data;
            sub_data.X.resize(data.X.rows(), verts.size());
            for (std::size_t i = 0; i < verts.size(); ++i)
                sub_data.X.col(i) = data.X.col(verts[i] - 1);
            sub_data.y = data.y;

            ProblemSpec sub = problem;
            sub.data = &sub_data;
            sub.penalty.net = &sub_net;
            sub.solver.tolerance = sub_tol;
            sub.solver.max_iterations = std::max(problem.solver.max_iterations, 2000);
            Eigen::VectorXd warm(verts.size());
            for (std::size_t i = 0; i < verts.size(); ++i) warm[i] = r.w[verts[i] - 1];
            FitResult sub_fit = fista(sub, &warm);

            r.w.setZero();
            for (std::size_t i = 0; i < verts.size(); ++i) r.w[verts[i] - 1] = sub_fit.w[i];
        }
        ++r.iterations;

        auto [lw, kappa] = loss_value_grad(problem.loss, data, r.w);
        (void)lw;
        DualNormResult dn = dual_norm_psi(problem.penalty, kappa);
        if (dn.tau <= lambda * (1.0 + problem.solver.active_set_slack)) {
            r.converged = true;
            r.reason = "certificate";
            break;
        }

        bool grew = false;
        for (int v : dn.witness)
            if (!std::binary_search(verts.begin(), verts.end(), v)) {
                verts.insert(std::upper_bound(verts.begin(), verts.end(), v), v);
                grew = true;
            }
        for (int u : dn.witness)
            for (int v : dn.witness)
                if (net.base.has_arc(u, v) && arcs.insert({u, v}).second) grew = true;
        if (!grew) {
            sub_tol *= 0.1;  // witness already active: the subproblem was too loose
            if (sub_tol < 1e-14) {
                r.reason = "stalled";
                break;
            }
        }
    }
    if (!r.converged && r.reason.empty()) r.reason = "max_rounds";

    GapInfo gi = duality_gap(problem, r.w);
    r.gap = gi.relative;
    r.primal = gi.primal;
    finalize(r, problem);
    return r;
}

std::vector<FitResult> continuation(const ProblemSpec& problem,
                                    const std::vector<double>& lambdas) {
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i - 1])) throw Error("lambda grid must be strictly decreasing");

    std::vector<FitResult> results;
    results.reserve(lambdas.size());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(problem.data->X.cols());
    for (double lambda : lambdas) {
        ProblemSpec ps = problem;
        ps.penalty.lambda = lambda;
        try {
            FitResult r = is_convex(problem.penalty.kind) ? fista(ps, &w) : ista(ps, &w);
            w = r.w;
            results.push_back(std::move(r));
        } catch (const Error& e) {
            FitResult failed;
            failed.w = w;
            failed.lambda = lambda;
            failed.reason = std::string("error: ") + e.what();
            results.push_back(std::move(failed));
        }
    }
    return results;
}

Eigen::VectorXd ols_refit(const Dataset& data, const std::vector<int>& support, bool* ridged) {
    const int p = static_cast<int>(data.X.cols());
    if (ridged) *ridged = false;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    if (support.empty()) return w;

    Eigen::MatrixXd Xs(data.X.rows(), support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0 || support[i] >= p) throw DimensionMismatch("support index out of range");
        Xs.col(i) = data.X.col(support[i]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    Eigen::VectorXd coef;
    if (qr.rank() < static_cast<Eigen::Index>(support.size())) {
        if (ridged) *ridged = true;
        Eigen::MatrixXd G = Xs.transpose() * Xs;
        G.diagonal().array() += 1e-8;
        coef = G.ldlt().solve(Xs.transpose() * data.y);
    } else {
        coef = qr.solve(data.y);
    }
    for (std::size_t i = 0; i < support.size(); ++i) w[support[i]] = coef[i];
    return w;
}

double lambda_max(const ProblemSpec& problem) {
    const int p = static_cast<int>(problem.data->X.cols());
    Eigen::VectorXd kappa =
        loss_value_grad(problem.loss, *problem.data, Eigen::VectorXd::Zero(p)).second;
    switch (problem.penalty.kind) {
        case PenaltyKind::Psi:
        case PenaltyKind::L1:
            return dual_norm_value(problem.penalty, kappa);
        case PenaltyKind::L0: {
            double rho = problem.solver.rho > 0.0 ? problem.solver.rho
                                                  : lipschitz_bound(problem.loss, *problem.data);
            return kappa.cwiseAbs2().maxCoeff() / (2.0 * rho);
        }
        case PenaltyKind::Phi: {
            double rho = problem.solver.rho > 0.0 ? problem.solver.rho
                                                  : lipschitz_bound(problem.loss, *problem.data);
            PenaltySpec dual_spec = problem.penalty;
            dual_spec.kind = PenaltyKind::Psi;
            return dual_norm_value(dual_spec, kappa.cwiseAbs2()) / (2.0 * rho);
        }
    }
    throw Error("unknown penalty kind");
}

std::vector<double> auto_lambda_grid(const ProblemSpec& problem, int points, double ratio) {
    double top = lambda_max(problem);
    if (!(top > 0.0)) top = 1.0;
    std::vector<double> grid;
    grid.reserve(points);
    double v = top;
    for (int i = 0; i < points; ++i, v *= ratio) grid.push_back(v);
    return grid;
}

}  // namespace pathcode
