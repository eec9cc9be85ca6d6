#include "pathcode/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace pathcode {

namespace {

void check_spec(const PenaltySpec& spec, int dim) {
    if (!spec.net) throw Error("penalty spec has no network");
    if (spec.net->base.p != dim)
        throw DimensionMismatch("vector has dimension " + std::to_string(dim) + ", graph has p=" +
                                std::to_string(spec.net->base.p));
    if (spec.lambda < 0.0) throw Error("lambda must be nonnegative");
}

void check_psi_costs(const AugmentedNetwork& net) {
    for (int v = 1; v <= net.base.p; ++v)
        if (net.source_cost[v] < 0.0 || net.sink_cost[v] < 0.0)
            throw Error("psi requires nonnegative arc costs");
    for (double c : net.arc_cost)
        if (c < 0.0) throw Error("psi requires nonnegative arc costs");
    std::vector<double> zero(net.base.p + 1, 0.0);
    if (shortest_path(net, zero).second <= 0.0)
        throw Error("psi requires a strictly positive weight for every path");
}

// G' as a FlowNetwork, arc costs scaled by `cost_scale`, every arc capped by
// `cap`; node ids are s=0, 1..p, t=p+1, like the augmented network's.
FlowNetwork base_network(const AugmentedNetwork& net, double cost_scale, double cap) {
    const int p = net.base.p;
    FlowNetwork fn;
    fn.node_count = p + 2;
    fn.source = 0;
    fn.sink = p + 1;
    for (int v = 1; v <= p; ++v) fn.add_arc(0, v, 0.0, cap, cost_scale * net.source_cost[v]);
    for (std::size_t a = 0; a < net.base.arcs.size(); ++a)
        fn.add_arc(net.base.arcs[a].first, net.base.arcs[a].second, 0.0, cap,
                   cost_scale * net.arc_cost[a]);
    for (int v = 1; v <= p; ++v) fn.add_arc(v, p + 1, 0.0, cap, cost_scale * net.sink_cost[v]);
    fn.node_costs.assign(p + 2, {});
    return fn;
}

// contract a split-network decomposition back to paths over graph vertices
std::vector<std::pair<Path, double>> contract_paths(const SplitResult& split, int p,
                                                    const PathDecomposition& d,
                                                    double unscale = 1.0) {
    std::vector<int> vertex_of(split.net.node_count, 0);
    for (int v = 1; v <= p; ++v) vertex_of[split.node_in[v]] = v;
    std::vector<std::pair<Path, double>> out;
    out.reserve(d.paths.size());
    for (const auto& [nodes, amount] : d.paths) {
        Path g;
        for (int node : nodes)
            if (vertex_of[node] != 0 && (g.empty() || g.back() != vertex_of[node]))
                g.push_back(vertex_of[node]);
        if (!g.empty()) out.emplace_back(std::move(g), amount * unscale);
    }
    return out;
}

}  // namespace

bool is_convex(PenaltyKind k) { return k == PenaltyKind::Psi || k == PenaltyKind::L1; }

PenaltyValue phi(const PenaltySpec& spec, const Eigen::VectorXd& w) {
    check_spec(spec, static_cast<int>(w.size()));
    const AugmentedNetwork& net = *spec.net;
    const int p = net.base.p;

    int support = 0;
    for (int j = 0; j < p; ++j)
        if (w[j] != 0.0) ++support;
    if (support == 0) return {};

    const double cap = support;
    FlowNetwork fn = base_network(net, 1.0, cap);
    for (int j = 0; j < p; ++j)
        if (w[j] != 0.0) fn.node_costs[j + 1].lower = 1.0;
    SplitResult split = split_nodes(fn);
    split.net.add_arc(split.net.sink, split.net.source, 0.0, cap, 0.0);

    FlowState f = min_cost_flow(split.net, spec.solver);
    PenaltyValue out;
    out.value = f.cost;
    out.support_cover = contract_paths(split, p, decompose(split.net, f));
    return out;
}

PenaltyValue psi(const PenaltySpec& spec, const Eigen::VectorXd& w) {
    check_spec(spec, static_cast<int>(w.size()));
    const AugmentedNetwork& net = *spec.net;
    check_psi_costs(net);
    const int p = net.base.p;

    double total = w.cwiseAbs().sum();
    if (total == 0.0) return {};

    // quantize the demands so the linear solver runs on integers
    double K = std::ldexp(1.0, 30);
    while (K * total > std::ldexp(1.0, 40)) K /= 2.0;
    std::vector<double> demand(p + 1, 0.0);
    double cap = 1.0;
    for (int j = 0; j < p; ++j) {
        demand[j + 1] = std::round(K * std::abs(w[j]));
        cap += demand[j + 1];
    }

    FlowNetwork fn = base_network(net, 1.0, cap);
    for (int j = 0; j < p; ++j) fn.node_costs[j + 1].lower = demand[j + 1];
    SplitResult split = split_nodes(fn);
    split.net.add_arc(split.net.sink, split.net.source, 0.0, cap, 0.0);

    FlowState f = min_cost_flow(split.net, spec.solver);
    PenaltyValue out;
    out.value = f.cost / K;
    out.support_cover = contract_paths(split, p, decompose(split.net, f), 1.0 / K);
    return out;
}

Eigen::VectorXd prox_phi(const PenaltySpec& spec, const Eigen::VectorXd& u) {
    check_spec(spec, static_cast<int>(u.size()));
    const AugmentedNetwork& net = *spec.net;
    const int p = net.base.p;
    const double lambda = spec.lambda;
    if (lambda == 0.0) return u;

    const double cap = std::max(1, p);
    FlowNetwork fn = base_network(net, lambda, cap);
    // keep/drop ties resolve toward dropping: shave one representable sliver
    // off every keep benefit (well inside the integer-scaling error budget)
    const double bias = std::ldexp(std::max(1.0, lambda * net.max_abs_cost()), -44);
    for (int j = 0; j < p; ++j) {
        if (u[j] == 0.0) continue;
        double a = 0.5 * u[j] * u[j];
        fn.node_costs[j + 1].has_linear_drop = true;
        fn.node_costs[j + 1].linear_drop = std::max(a - bias, 0.0);
    }
    SplitResult split = split_nodes(fn);
    split.net.add_arc(split.net.sink, split.net.source, 0.0, cap, 0.0);

    FlowState f = min_cost_flow(split.net, spec.solver);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < p; ++j) {
        double s = 0.0;
        for (int a : split.node_arcs[j + 1]) s += f.arc_flow[a];
        if (s > 0.0) w[j] = u[j];
    }
    return w;
}

Eigen::VectorXd prox_psi(const PenaltySpec& spec, const Eigen::VectorXd& u,
                         ConvexScratch* scratch) {
    check_spec(spec, static_cast<int>(u.size()));
    const AugmentedNetwork& net = *spec.net;
    check_psi_costs(net);
    const int p = net.base.p;
    const double lambda = spec.lambda;
    if (lambda == 0.0) return u;

    const double total = u.cwiseAbs().sum();
    if (total == 0.0) return Eigen::VectorXd::Zero(p);
    // cap rounded up a power of two so warm starts survive small changes in u
    double cap = 2.0;
    while (cap < 2.0 * total) cap *= 2.0;

    FlowNetwork fn = base_network(net, lambda, cap);
    for (int j = 0; j < p; ++j) {
        if (u[j] == 0.0) continue;
        fn.node_costs[j + 1].has_quad_drop = true;
        fn.node_costs[j + 1].quad_drop = std::abs(u[j]);
        fn.node_costs[j + 1].upper = cap;
    }
    SplitResult split = split_nodes(fn);
    split.net.add_arc(split.net.sink, split.net.source, 0.0, cap, 0.0);

    FlowState f = min_cost_flow_convex(split.net, spec.solver, scratch);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < p; ++j) {
        if (u[j] == 0.0) continue;
        double s = 0.0;
        for (int a : split.node_arcs[j + 1]) s += f.arc_flow[a];
        w[j] = (u[j] > 0.0 ? 1.0 : -1.0) * std::min(std::abs(u[j]), std::max(s, 0.0));
    }
    return w;
}

DualNormResult dual_norm_psi(const PenaltySpec& spec, const Eigen::VectorXd& kappa) {
    check_spec(spec, static_cast<int>(kappa.size()));
    const AugmentedNetwork& net = *spec.net;
    check_psi_costs(net);
    const int p = net.base.p;

    DualNormResult res;
    int arg = -1;
    double amax = 0.0;
    for (int j = 0; j < p; ++j)
        if (std::abs(kappa[j]) > amax) {
            amax = std::abs(kappa[j]);
            arg = j;
        }
    if (arg < 0) return res;  // kappa = 0 by norm continuity

    Path g = {arg + 1};
    std::vector<double> lengths(p + 1, 0.0);
    while (true) {
        double num = 0.0;
        for (int v : g) num += std::abs(kappa[v - 1]);
        double tau = num / weight_of_path(net, g);
        if (tau <= res.tau) break;  // fp guard; exact algorithm strictly improves
        res.tau = tau;
        res.witness = g;
        ++res.iterations;
        for (int v = 1; v <= p; ++v) lengths[v] = -std::abs(kappa[v - 1]) / tau;
        auto [h, delta] = shortest_path(net, lengths);
        if (delta >= -1e-12 * (1.0 + std::abs(delta))) break;
        g = h;
    }
    return res;
}

Eigen::VectorXd prox_l1(double lambda, const Eigen::VectorXd& u) {
    return u.unaryExpr([lambda](double x) {
        double a = std::abs(x) - lambda;
        return a > 0.0 ? (x > 0.0 ? a : -a) : 0.0;
    });
}

Eigen::VectorXd prox_l0(double lambda, const Eigen::VectorXd& u) {
    const double threshold = std::sqrt(2.0 * lambda);
    return u.unaryExpr([threshold](double x) { return std::abs(x) > threshold ? x : 0.0; });
}

namespace {
void enumerate_rec(const Dag& d, Path& cur, std::vector<Path>& out, std::size_t cap) {
    if (out.size() >= cap) throw TooManyPaths("more than " + std::to_string(cap) + " paths");
    out.push_back(cur);
    // extend by out-neighbors in topological position order
    std::vector<int> next(d.out_arcs[cur.back()]);
    std::sort(next.begin(), next.end(), [&](int a, int b) {
        return d.topo_pos[d.arcs[a].second] < d.topo_pos[d.arcs[b].second];
    });
    for (int a : next) {
        cur.push_back(d.arcs[a].second);
        enumerate_rec(d, cur, out, cap);
        cur.pop_back();
    }
}
}  // namespace

PathBasis enumerate_paths(const Dag& dag, const CostConfig& costs, std::size_t max_paths) {
    PathBasis basis;
    Path cur;
    for (int v : dag.topo_order) {
        cur = {v};
        enumerate_rec(dag, cur, basis.paths, max_paths);
    }
    AugmentedNetwork net = augment(dag, costs);
    basis.N = Eigen::MatrixXd::Zero(dag.p, static_cast<int>(basis.paths.size()));
    basis.eta.resize(static_cast<int>(basis.paths.size()));
    for (int g = 0; g < static_cast<int>(basis.paths.size()); ++g) {
        for (int v : basis.paths[g]) basis.N(v - 1, g) = 1.0;
        basis.eta[g] = weight_of_path(net, basis.paths[g]);
    }
    return basis;
}

PenaltyValue evaluate_penalty(const PenaltySpec& spec, const Eigen::VectorXd& w) {
    switch (spec.kind) {
        case PenaltyKind::Phi:
            return phi(spec, w);
        case PenaltyKind::Psi:
            return psi(spec, w);
        case PenaltyKind::L0: {
            PenaltyValue v;
            for (int j = 0; j < w.size(); ++j)
                if (w[j] != 0.0) {
                    v.value += 1.0;
                    v.support_cover.push_back({{j + 1}, 1.0});
                }
            return v;
        }
        case PenaltyKind::L1: {
            PenaltyValue v;
            for (int j = 0; j < w.size(); ++j)
                if (w[j] != 0.0) {
                    v.value += std::abs(w[j]);
                    v.support_cover.push_back({{j + 1}, std::abs(w[j])});
                }
            return v;
        }
    }
    throw Error("unknown penalty kind");
}

Eigen::VectorXd prox_penalty(const PenaltySpec& spec, const Eigen::VectorXd& u,
                             ConvexScratch* scratch) {
    switch (spec.kind) {
        case PenaltyKind::Phi:
            return prox_phi(spec, u);
        case PenaltyKind::Psi:
            return prox_psi(spec, u, scratch);
        case PenaltyKind::L0:
            return prox_l0(spec.lambda, u);
        case PenaltyKind::L1:
            return prox_l1(spec.lambda, u);
    }
    throw Error("unknown penalty kind");
}

double dual_norm_value(const PenaltySpec& spec, const Eigen::VectorXd& kappa) {
    switch (spec.kind) {
        case PenaltyKind::Psi:
            return dual_norm_psi(spec, kappa).tau;
        case PenaltyKind::L1:
            return kappa.size() ? kappa.cwiseAbs().maxCoeff() : 0.0;
        default:
            throw Error("dual norm is defined for the convex penalties only");
    }
}

}  // namespace pathcode
