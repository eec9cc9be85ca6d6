#include <algorithm>
#include <cmath>

#include "pathcode/flow.hpp"

// eps-relaxation for separable convex arc costs: approximate dual coordinate
// ascent on node prices, scanning nodes with positive surplus. Pushes use the
// exact one-dimensional minimizer of C_a(f) - tension*f (closed form for the
// linear and slack-quadratic costs used here), price rises are by at least
// eps, and eps is divided down a geometric schedule, warm-starting each phase
// from the previous flow.

namespace pathcode {
namespace {

struct Incidence {
    int arc;
    bool is_out;
};

struct ConvexSolver {
    const FlowNetwork& net;
    const FlowSolverConfig& cfg;
    std::vector<double> f, p, g;
    std::vector<std::vector<Incidence>> inc;
    std::vector<int> cur;
    std::vector<int> queue;
    std::vector<char> queued;
    std::int64_t ops = 0;
    double price_bound = 0.0;
    double g_tol = 0.0;  // surpluses below this are rounding crumbs, not work

    ConvexSolver(const FlowNetwork& net_, const FlowSolverConfig& cfg_)
        : net(net_), cfg(cfg_), inc(net_.node_count), cur(net_.node_count, 0),
          queued(net_.node_count, 0) {
        for (int a = 0; a < static_cast<int>(net.arcs.size()); ++a) {
            inc[net.arcs[a].tail].push_back({a, true});
            inc[net.arcs[a].head].push_back({a, false});
        }
    }

    double dplus(int a) const {  // right derivative, +inf at the upper bound
        const FlowArc& arc = net.arcs[a];
        if (f[a] >= arc.upper) return std::numeric_limits<double>::infinity();
        if (arc.quad && f[a] < arc.quad_target) return arc.cost + (f[a] - arc.quad_target);
        return arc.cost;
    }
    double dminus(int a) const {  // left derivative, -inf at the lower bound
        const FlowArc& arc = net.arcs[a];
        if (f[a] <= arc.lower) return -std::numeric_limits<double>::infinity();
        if (arc.quad && f[a] <= arc.quad_target) return arc.cost + (f[a] - arc.quad_target);
        return arc.cost;
    }
    double tension(int a) const { return p[net.arcs[a].tail] - p[net.arcs[a].head]; }

    // largest f' with derivative <= t
    double push_target(int a, double t) const {
        const FlowArc& arc = net.arcs[a];
        if (arc.quad && t < arc.cost)
            return std::min(arc.upper, arc.quad_target + (t - arc.cost));
        return arc.upper;
    }
    // smallest f' with derivative >= t
    double pull_target(int a, double t) const {
        const FlowArc& arc = net.arcs[a];
        if (arc.quad && t < arc.cost)
            return std::max(arc.lower, arc.quad_target + (t - arc.cost));
        return arc.lower;
    }

    void rebuild_surplus() {
        g.assign(net.node_count, 0.0);
        for (int a = 0; a < static_cast<int>(net.arcs.size()); ++a) {
            g[net.arcs[a].tail] -= f[a];
            g[net.arcs[a].head] += f[a];
        }
    }

    void enqueue(int v) {
        if (!queued[v] && g[v] > g_tol) {
            queued[v] = 1;
            queue.push_back(v);
        }
    }

    void repair(double eps) {
        // restore eps-complementary slackness arc by arc with exact line minimization
        for (int a = 0; a < static_cast<int>(net.arcs.size()); ++a) {
            const double t = tension(a);
            if (t > dplus(a) + eps)
                f[a] = push_target(a, t);
            else if (t < dminus(a) - eps)
                f[a] = pull_target(a, t);
        }
    }

    void phase(double eps) {
        repair(eps);
        rebuild_surplus();
        std::fill(cur.begin(), cur.end(), 0);
        queue.clear();
        std::fill(queued.begin(), queued.end(), 0);
        for (int v = 0; v < net.node_count; ++v) enqueue(v);

        std::size_t qi = 0;
        while (qi < queue.size()) {
            int v = queue[qi++];
            queued[v] = 0;
            while (g[v] > g_tol) {
                if (++ops > cfg.max_operations)
                    throw NotConverged("operation cap hit in min_cost_flow_convex", eps);
                if (cur[v] == static_cast<int>(inc[v].size())) {
                    price_rise(v, eps);
                    cur[v] = 0;
                    continue;
                }
                const Incidence e = inc[v][cur[v]];
                const FlowArc& arc = net.arcs[e.arc];
                const double t = tension(e.arc);
                double delta = 0.0;
                int other = -1;
                if (e.is_out && f[e.arc] < arc.upper && t > dplus(e.arc)) {
                    delta = std::min(g[v], push_target(e.arc, t) - f[e.arc]);
                    if (delta > 0.0) {
                        f[e.arc] += delta;
                        other = arc.head;
                    }
                } else if (!e.is_out && f[e.arc] > arc.lower && t < dminus(e.arc)) {
                    delta = std::min(g[v], f[e.arc] - pull_target(e.arc, t));
                    if (delta > 0.0) {
                        f[e.arc] -= delta;
                        other = arc.tail;
                    }
                }
                if (other >= 0) {
                    g[v] -= delta;
                    g[other] += delta;
                    enqueue(other);
                } else {
                    ++cur[v];
                }
            }
            if (qi > (1u << 20) && qi * 2 > queue.size()) {
                queue.erase(queue.begin(), queue.begin() + qi);
                qi = 0;
            }
        }
    }

    void price_rise(int v, double eps) {
        double best = std::numeric_limits<double>::infinity();
        for (const Incidence& e : inc[v]) {
            const FlowArc& arc = net.arcs[e.arc];
            if (e.is_out && f[e.arc] < arc.upper)
                best = std::min(best, p[arc.head] + dplus(e.arc));
            else if (!e.is_out && f[e.arc] > arc.lower)
                best = std::min(best, p[arc.tail] - dminus(e.arc));
        }
        if (!std::isfinite(best)) throw Infeasible("surplus cannot be drained");
        p[v] = best + eps;
        if (p[v] > price_bound) throw Infeasible("price diverges; instance infeasible?");
    }
};

}  // namespace

FlowState min_cost_flow_convex(const FlowNetwork& net, const FlowSolverConfig& cfg,
                               ConvexScratch* scratch) {
    const int m = static_cast<int>(net.arcs.size());
    if (!net.node_costs.empty())
        throw Error("min_cost_flow_convex: run split_nodes first to lower node costs");

    double scale = 0.0;
    for (const FlowArc& arc : net.arcs) {
        if (!std::isfinite(arc.upper)) throw Error("finite capacities required");
        if (arc.lower > arc.upper) throw Infeasible("lower > upper");
        scale = std::max({scale, std::abs(arc.cost), arc.quad ? arc.quad_target : 0.0});
    }

    double flow_scale = 1.0;
    for (const FlowArc& arc : net.arcs) flow_scale = std::max(flow_scale, arc.upper);

    ConvexSolver s(net, cfg);
    s.g_tol = 1e-12 * flow_scale;
    const double eps0 = cfg.eps_initial > 0.0 ? cfg.eps_initial : std::max(scale, 1e-12);
    const double eps_term =
        cfg.eps_terminal > 0.0 ? cfg.eps_terminal : std::max(1e-13 * std::max(1.0, scale), 1e-15);
    const double divisor = cfg.eps_divisor > 1.0 ? cfg.eps_divisor : 4.0;
    s.price_bound = (6.0 * net.node_count + 16.0) * std::max(eps0, scale) + 1.0;

    double eps_start = eps0;
    bool warm = scratch && scratch->valid &&
                scratch->flow.size() == static_cast<std::size_t>(m) &&
                scratch->price.size() == static_cast<std::size_t>(net.node_count);
    if (warm) {
        s.f = scratch->flow;
        s.p = scratch->price;
        for (int a = 0; a < m; ++a)
            if (s.f[a] < net.arcs[a].lower || s.f[a] > net.arcs[a].upper) {
                warm = false;
                break;
            }
    }
    if (warm) {
        double violation = 0.0;
        for (int a = 0; a < m; ++a) {
            const double t = s.tension(a);
            violation = std::max(violation, t - s.dplus(a));
            violation = std::max(violation, s.dminus(a) - t);
        }
        eps_start = std::clamp(violation * 1.0001, eps_term, eps0);
    } else {
        s.p.assign(net.node_count, 0.0);
        s.f.assign(m, 0.0);
        for (int a = 0; a < m; ++a) {
            const FlowArc& arc = net.arcs[a];
            if (arc.quad)
                s.f[a] = std::clamp(arc.quad_target - std::max(arc.cost, 0.0), arc.lower, arc.upper);
            else
                s.f[a] = arc.cost < 0.0 ? arc.upper : arc.lower;
        }
    }

    double eps = std::max(eps_start, eps_term);
    while (true) {
        s.phase(eps);
        if (eps <= eps_term) break;
        eps = std::max(eps_term, eps / divisor);
    }

    FlowState out;
    out.arc_flow = s.f;
    out.price = s.p;
    out.achieved_eps = eps;
    double cost = 0.0;
    for (int a = 0; a < m; ++a) {
        const FlowArc& arc = net.arcs[a];
        cost += arc.cost * s.f[a];
        if (arc.quad) {
            const double slack = std::max(arc.quad_target - s.f[a], 0.0);
            cost += 0.5 * slack * slack;
        }
    }
    out.cost = cost;
    if (scratch) {
        scratch->flow = s.f;
        scratch->price = s.p;
        scratch->valid = true;
    }
    return out;
}

}  // namespace pathcode
