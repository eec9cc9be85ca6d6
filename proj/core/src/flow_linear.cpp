#include <algorithm>
#include <cmath>
#include <queue>

#include "pathcode/flow.hpp"

// Exact minimum-cost circulation in integer arithmetic. Lower bounds are
// shifted out, feasibility is established by a max-flow phase (Dinic), then
// cost-scaling push-relabel refines the flow. Costs are pre-multiplied by
// n+1, so the final eps = 1 phase certifies optimality for integer costs.

namespace pathcode {
namespace {

using i64 = std::int64_t;
using i128 = __int128;

struct Dinic {
    int n;
    std::vector<int> head, level, it;
    std::vector<i64> cap;
    std::vector<std::vector<int>> adj;

    explicit Dinic(int n_) : n(n_), adj(n_) {}

    int add(int u, int v, i64 c) {
        int id = static_cast<int>(head.size());
        head.push_back(v);
        cap.push_back(c);
        adj[u].push_back(id);
        head.push_back(u);
        cap.push_back(0);
        adj[v].push_back(id + 1);
        return id;
    }

    bool bfs(int s, int t) {
        level.assign(n, -1);
        std::queue<int> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int a : adj[v])
                if (cap[a] > 0 && level[head[a]] < 0) {
                    level[head[a]] = level[v] + 1;
                    q.push(head[a]);
                }
        }
        return level[t] >= 0;
    }

    i64 dfs(int v, int t, i64 f) {
        if (v == t) return f;
        for (int& i = it[v]; i < static_cast<int>(adj[v].size()); ++i) {
            int a = adj[v][i];
            int w = head[a];
            if (cap[a] > 0 && level[w] == level[v] + 1) {
                i64 d = dfs(w, t, std::min(f, cap[a]));
                if (d > 0) {
                    cap[a] -= d;
                    cap[a ^ 1] += d;
                    return d;
                }
            }
        }
        return 0;
    }

    i64 max_flow(int s, int t) {
        i64 total = 0;
        while (bfs(s, t)) {
            it.assign(n, 0);
            while (i64 f = dfs(s, t, std::numeric_limits<i64>::max())) total += f;
        }
        return total;
    }
};

// residual arcs stored in pairs: forward 2a, backward 2a+1
struct CostScaling {
    int n;
    std::vector<int> to;
    std::vector<i64> resid, cost;  // cost already multiplied by alpha = n+1
    std::vector<std::vector<int>> adj;
    std::vector<i64> price, excess;
    std::vector<int> cur;
    std::vector<int> queue;
    std::vector<char> queued;
    i64 price_bound = 0;
    i64 ops = 0, max_ops = 0;

    explicit CostScaling(int n_) : n(n_), adj(n_), price(n_, 0), excess(n_, 0), cur(n_, 0), queued(n_, 0) {}

    void add(int u, int v, i64 r_fwd, i64 r_bwd, i64 c) {
        to.push_back(v);
        resid.push_back(r_fwd);
        cost.push_back(c);
        adj[u].push_back(static_cast<int>(to.size()) - 1);
        to.push_back(u);
        resid.push_back(r_bwd);
        cost.push_back(-c);
        adj[v].push_back(static_cast<int>(to.size()) - 1);
    }

    i64 rc(int a, int v) const { return cost[a] - price[v] + price[to[a]]; }

    void enqueue(int v) {
        if (!queued[v] && excess[v] > 0) {
            queued[v] = 1;
            queue.push_back(v);
        }
    }

    void push(int a, int v, i64 amount) {
        resid[a] -= amount;
        resid[a ^ 1] += amount;
        excess[v] -= amount;
        excess[to[a]] += amount;
        enqueue(to[a]);
    }

    void refine(i64 eps) {
        for (int a = 0; a < static_cast<int>(to.size()); ++a) {
            int v = to[a ^ 1];
            if (resid[a] > 0 && rc(a, v) < 0) push(a, v, resid[a]);
        }
        std::fill(cur.begin(), cur.end(), 0);
        for (int v = 0; v < n; ++v) enqueue(v);

        std::size_t qi = 0;
        while (qi < queue.size()) {
            int v = queue[qi++];
            queued[v] = 0;
            while (excess[v] > 0) {
                if (++ops > max_ops) throw NotConverged("operation cap hit in min_cost_flow", 0.0);
                if (cur[v] == static_cast<int>(adj[v].size())) {
                    // relabel
                    i64 best = std::numeric_limits<i64>::max();
                    for (int a : adj[v])
                        if (resid[a] > 0) best = std::min(best, cost[a] + price[to[a]]);
                    if (best == std::numeric_limits<i64>::max())
                        throw Infeasible("excess cannot be drained");
                    price[v] = best + eps;
                    if (std::abs(price[v]) > price_bound)
                        throw Overflow("node price out of range; reduce cost_scale_bits");
                    cur[v] = 0;
                    continue;
                }
                int a = adj[v][cur[v]];
                if (resid[a] > 0 && rc(a, v) < 0)
                    push(a, v, std::min(excess[v], resid[a]));
                else
                    ++cur[v];
            }
            if (qi > (1u << 20) && qi * 2 > queue.size()) {  // compact the spent prefix
                queue.erase(queue.begin(), queue.begin() + qi);
                qi = 0;
            }
        }
        queue.clear();
    }
};

}  // namespace

FlowState min_cost_flow(const FlowNetwork& net, const FlowSolverConfig& cfg) {
    const int n = net.node_count;
    const int m = static_cast<int>(net.arcs.size());
    if (!net.node_costs.empty())
        throw Error("min_cost_flow: run split_nodes first to lower node costs");

    std::vector<i64> lower(m), upper(m);
    double max_abs_cost = 0.0;
    for (int a = 0; a < m; ++a) {
        const FlowArc& arc = net.arcs[a];
        if (arc.quad) throw Error("min_cost_flow handles linear costs only");
        if (!std::isfinite(arc.upper)) throw Error("finite capacities required");
        if (arc.lower > arc.upper) throw Infeasible("lower > upper on arc " + std::to_string(a));
        lower[a] = std::llround(arc.lower);
        upper[a] = std::llround(arc.upper);
        if (std::abs(arc.lower - static_cast<double>(lower[a])) > 1e-6 ||
            std::abs(arc.upper - static_cast<double>(upper[a])) > 1e-6)
            throw Error("min_cost_flow requires integral capacities");
        max_abs_cost = std::max(max_abs_cost, std::abs(arc.cost));
    }

    // pick the scale: prices grow to O(n * eps0) with eps0 = (n+1) * max scaled cost
    int bits = std::max(0, std::min(cfg.cost_scale_bits, 62));
    const i64 alpha = n + 1;
    auto scaled_max = [&](int b) { return static_cast<double>(alpha) * std::ldexp(max_abs_cost, b); };
    while (bits > 0 && scaled_max(bits) * (6.0 * n + 16.0) >= std::ldexp(1.0, 62)) --bits;
    const double scale = std::ldexp(1.0, bits);

    std::vector<i64> cost_scaled(m);
    i64 max_c = 0;
    for (int a = 0; a < m; ++a) {
        cost_scaled[a] = std::llround(net.arcs[a].cost * scale);
        max_c = std::max(max_c, std::abs(cost_scaled[a]) * alpha);
    }

    // lower bounds out, then a max-flow phase for feasibility
    std::vector<i64> ex(n, 0);
    for (int a = 0; a < m; ++a) {
        ex[net.arcs[a].head] += lower[a];
        ex[net.arcs[a].tail] -= lower[a];
    }
    std::vector<i64> base_flow(lower);

    bool has_lower = std::any_of(ex.begin(), ex.end(), [](i64 e) { return e != 0; });
    std::vector<i64> fwd_resid(m), bwd_resid(m, 0);
    for (int a = 0; a < m; ++a) fwd_resid[a] = upper[a] - lower[a];

    if (has_lower) {
        Dinic dinic(n + 2);
        std::vector<int> arc_id(m);
        for (int a = 0; a < m; ++a)
            arc_id[a] = dinic.add(net.arcs[a].tail, net.arcs[a].head, fwd_resid[a]);
        i64 need = 0;
        for (int v = 0; v < n; ++v) {
            if (ex[v] > 0) {
                dinic.add(n, v, ex[v]);
                need += ex[v];
            } else if (ex[v] < 0) {
                dinic.add(v, n + 1, -ex[v]);
            }
        }
        if (dinic.max_flow(n, n + 1) != need)
            throw Infeasible("lower capacities cannot be met");
        for (int a = 0; a < m; ++a) {
            i64 pushed = fwd_resid[a] - dinic.cap[arc_id[a]];
            fwd_resid[a] -= pushed;
            bwd_resid[a] += pushed;
        }
    }

    FlowState out;
    out.arc_flow.assign(m, 0.0);
    out.price.assign(n, 0.0);
    out.achieved_eps = 1.0 / (scale * static_cast<double>(alpha));

    if (max_c > 0) {
        CostScaling cs(n);
        cs.max_ops = cfg.max_operations;
        cs.price_bound = 6 * static_cast<i64>(n) * max_c + 16 * max_c + 64;
        for (int a = 0; a < m; ++a)
            cs.add(net.arcs[a].tail, net.arcs[a].head, fwd_resid[a], bwd_resid[a],
                   cost_scaled[a] * alpha);
        i64 eps = max_c;
        while (true) {
            cs.refine(eps);
            if (eps == 1) break;
            eps = std::max<i64>(1, eps / 4);
        }
        for (int a = 0; a < m; ++a) bwd_resid[a] = cs.resid[2 * a + 1];
        for (int v = 0; v < n; ++v)
            out.price[v] = static_cast<double>(cs.price[v]) / (scale * static_cast<double>(alpha));
    }

    i128 total = 0;
    for (int a = 0; a < m; ++a) {
        i64 f = base_flow[a] + bwd_resid[a];
        out.arc_flow[a] = static_cast<double>(f);
        total += static_cast<i128>(f) * cost_scaled[a];
    }
    out.cost = static_cast<double>(total) / scale;
    return out;
}

}  // namespace pathcode
