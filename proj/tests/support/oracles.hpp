#pragma once

// Brute-force and independent reference implementations used as test oracles.
// Everything here is deliberately naive and kept separate from the library's
// solver code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pathcode/flow.hpp"
#include "pathcode/graph.hpp"
#include "pathcode/rng.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// exhaustive path enumeration on a tiny DAG (independent of the library's)
inline void all_paths_rec(const pathcode::Dag& d, pathcode::Path& cur,
                          std::vector<pathcode::Path>& out) {
    out.push_back(cur);
    for (int a : d.out_arcs[cur.back()]) {
        cur.push_back(d.arcs[a].second);
        all_paths_rec(d, cur, out);
        cur.pop_back();
    }
}

inline std::vector<pathcode::Path> all_paths(const pathcode::Dag& d) {
    std::vector<pathcode::Path> out;
    pathcode::Path cur;
    for (int v = 1; v <= d.p; ++v) {
        cur = {v};
        all_paths_rec(d, cur, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// exhaustive minimum-cost circulation on tiny integer instances: enumerate
// every conservative integer flow by distributing each node's inflow over its
// out-arcs in topological order of a DAG-with-return-arc network
struct TinyFlowOracle {
    const pathcode::FlowNetwork& net;
    std::vector<std::vector<int>> out_arcs;
    std::vector<int> order;  // node processing order (return arcs fixed first)
    std::vector<std::int64_t> flow, best_flow;
    std::vector<std::int64_t> lo, hi;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::vector<std::int64_t> cost;
    bool feasible = false;

    explicit TinyFlowOracle(const pathcode::FlowNetwork& n) : net(n) {
        const int m = static_cast<int>(net.arcs.size());
        out_arcs.assign(net.node_count, {});
        lo.resize(m);
        hi.resize(m);
        cost.resize(m);
        for (int a = 0; a < m; ++a) {
            out_arcs[net.arcs[a].tail].push_back(a);
            lo[a] = std::llround(net.arcs[a].lower);
            hi[a] = std::llround(net.arcs[a].upper);
            cost[a] = std::llround(net.arcs[a].cost);
        }
        flow.assign(m, 0);
    }

    // inflow[v] currently accumulated from already-assigned arcs
    std::vector<std::int64_t> inflow;

    void assign_node(std::size_t oi, std::size_t ai, std::int64_t remaining);

    void run(const std::vector<int>& topo_nodes) {
        order = topo_nodes;
        inflow.assign(net.node_count, 0);
        // return arcs (tail == sink) are enumerated up front
        std::vector<int> returns = out_arcs[net.sink];
        enumerate_returns(returns, 0);
    }

    void enumerate_returns(const std::vector<int>& returns, std::size_t i) {
        if (i == returns.size()) {
            assign_node(0, 0, -1);
            return;
        }
        int a = returns[i];
        for (std::int64_t x = lo[a]; x <= hi[a]; ++x) {
            flow[a] = x;
            inflow[net.arcs[a].head] += x;
            enumerate_returns(returns, i + 1);
            inflow[net.arcs[a].head] -= x;
        }
    }
};

inline void TinyFlowOracle::assign_node(std::size_t oi, std::size_t ai, std::int64_t remaining) {
    if (oi == order.size()) {
        // all arcs assigned; sink inflow must match the return arcs already fixed
        std::int64_t ret = 0;
        for (int a : out_arcs[net.sink]) ret += flow[a];
        if (inflow[net.sink] != ret) return;
        std::int64_t c = 0;
        for (std::size_t a = 0; a < flow.size(); ++a) c += flow[a] * cost[a];
        if (!feasible || c < best) {
            best = c;
            best_flow = flow;
            feasible = true;
        }
        return;
    }
    const int v = order[oi];
    const auto& arcs = out_arcs[v];
    if (ai == 0) remaining = inflow[v];
    if (ai == arcs.size()) {
        if (remaining != 0) return;
        assign_node(oi + 1, 0, -1);
        return;
    }
    int a = arcs[ai];
    std::int64_t lo_rest = 0, hi_rest = 0;
    for (std::size_t k = ai + 1; k < arcs.size(); ++k) {
        lo_rest += lo[arcs[k]];
        hi_rest += hi[arcs[k]];
    }
    for (std::int64_t x = lo[a]; x <= hi[a]; ++x) {
        std::int64_t rest = remaining - x;
        if (rest < lo_rest || rest > hi_rest) continue;
        flow[a] = x;
        inflow[net.arcs[a].head] += x;
        assign_node(oi, ai + 1, rest);
        inflow[net.arcs[a].head] -= x;
        flow[a] = 0;
    }
}

// Minimum cost over all conservative integer flows; nullopt when infeasible.
// `topo_nodes` must list every node except pure-return tails, in an order
// where each node's inflow is fully determined before it is processed.
inline std::optional<std::int64_t> brute_force_min_cost(const pathcode::FlowNetwork& net,
                                                        const std::vector<int>& topo_nodes) {
    TinyFlowOracle o(net);
    o.run(topo_nodes);
    if (!o.feasible) return std::nullopt;
    return o.best;
}

// ---------------------------------------------------------------------------
// Dense two-phase simplex (Bland's rule) for  min c'x  s.t.  Ax >= b, x >= 0.
// Only suitable for the tiny LPs used in tests.
struct SimplexResult {
    bool feasible = false;
    double value = 0.0;
    std::vector<double> x;
};

inline SimplexResult simplex_ge(std::vector<std::vector<double>> A, std::vector<double> b,
                                std::vector<double> c) {
    const int m = static_cast<int>(A.size());
    const int n = m == 0 ? 0 : static_cast<int>(A[0].size());
    // rows: A x - s = b with b >= 0 after sign flips
    for (int i = 0; i < m; ++i) {
        if (b[i] < 0) {
            b[i] = -b[i];
            for (double& v : A[i]) v = -v;
        }
    }
    // columns: x (n), surplus (m), artificial (m)
    const int cols = n + 2 * m;
    std::vector<std::vector<double>> T(m, std::vector<double>(cols + 1, 0.0));
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = -1.0;  // surplus
        T[i][n + m + i] = 1.0;
        T[i][cols] = b[i];
        basis[i] = n + m + i;
    }

    auto pivot = [&](int row, int col) {
        double piv = T[row][col];
        for (double& v : T[row]) v /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == row || T[i][col] == 0.0) continue;
            double f = T[i][col];
            for (int j = 0; j <= cols; ++j) T[i][j] -= f * T[row][j];
        }
        basis[row] = col;
    };

    auto solve_with = [&](const std::vector<double>& obj, int active_cols) {
        while (true) {
            std::vector<double> y(m, 0.0);
            for (int i = 0; i < m; ++i) y[i] = obj[basis[i]];
            int enter = -1;
            for (int j = 0; j < active_cols && enter < 0; ++j) {
                double r = obj[j];
                for (int i = 0; i < m; ++i) r -= y[i] * T[i][j];
                if (r < -1e-9) enter = j;  // Bland: first improving index
            }
            if (enter < 0) return true;
            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                if (T[i][enter] > 1e-12) {
                    double ratio = T[i][cols] / T[i][enter];
                    if (leave < 0 || ratio < best_ratio - 1e-15 ||
                        (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) return false;  // unbounded
            pivot(leave, enter);
        }
    };

    // phase 1: minimize sum of artificials
    std::vector<double> obj1(cols, 0.0);
    for (int i = 0; i < m; ++i) obj1[n + m + i] = 1.0;
    solve_with(obj1, cols);
    double art = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= n + m) art += T[i][cols];
    SimplexResult res;
    if (art > 1e-7) return res;  // infeasible
    // drive leftover artificials out of the basis where possible
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= n + m) {
            for (int j = 0; j < n + m; ++j)
                if (std::abs(T[i][j]) > 1e-9) {
                    pivot(i, j);
                    break;
                }
        }
    }
    // phase 2
    std::vector<double> obj2(cols, 0.0);
    for (int j = 0; j < n; ++j) obj2[j] = c[j];
    if (!solve_with(obj2, n + m)) return res;  // unbounded; report infeasible
    res.feasible = true;
    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = T[i][cols];
    res.value = 0.0;
    for (int j = 0; j < n; ++j) res.value += c[j] * res.x[j];
    return res;
}

// ---------------------------------------------------------------------------
// weighted set cover by DP over vertex masks: cover_cost[mask] = cheapest
// total weight of paths whose union contains mask (p <= 20)
inline std::vector<double> cover_cost_table(const std::vector<std::uint32_t>& path_masks,
                                            const std::vector<double>& eta, int p) {
    const std::uint32_t full = (p >= 32) ? 0xffffffffu : ((1u << p) - 1u);
    std::vector<double> dp(full + 1u, std::numeric_limits<double>::infinity());
    dp[0] = 0.0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        int low = 0;
        while (!((mask >> low) & 1u)) ++low;
        for (std::size_t g = 0; g < path_masks.size(); ++g) {
            if (!((path_masks[g] >> low) & 1u)) continue;
            double cand = dp[mask & ~path_masks[g]] + eta[g];
            if (cand < dp[mask]) dp[mask] = cand;
        }
    }
    return dp;
}

// ---------------------------------------------------------------------------
// accelerated projected gradient over nonnegative path amounts; used as the
// independent convex oracle for the norm prox and for convex flow instances.
// objective: F(x) = lin' (P x) + 0.5 * sum_k max(slack_k - (P x)_k, 0)^2 + eta' x
// where P maps path amounts to the k "measured" quantities.
struct PgOracle {
    std::vector<std::vector<double>> P;  // k rows over n path columns
    std::vector<double> lin, slack, eta;

    std::vector<double> solve(int iters = 200000) const {
        const int n = eta.empty() ? 0 : static_cast<int>(eta.size());
        const int k = static_cast<int>(P.size());
        double L = 1e-12;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < n; ++j) L += P[i][j] * P[i][j];
        std::vector<double> x(n, 0.0), xp(n, 0.0), yv(n, 0.0);
        double tk = 1.0;
        for (int it = 0; it < iters; ++it) {
            // gradient at yv
            std::vector<double> q(k, 0.0);
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < n; ++j) q[i] += P[i][j] * yv[j];
                q[i] = std::max(slack[i] - q[i], 0.0);
            }
            std::vector<double> grad(eta);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < n; ++j) grad[j] += P[i][j] * (lin[i] - q[i]);
            double move = 0.0;
            for (int j = 0; j < n; ++j) {
                double nx = std::max(yv[j] - grad[j] / L, 0.0);
                move = std::max(move, std::abs(nx - x[j]));
                xp[j] = nx;
            }
            double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            for (int j = 0; j < n; ++j) yv[j] = xp[j] + (tk - 1.0) / tn * (xp[j] - x[j]);
            std::swap(x, xp);
            tk = tn;
            if (move < 1e-14 && it > 100) break;
        }
        return x;
    }

    double value(const std::vector<double>& x) const {
        const int k = static_cast<int>(P.size());
        double v = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) v += eta[j] * x[j];
        for (int i = 0; i < k; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) s += P[i][j] * x[j];
            v += lin[i] * s;
            double q = std::max(slack[i] - s, 0.0);
            v += 0.5 * q * q;
        }
        return v;
    }
};

// ---------------------------------------------------------------------------
// random tiny DAG: arcs oriented along a random permutation
inline pathcode::Dag random_dag(pathcode::Rng& rng, int max_p = 8, int max_arcs = 14) {
    const int p = rng.uniform_int(1, max_p);
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i + 1;
    rng.shuffle(perm);
    std::vector<std::pair<int, int>> arcs;
    const int want = rng.uniform_int(0, std::min(max_arcs, p * (p - 1) / 2));
    std::vector<std::pair<int, int>> pool;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) pool.emplace_back(perm[i], perm[j]);
    rng.shuffle(pool);
    for (int i = 0; i < want && i < static_cast<int>(pool.size()); ++i) arcs.push_back(pool[i]);
    return pathcode::build_dag(arcs, p);
}

}  // namespace oracle
