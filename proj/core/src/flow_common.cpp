#include <algorithm>
#include <cmath>
#include <ostream>

#include "pathcode/flow.hpp"

namespace pathcode {

SplitResult split_nodes(const FlowNetwork& net) {
    const int n = net.node_count;
    SplitResult r;
    r.node_in.assign(n, -1);
    r.node_out.assign(n, -1);
    r.node_arcs.assign(n, {});

    std::vector<double> in_cap(n, 0.0);
    for (const FlowArc& a : net.arcs) in_cap[a.head] += a.upper;

    int next = 0;
    for (int v = 0; v < n; ++v) {
        if (v == net.source || v == net.sink) {
            r.node_in[v] = r.node_out[v] = next++;
        } else {
            r.node_in[v] = next++;
            r.node_out[v] = next++;
        }
    }
    r.net.node_count = next;
    r.net.source = r.node_in[net.source];
    r.net.sink = r.node_in[net.sink];

    for (const FlowArc& a : net.arcs) {
        FlowArc b = a;
        b.tail = r.node_out[a.tail];
        b.head = r.node_in[a.head];
        r.net.arcs.push_back(b);
        r.arc_map.push_back(static_cast<int>(&a - net.arcs.data()));
    }

    for (int v = 0; v < n; ++v) {
        if (v == net.source || v == net.sink) {
            if (!net.node_costs.empty() && !net.node_costs[v].trivial())
                throw Error("node costs on source/sink are not supported");
            continue;
        }
        NodeCost nc = net.node_costs.empty() ? NodeCost{} : net.node_costs[v];
        if (nc.has_linear_drop && nc.has_quad_drop)
            throw Error("a node cannot carry both drop cost kinds");
        double upper = std::isfinite(nc.upper) ? nc.upper : in_cap[v];
        const int tail = r.node_in[v], head = r.node_out[v];
        if (nc.has_linear_drop) {
            // max(a*(1-s), 0) = a - a*min(s,1): one arc of capacity one and
            // cost -a in parallel with a free arc, plus the constant a
            int a1 = r.net.add_arc(tail, head, 0.0, std::min(1.0, upper), -nc.linear_drop);
            int a2 = r.net.add_arc(tail, head, nc.lower, upper, 0.0);
            r.node_arcs[v] = {a1, a2};
            r.constant += nc.linear_drop;
            r.arc_map.push_back(-1);
            r.arc_map.push_back(-1);
        } else if (nc.has_quad_drop) {
            int a1 = r.net.add_quad_arc(tail, head, upper, nc.quad_drop);
            r.net.arcs[a1].lower = nc.lower;
            r.node_arcs[v] = {a1};
            r.arc_map.push_back(-1);
        } else {
            int a1 = r.net.add_arc(tail, head, nc.lower, upper, 0.0);
            r.node_arcs[v] = {a1};
            r.arc_map.push_back(-1);
        }
    }
    return r;
}

PathDecomposition decompose(const FlowNetwork& net, const FlowState& f, double tol) {
    const int n = net.node_count;
    const int m = static_cast<int>(net.arcs.size());
    if (f.arc_flow.size() != net.arcs.size())
        throw DimensionMismatch("flow state does not match network");

    // conservation at internal nodes, counting everything but return arcs
    std::vector<double> balance(n, 0.0);
    std::vector<std::vector<int>> out(n);
    for (int a = 0; a < m; ++a) {
        const FlowArc& arc = net.arcs[a];
        if (arc.tail == net.sink) continue;
        if (f.arc_flow[a] < -tol) throw NonConservativeInput("negative arc flow");
        if (f.arc_flow[a] <= tol) continue;
        balance[arc.tail] -= f.arc_flow[a];
        balance[arc.head] += f.arc_flow[a];
        out[arc.tail].push_back(a);
    }
    const double cons_tol = tol > 0.0 ? tol * std::max<std::size_t>(8, net.arcs.size()) : 1e-12;
    for (int v = 0; v < n; ++v) {
        if (v == net.source || v == net.sink) continue;
        if (std::abs(balance[v]) > cons_tol)
            throw NonConservativeInput("inflow != outflow at node " + std::to_string(v));
    }
    for (int v = 0; v < n; ++v)
        std::sort(out[v].begin(), out[v].end(),
                  [&](int a, int b) { return net.arcs[a].head < net.arcs[b].head; });

    std::vector<double> resid = f.arc_flow;
    PathDecomposition d;
    auto first_live = [&](int v) {
        for (int a : out[v])
            if (resid[a] > tol) return a;
        return -1;
    };
    while (true) {
        int a0 = first_live(net.source);
        if (a0 < 0) break;
        std::vector<int> nodes = {net.source};
        std::vector<int> arcs;
        int v = net.source;
        double bottleneck = std::numeric_limits<double>::infinity();
        while (v != net.sink) {
            int a = first_live(v);
            if (a < 0) throw NonConservativeInput("flow strands at node " + std::to_string(v));
            arcs.push_back(a);
            bottleneck = std::min(bottleneck, resid[a]);
            v = net.arcs[a].head;
            nodes.push_back(v);
            if (nodes.size() > static_cast<std::size_t>(n))
                throw Error("flow graph has a cycle");
        }
        for (int a : arcs) resid[a] -= bottleneck;
        d.paths.emplace_back(std::move(nodes), bottleneck);
    }
    for (int a = 0; a < m; ++a)
        if (net.arcs[a].tail != net.sink && resid[a] > tol)
            throw NonConservativeInput("residual flow left after peeling");
    return d;
}

double node_throughput(const FlowNetwork& net, const FlowState& f, int node) {
    double s = 0.0;
    for (std::size_t a = 0; a < net.arcs.size(); ++a)
        if (net.arcs[a].head == node) s += f.arc_flow[a];
    return s;
}

void validate_flow(const FlowNetwork& net, const FlowState& f, double tol) {
    if (f.arc_flow.size() != net.arcs.size())
        throw DimensionMismatch("flow state does not match network");
    std::vector<double> balance(net.node_count, 0.0);
    for (std::size_t a = 0; a < net.arcs.size(); ++a) {
        const FlowArc& arc = net.arcs[a];
        const double x = f.arc_flow[a];
        if (x < arc.lower - tol || x > arc.upper + tol)
            throw Error("capacity violated on arc " + std::to_string(a));
        balance[arc.tail] -= x;
        balance[arc.head] += x;
    }
    for (int v = 0; v < net.node_count; ++v) {
        if (v == net.source || v == net.sink) continue;
        if (std::abs(balance[v]) > tol)
            throw Error("conservation violated at node " + std::to_string(v));
    }
}

void dump_flow(std::ostream& os, const FlowNetwork& net, const FlowState& f) {
    for (std::size_t a = 0; a < net.arcs.size(); ++a) {
        const FlowArc& arc = net.arcs[a];
        os << "arc " << arc.tail << ' ' << arc.head << ' ' << arc.lower << ' ' << arc.upper << ' '
           << arc.cost << ' ' << (f.arc_flow.empty() ? 0.0 : f.arc_flow[a]) << '\n';
    }
}

}  // namespace pathcode
