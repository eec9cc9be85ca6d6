#include "pathcode/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "pathcode/rng.hpp"

namespace pathcode {

int Dag::arc_index(int u, int v) const {
    if (u < 1 || u > p || v < 1 || v > p) return -1;
    const auto& lst = out_arcs[u];
    auto it = std::lower_bound(lst.begin(), lst.end(), v,
                               [&](int aid, int head) { return arcs[aid].second < head; });
    if (it != lst.end() && arcs[*it].second == v) return *it;
    return -1;
}

namespace {

void build_adjacency(Dag& d) {
    d.out_arcs.assign(d.p + 1, {});
    d.in_arcs.assign(d.p + 1, {});
    for (int a = 0; a < static_cast<int>(d.arcs.size()); ++a) {
        d.out_arcs[d.arcs[a].first].push_back(a);
        d.in_arcs[d.arcs[a].second].push_back(a);
    }
    for (int v = 1; v <= d.p; ++v) {
        std::sort(d.out_arcs[v].begin(), d.out_arcs[v].end(),
                  [&](int a, int b) { return d.arcs[a].second < d.arcs[b].second; });
        std::sort(d.in_arcs[v].begin(), d.in_arcs[v].end(),
                  [&](int a, int b) { return d.arcs[a].first < d.arcs[b].first; });
    }
}

void validate_simple(const std::vector<std::pair<int, int>>& arcs, int p, bool undirected) {
    std::vector<std::pair<int, int>> seen;
    seen.reserve(arcs.size());
    for (auto [u, v] : arcs) {
        if (u < 1 || u > p || v < 1 || v > p)
            throw ParseError("vertex id out of range in arc (" + std::to_string(u) + "," +
                             std::to_string(v) + "), p=" + std::to_string(p));
        if (u == v) throw SelfLoop(u);
        seen.emplace_back(undirected ? std::make_pair(std::min(u, v), std::max(u, v))
                                     : std::make_pair(u, v));
    }
    std::sort(seen.begin(), seen.end());
    auto dup = std::adjacent_find(seen.begin(), seen.end());
    if (dup != seen.end()) throw DuplicateArc(dup->first, dup->second);
}

}  // namespace

Dag build_dag(const std::vector<std::pair<int, int>>& arcs, int p) {
    validate_simple(arcs, p, /*undirected=*/false);

    Dag d;
    d.p = p;
    d.arcs = arcs;
    build_adjacency(d);

    // Kahn's algorithm with a min-heap, so the order is canonical.
    std::vector<int> indeg(p + 1, 0);
    for (auto [u, v] : arcs) indeg[v]++;
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 1; v <= p; ++v)
        if (indeg[v] == 0) ready.push(v);
    d.topo_order.reserve(p);
    while (!ready.empty()) {
        int v = ready.top();
        ready.pop();
        d.topo_order.push_back(v);
        for (int a : d.out_arcs[v])
            if (--indeg[d.arcs[a].second] == 0) ready.push(d.arcs[a].second);
    }
    if (static_cast<int>(d.topo_order.size()) < p) {
        // Every vertex the sort could not pop keeps an in-arc from another such
        // vertex, so walking backwards inside that set must revisit a vertex.
        std::vector<char> leftover(p + 1, 0), visited(p + 1, 0);
        for (int v = 1; v <= p; ++v) leftover[v] = 1;
        for (int v : d.topo_order) leftover[v] = 0;
        int v = 1;
        while (!leftover[v]) ++v;
        int prev = v;
        while (!visited[v]) {
            visited[v] = 1;
            prev = v;
            for (int a : d.in_arcs[v]) {
                int u = d.arcs[a].first;
                if (leftover[u]) {
                    v = u;
                    break;
                }
            }
        }
        throw CycleDetected(v, prev);
    }
    d.topo_pos.assign(p + 1, 0);
    for (int i = 0; i < p; ++i) d.topo_pos[d.topo_order[i]] = i;
    return d;
}

Dag dagify(const std::vector<std::pair<int, int>>& undirected_edges, int p, std::uint64_t seed) {
    validate_simple(undirected_edges, p, /*undirected=*/true);

    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = i + 1;
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> rank(p + 1, 0);
    for (int i = 0; i < p; ++i) rank[order[i]] = i;

    std::vector<std::pair<int, int>> arcs;
    arcs.reserve(undirected_edges.size());
    for (auto [u, v] : undirected_edges)
        arcs.emplace_back(rank[u] < rank[v] ? std::make_pair(u, v) : std::make_pair(v, u));
    return build_dag(arcs, p);
}

AugmentedNetwork augment(const Dag& dag, const CostConfig& costs) {
    AugmentedNetwork net;
    net.base = dag;
    const int p = dag.p;
    const std::size_t m = dag.arcs.size();
    if (costs.mode == CostConfig::Mode::Uniform) {
        net.source_cost.assign(p + 1, costs.gamma);
        net.sink_cost.assign(p + 1, 1.0);
        net.arc_cost.assign(m, 1.0);
    } else {
        if (costs.source.size() != static_cast<std::size_t>(p + 1) ||
            costs.sink.size() != static_cast<std::size_t>(p + 1) || costs.internal.size() != m)
            throw MissingArcCost("explicit cost config does not cover every arc of E'");
        net.source_cost = costs.source;
        net.sink_cost = costs.sink;
        net.arc_cost = costs.internal;
    }
    net.source_cost[0] = 0.0;
    net.sink_cost[0] = 0.0;
    return net;
}

double AugmentedNetwork::max_abs_cost() const {
    double m = 0.0;
    for (int v = 1; v <= base.p; ++v)
        m = std::max({m, std::abs(source_cost[v]), std::abs(sink_cost[v])});
    for (double c : arc_cost) m = std::max(m, std::abs(c));
    return m;
}

double weight_of_path(const AugmentedNetwork& net, const Path& g) {
    if (g.empty()) throw InvalidPath("empty path");
    for (int v : g)
        if (v < 1 || v > net.base.p) throw InvalidPath("vertex " + std::to_string(v) + " out of range");
    double w = net.source_cost[g.front()] + net.sink_cost[g.back()];
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        int a = net.base.arc_index(g[i], g[i + 1]);
        if (a < 0)
            throw InvalidPath("(" + std::to_string(g[i]) + "," + std::to_string(g[i + 1]) +
                              ") is not an arc");
        w += net.arc_cost[a];
    }
    return w;
}

std::pair<Path, double> shortest_path(const AugmentedNetwork& net,
                                      const std::vector<double>& node_lengths) {
    const Dag& d = net.base;
    const int p = d.p;
    if (p == 0) throw InvalidPath("graph has no vertices");
    if (node_lengths.size() != static_cast<std::size_t>(p + 1))
        throw DimensionMismatch("node_lengths must have size p+1");

    std::vector<double> best(p + 1, std::numeric_limits<double>::infinity());
    std::vector<int> parent(p + 1, 0);  // 0 = entered from s

    auto path_to = [&](int v) {
        Path g;
        for (int x = v; x != 0; x = parent[x]) g.push_back(x);
        std::reverse(g.begin(), g.end());
        return g;
    };

    for (int v : d.topo_order) {
        best[v] = net.source_cost[v] + node_lengths[v];
        for (int a : d.in_arcs[v]) {
            int u = d.arcs[a].first;
            double cand = best[u] + net.arc_cost[a] + node_lengths[v];
            if (cand < best[v]) {
                best[v] = cand;
                parent[v] = u;
            } else if (cand == best[v] && parent[v] != u) {
                Path alt = path_to(u);
                alt.push_back(v);
                if (alt < path_to(v)) parent[v] = u;
            }
        }
    }

    int arg = -1;
    double total = std::numeric_limits<double>::infinity();
    for (int v = 1; v <= p; ++v) {
        double cand = best[v] + net.sink_cost[v];
        if (cand < total) {
            total = cand;
            arg = v;
        } else if (cand == total && path_to(v) < path_to(arg)) {
            arg = v;
        }
    }
    return {path_to(arg), total};
}

CostConfig coding_costs(const Dag& dag, const TransitionMatrix& pi) {
    const int p = dag.p;
    const std::size_t m = dag.arcs.size();
    if (pi.source.size() != static_cast<std::size_t>(p + 1) ||
        pi.sink.size() != static_cast<std::size_t>(p + 1) || pi.internal.size() != m)
        throw DimensionMismatch("transition matrix does not cover every arc of E'");

    auto check_row = [](double sum, const std::string& who) {
        if (std::abs(sum - 1.0) > 1e-9)
            throw ParseError("transition row of " + who + " sums to " + std::to_string(sum));
    };
    double srow = 0.0;
    for (int v = 1; v <= p; ++v) srow += pi.source[v];
    check_row(srow, "s");
    for (int u = 1; u <= p; ++u) {
        double row = pi.sink[u];
        for (int a : dag.out_arcs[u]) row += pi.internal[a];
        check_row(row, "vertex " + std::to_string(u));
    }

    auto nlog2 = [](double x, int u, int v) {
        if (!(x > 0.0))
            throw ZeroProbabilityArc("arc (" + std::to_string(u) + "," + std::to_string(v) +
                                     ") has zero transition probability");
        return -std::log2(x);
    };
    std::vector<double> src(p + 1, 0.0), snk(p + 1, 0.0), internal(m, 0.0);
    for (int v = 1; v <= p; ++v) src[v] = 1.0 + nlog2(pi.source[v], 0, v);
    for (int u = 1; u <= p; ++u) snk[u] = nlog2(pi.sink[u], u, p + 1);
    for (std::size_t a = 0; a < m; ++a)
        internal[a] = nlog2(pi.internal[a], dag.arcs[a].first, dag.arcs[a].second);
    return CostConfig::explicit_costs(std::move(src), std::move(internal), std::move(snk));
}

EdgeListFile read_edge_list(std::istream& in) {
    EdgeListFile f;
    std::string line;
    bool header_done = false;
    int seen = 0;
    bool costs_everywhere = true;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (!header_done) {
            std::string kind;
            if (!(ls >> f.p >> f.m >> kind)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                throw ParseError("bad edge-list header: " + line);
            }
            if (kind == "directed")
                f.directed = true;
            else if (kind == "undirected")
                f.directed = false;
            else
                throw ParseError("edge-list header must say directed|undirected, got: " + kind);
            header_done = true;
            continue;
        }
        int u, v;
        if (!(ls >> u >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError("bad edge line: " + line);
        }
        f.edges.emplace_back(u, v);
        double c;
        if (ls >> c)
            f.costs.push_back(c);
        else
            costs_everywhere = false;
        ++seen;
    }
    if (!header_done) throw ParseError("empty edge-list file");
    if (seen != f.m)
        throw ParseError("expected " + std::to_string(f.m) + " edges, found " + std::to_string(seen));
    if (!costs_everywhere || f.costs.size() != f.edges.size()) f.costs.clear();
    return f;
}

EdgeListFile read_edge_list_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ParseError("cannot open " + filename);
    return read_edge_list(in);
}

}  // namespace pathcode
