#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pathcode/errors.hpp"

namespace pathcode {

// A path is an ordered vertex sequence (v1,...,vk), k >= 1, vertices 1..p,
// with every consecutive pair an arc of the DAG.
using Path = std::vector<int>;

// Directed acyclic graph on vertices 1..p. Immutable after construction.
struct Dag {
    int p = 0;
    std::vector<std::pair<int, int>> arcs;
    std::vector<int> topo_order;  // permutation of 1..p
    std::vector<int> topo_pos;    // topo_pos[v] = position of v in topo_order; size p+1, [0] unused

    // adjacency; arc ids index into `arcs`; out lists sorted by head id
    std::vector<std::vector<int>> out_arcs;  // size p+1
    std::vector<std::vector<int>> in_arcs;

    bool has_arc(int u, int v) const { return arc_index(u, v) >= 0; }
    int arc_index(int u, int v) const;  // -1 if absent
};

// Arc costs for the source/sink-augmented network. Uniform(gamma) expands to
// c_sv = gamma, c_vt = 1, internal arcs 1, so that a path of length k weighs
// gamma + k. Explicit mode supplies every cost of E' individually.
struct CostConfig {
    enum class Mode { Uniform, Explicit };
    Mode mode = Mode::Uniform;
    double gamma = 0.0;
    // Explicit mode; per-vertex vectors are indexed by vertex id (size p+1,
    // entry [0] unused), `internal` is aligned with Dag::arcs.
    std::vector<double> source;
    std::vector<double> internal;
    std::vector<double> sink;

    static CostConfig uniform(double gamma_) {
        CostConfig c;
        c.mode = Mode::Uniform;
        c.gamma = gamma_;
        return c;
    }
    static CostConfig explicit_costs(std::vector<double> source, std::vector<double> internal,
                                     std::vector<double> sink) {
        CostConfig c;
        c.mode = Mode::Explicit;
        c.source = std::move(source);
        c.internal = std::move(internal);
        c.sink = std::move(sink);
        return c;
    }
};

// G' = G plus a source s and sink t linked to every vertex, with one cost per
// arc of E' = E u {(s,v)} u {(u,t)}. Internally s = 0 and t = p+1.
struct AugmentedNetwork {
    Dag base;
    std::vector<double> source_cost;  // size p+1, [0] unused
    std::vector<double> arc_cost;     // aligned with base.arcs
    std::vector<double> sink_cost;    // size p+1

    int source() const { return 0; }
    int sink() const { return base.p + 1; }
    int node_count() const { return base.p + 2; }
    int arc_count() const { return static_cast<int>(base.arcs.size()) + 2 * base.p; }
    double max_abs_cost() const;
};

// Row-stochastic transition probabilities on the arcs of E'; layout mirrors
// the cost vectors of AugmentedNetwork (t is absorbing and has no row).
struct TransitionMatrix {
    std::vector<double> source;    // pi(s,v), size p+1
    std::vector<double> internal;  // pi(u,v) per arc of E
    std::vector<double> sink;      // pi(u,t), size p+1
};

// Validates and topologically orders an arc list. Throws CycleDetected (naming
// one arc on a cycle), DuplicateArc or SelfLoop.
Dag build_dag(const std::vector<std::pair<int, int>>& arcs, int p);

// Orients a simple undirected graph into a DAG: draws a random total order of
// the vertices from `seed` and directs every edge from lower to higher rank.
// Keeps all edges; deterministic given the seed.
Dag dagify(const std::vector<std::pair<int, int>>& undirected_edges, int p, std::uint64_t seed);

AugmentedNetwork augment(const Dag& dag, const CostConfig& costs);

// Sum of arc costs along (s, g, t). Throws InvalidPath.
double weight_of_path(const AugmentedNetwork& net, const Path& g);

// Minimum-length (s,t)-path where the length of (s,g,t) is the sum of arc
// costs plus node_lengths[v] for every v in g (node_lengths indexed by vertex
// id, size p+1). Single pass in topological order; ties broken by the
// lexicographically smallest vertex sequence.
std::pair<Path, double> shortest_path(const AugmentedNetwork& net,
                                      const std::vector<double>& node_lengths);

// Explicit costs c_sv = 1 - log2 pi(s,v) and c_uv = -log2 pi(u,v) elsewhere,
// so that the weight of a path equals its coding length plus one bit.
CostConfig coding_costs(const Dag& dag, const TransitionMatrix& pi);

// Edge-list text format: header "p m directed|undirected", then m lines
// "u v [cost]"; '#' starts a comment; ids are 1-based.
struct EdgeListFile {
    int p = 0;
    int m = 0;
    bool directed = true;
    std::vector<std::pair<int, int>> edges;
    std::vector<double> costs;  // empty unless every edge line carried a cost
};

EdgeListFile read_edge_list(std::istream& in);
EdgeListFile read_edge_list_file(const std::string& filename);

}  // namespace pathcode
