#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "pathcode/errors.hpp"

namespace pathcode {

// One arc of a flow network. Costs are either linear (cost * f) or, for arcs
// produced by split_nodes from quadratic node costs, the convex slack term
// 0.5 * max(quad_target - f, 0)^2 (plus any linear part).
struct FlowArc {
    int tail = 0, head = 0;
    double lower = 0.0, upper = 0.0;
    double cost = 0.0;
    double quad_target = 0.0;
    bool quad = false;
};

// Convex throughput cost / capacity attached to a node; lowered onto split
// arcs by split_nodes(). linear_drop a adds max(a*(1-s), 0); quad_drop b adds
// 0.5*max(b-s, 0)^2, with s the total flow through the node.
struct NodeCost {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();  // default: sum of in-arc uppers
    double linear_drop = 0.0;
    double quad_drop = 0.0;
    bool has_linear_drop = false;
    bool has_quad_drop = false;

    bool trivial() const {
        return lower == 0.0 && upper == std::numeric_limits<double>::infinity() &&
               !has_linear_drop && !has_quad_drop;
    }
};

// Directed network with designated source/sink. Solvers treat it as a pure
// circulation: callers wanting free (s,t) flux add a zero-cost return arc
// sink -> source themselves. Immutable while a solver runs on it.
struct FlowNetwork {
    int node_count = 0;
    int source = 0, sink = 0;
    std::vector<FlowArc> arcs;
    std::vector<NodeCost> node_costs;  // empty, or size node_count

    int add_arc(int tail, int head, double lower, double upper, double cost) {
        arcs.push_back({tail, head, lower, upper, cost, 0.0, false});
        return static_cast<int>(arcs.size()) - 1;
    }
    int add_quad_arc(int tail, int head, double upper, double quad_target, double cost = 0.0) {
        arcs.push_back({tail, head, 0.0, upper, cost, quad_target, true});
        return static_cast<int>(arcs.size()) - 1;
    }
};

struct FlowState {
    std::vector<double> arc_flow;
    double cost = 0.0;          // total of arc cost terms (split constants excluded)
    double achieved_eps = 0.0;  // complementary-slackness tolerance reached
    std::vector<double> price;  // node prices at termination
};

struct FlowSolverConfig {
    // power-of-two factor mapping real costs to 64-bit integers; lowered
    // automatically when the instance would overflow 64-bit price arithmetic
    int cost_scale_bits = 48;
    double eps_initial = 0.0;   // convex solver; 0 = derive from the costs
    double eps_divisor = 4.0;
    double eps_terminal = 0.0;  // convex solver; 0 = derive
    std::int64_t max_operations = 2'000'000'000;
};

// Result of the node-splitting transformation. node_arcs[v] lists the split
// arc ids whose flows sum to the throughput s_v; `constant` is the objective
// offset introduced by rewriting max(a*(1-s),0) as parallel arcs.
struct SplitResult {
    FlowNetwork net;
    std::vector<int> node_in, node_out;
    std::vector<std::vector<int>> node_arcs;
    std::vector<int> arc_map;  // new arc id -> original arc id, -1 for split arcs
    double constant = 0.0;
};

SplitResult split_nodes(const FlowNetwork& net);

// Exact min-cost circulation for linear costs and integral capacities
// (cost-scaling push-relabel over integer-scaled costs; feasibility of lower
// capacities established by a max-flow phase first).
FlowState min_cost_flow(const FlowNetwork& net, const FlowSolverConfig& cfg = {});

// Reusable warm-start state for repeated convex solves on a fixed topology.
struct ConvexScratch {
    std::vector<double> flow, price;
    bool valid = false;
};

// eps-relaxation for convex separable arc costs (linear and slack-quadratic),
// with exact one-dimensional minimization at every push.
FlowState min_cost_flow_convex(const FlowNetwork& net, const FlowSolverConfig& cfg = {},
                               ConvexScratch* scratch = nullptr);

// A flow written as (s,t)-path flows. Node sequences include source and sink.
struct PathDecomposition {
    std::vector<std::pair<std::vector<int>, double>> paths;
};

// Greedy peeling of a conservative DAG flow; return arcs (tail == sink) are
// ignored. Flows below tol are treated as zero.
PathDecomposition decompose(const FlowNetwork& net, const FlowState& f, double tol = 0.0);

double node_throughput(const FlowNetwork& net, const FlowState& f, int node);

// Throws unless capacities and conservation (at nodes other than source and
// sink) hold within tol.
void validate_flow(const FlowNetwork& net, const FlowState& f, double tol = 1e-9);

// Line-oriented debug dump: "arc u v lower upper cost flow".
void dump_flow(std::ostream& os, const FlowNetwork& net, const FlowState& f);

}  // namespace pathcode
