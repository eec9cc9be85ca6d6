#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pathcode/graph.hpp"
#include "pathcode/rng.hpp"
#include "support/oracles.hpp"

using namespace pathcode;

namespace {
Dag diamond() { return build_dag({{1, 2}, {1, 3}, {2, 4}, {3, 4}}, 4); }

// the four-vertex graph of the augmented-network illustration:
// 1->2, 2->3, 4->3, 1->4, 4->2
Dag four_cycle_free() { return build_dag({{1, 2}, {2, 3}, {4, 3}, {1, 4}, {4, 2}}, 4); }
}  // namespace

TEST_CASE("build_dag orders the diamond canonically") {
    Dag d = diamond();
    CHECK(d.topo_order == std::vector<int>{1, 2, 3, 4});
    CHECK(d.has_arc(1, 2));
    CHECK(!d.has_arc(2, 1));
    for (auto [u, v] : d.arcs) CHECK(d.topo_pos[u] < d.topo_pos[v]);
}

TEST_CASE("build_dag rejects bad input") {
    CHECK_THROWS_AS(build_dag({{1, 2}, {2, 1}}, 2), CycleDetected);
    CHECK_THROWS_AS(build_dag({{1, 1}}, 1), SelfLoop);
    CHECK_THROWS_AS(build_dag({{1, 2}, {1, 2}}, 2), DuplicateArc);
    CHECK_THROWS_AS(build_dag({{1, 5}}, 3), ParseError);
    try {
        build_dag({{1, 2}, {2, 3}, {3, 2}}, 3);
        CHECK(false);
    } catch (const CycleDetected& e) {
        // the reported arc must lie on the 2-3 cycle
        CHECK(e.cycle_u + e.cycle_v == 5);
    }
}

TEST_CASE("build_dag accepts isolated vertices") {
    Dag d = build_dag({}, 3);
    CHECK(d.topo_order == std::vector<int>{1, 2, 3});
}

TEST_CASE("dagify follows the sampled order and keeps all edges") {
    // single edge: orientation determined by the seed's permutation
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
        Dag d = dagify({{1, 2}}, 2, seed);
        CHECK(d.arcs.size() == 1);
    }
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Dag t = dagify({{1, 2}, {2, 3}, {1, 3}}, 3, seed);
        CHECK(t.arcs.size() == 3);  // build_dag already validated acyclicity
        Dag again = dagify({{1, 2}, {2, 3}, {1, 3}}, 3, seed);
        CHECK(t.arcs == again.arcs);
    }
}

TEST_CASE("dagify at jazz scale") {
    // random simple graph with the same size as the 198-vertex benchmark set
    Rng rng(7);
    std::vector<std::pair<int, int>> edges;
    std::vector<std::pair<int, int>> pool;
    for (int u = 1; u <= 198; ++u)
        for (int v = u + 1; v <= 198; ++v) pool.emplace_back(u, v);
    rng.shuffle(pool);
    edges.assign(pool.begin(), pool.begin() + 2742);
    Dag d = dagify(edges, 198, 42);
    CHECK(d.p == 198);
    CHECK(d.arcs.size() == 2742);
}

TEST_CASE("augment counts arcs and expands uniform costs") {
    AugmentedNetwork net = augment(diamond(), CostConfig::uniform(1.0));
    CHECK(net.arc_count() == 12);  // |E| + 2p
    CHECK(weight_of_path(net, {1, 2, 4}) == doctest::Approx(4.0));
    CHECK(weight_of_path(net, {2}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(weight_of_path(net, {2, 3}), InvalidPath);
    CHECK_THROWS_AS(weight_of_path(net, {}), InvalidPath);
}

TEST_CASE("weight_of_path matches gamma + |g| for every path of random DAGs") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        Dag d = oracle::random_dag(rng);
        double gamma = rng.uniform(0.0, 3.0);
        AugmentedNetwork net = augment(d, CostConfig::uniform(gamma));
        for (const Path& g : oracle::all_paths(d))
            CHECK(weight_of_path(net, g) == doctest::Approx(gamma + g.size()).epsilon(1e-12));
    }
}

TEST_CASE("explicit cost configuration") {
    Dag d = four_cycle_free();
    AugmentedNetwork uni = augment(d, CostConfig::uniform(0.25));
    CHECK(weight_of_path(uni, {4, 2, 3}) == doctest::Approx(3.25));  // gamma + 3

    // source cost 1 on vertex 1, 5 elsewhere; arc (1,2) costs 2; sinks cost 1
    std::vector<double> src = {0, 1, 5, 5, 5};
    std::vector<double> snk = {0, 1, 1, 1, 1};
    std::vector<double> internal(d.arcs.size(), 1.0);
    internal[d.arc_index(1, 2)] = 2.0;
    AugmentedNetwork ex = augment(d, CostConfig::explicit_costs(src, internal, snk));
    CHECK(weight_of_path(ex, {1, 2}) == doctest::Approx(4.0));

    CHECK_THROWS_AS(augment(d, CostConfig::explicit_costs(src, {1.0}, snk)), MissingArcCost);
}

TEST_CASE("shortest_path on the diamond") {
    AugmentedNetwork net = augment(diamond(), CostConfig::uniform(1.0));
    auto [g, len] = shortest_path(net, {0, -2, -2, 0, -2});
    CHECK(g == Path{1, 2, 4});
    CHECK(len == doctest::Approx(-2.0));
}

TEST_CASE("shortest_path trivia") {
    AugmentedNetwork net = augment(diamond(), CostConfig::uniform(0.5));
    auto [g, len] = shortest_path(net, {0, 0, 0, 0, 0});
    CHECK(len == doctest::Approx(1.5));
    CHECK(g == Path{1});  // lexicographic tie-break among the singletons

    Dag one = build_dag({}, 1);
    AugmentedNetwork n1 = augment(one, CostConfig::uniform(0.0));
    auto [g1, l1] = shortest_path(n1, {0, 5.0});
    CHECK(g1 == Path{1});
    CHECK(l1 == doctest::Approx(6.0));
}

TEST_CASE("shortest_path equals exhaustive enumeration on random DAGs") {
    Rng rng(5);
    for (int trial = 0; trial < 120; ++trial) {
        Dag d = oracle::random_dag(rng);
        double gamma = rng.uniform(0.0, 2.0);
        AugmentedNetwork net = augment(d, CostConfig::uniform(gamma));
        std::vector<double> len(d.p + 1, 0.0);
        for (int v = 1; v <= d.p; ++v) len[v] = rng.uniform(-2.0, 1.0);
        auto [g, val] = shortest_path(net, len);

        double best = std::numeric_limits<double>::infinity();
        for (const Path& h : oracle::all_paths(d)) {
            double w = weight_of_path(net, h);
            for (int v : h) w += len[v];
            best = std::min(best, w);
        }
        CHECK(val == doctest::Approx(best).epsilon(1e-10));
        double wg = weight_of_path(net, g);
        for (int v : g) wg += len[v];
        CHECK(wg == doctest::Approx(val).epsilon(1e-10));
    }
}

namespace {
TransitionMatrix uniform_transitions(const Dag& d) {
    TransitionMatrix pi;
    pi.source.assign(d.p + 1, 1.0 / d.p);
    pi.internal.assign(d.arcs.size(), 0.0);
    pi.sink.assign(d.p + 1, 0.0);
    for (int u = 1; u <= d.p; ++u) {
        const double q = 1.0 / (d.out_arcs[u].size() + 1);
        pi.sink[u] = q;
        for (int a : d.out_arcs[u]) pi.internal[a] = q;
    }
    return pi;
}
}  // namespace

TEST_CASE("coding costs") {
    Dag chain = build_dag({}, 1);
    TransitionMatrix pi;
    pi.source = {0.0, 1.0};
    pi.internal = {};
    pi.sink = {0.0, 1.0};
    CostConfig cc = coding_costs(chain, pi);
    AugmentedNetwork net = augment(chain, cc);
    CHECK(weight_of_path(net, {1}) == doctest::Approx(1.0));  // 1 - log2(1) + 0

    Dag d = diamond();
    TransitionMatrix u = uniform_transitions(d);
    // uniform over k out-arcs => internal cost log2(k+1) counting the sink arc
    CostConfig cu = coding_costs(d, u);
    CHECK(cu.internal[d.arc_index(1, 2)] == doctest::Approx(std::log2(3.0)));

    u.internal[d.arc_index(1, 2)] = 0.0;  // keep the row stochastic
    u.internal[d.arc_index(1, 3)] = 2.0 / 3.0;
    CHECK_THROWS_AS(coding_costs(d, u), ZeroProbabilityArc);
}

TEST_CASE("coding costs satisfy the Kraft equality on random DAGs") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        Dag d = oracle::random_dag(rng, 7, 12);
        // random positive transition rows
        TransitionMatrix pi;
        pi.source.assign(d.p + 1, 0.0);
        pi.internal.assign(d.arcs.size(), 0.0);
        pi.sink.assign(d.p + 1, 0.0);
        double z = 0.0;
        for (int v = 1; v <= d.p; ++v) z += (pi.source[v] = rng.uniform(0.05, 1.0));
        for (int v = 1; v <= d.p; ++v) pi.source[v] /= z;
        for (int u = 1; u <= d.p; ++u) {
            double row = pi.sink[u] = rng.uniform(0.05, 1.0);
            for (int a : d.out_arcs[u]) row += (pi.internal[a] = rng.uniform(0.05, 1.0));
            pi.sink[u] /= row;
            for (int a : d.out_arcs[u]) pi.internal[a] /= row;
        }
        AugmentedNetwork net = augment(d, coding_costs(d, pi));
        double kraft = 0.0;
        for (const Path& g : oracle::all_paths(d))
            kraft += std::exp2(-(weight_of_path(net, g) - 1.0));
        CHECK(kraft == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("edge list parsing") {
    std::istringstream in(
        "# comment\n"
        "4 4 directed\n"
        "1 2\n"
        "1 3  # inline comment\n"
        "2 4\n"
        "3 4\n");
    EdgeListFile f = read_edge_list(in);
    CHECK(f.p == 4);
    CHECK(f.directed);
    CHECK(f.edges.size() == 4);
    CHECK(f.costs.empty());

    std::istringstream in2("2 1 undirected\n1 2 0.5\n");
    EdgeListFile f2 = read_edge_list(in2);
    CHECK(!f2.directed);
    REQUIRE(f2.costs.size() == 1);
    CHECK(f2.costs[0] == doctest::Approx(0.5));

    std::istringstream bad("2 2 directed\n1 2\n");
    CHECK_THROWS_AS(read_edge_list(bad), ParseError);
    std::istringstream bad2("2 1 sideways\n1 2\n");
    CHECK_THROWS_AS(read_edge_list(bad2), ParseError);
}
