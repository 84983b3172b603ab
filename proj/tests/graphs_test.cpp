#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "citeimpact/errors.hpp"
#include "citeimpact/graphs.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace citeimpact;
using fixtures::Paper;
using oracles::pagerank_dense;

namespace {

graphs::DiGraph random_digraph(std::mt19937_64& rng, int max_n) {
    graphs::DiGraph g;
    int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n - 1));
    for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(i));
    int edges = static_cast<int>(rng() % static_cast<std::uint64_t>(3 * n + 1));
    for (int e = 0; e < edges; ++e) {
        int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
        double w = 1.0 + static_cast<double>(rng() % 4);
        g.add_edge(g.nodes[u], g.nodes[v], w);
    }
    return g;
}

}  // namespace

TEST_CASE("citation graph: one edge per resolved reference, dangling refs omitted") {
    corpus::Corpus c = fixtures::make_corpus({
        {"P1", 1990, {"a1"}, {}},
        {"P2", 1991, {"a2"}, {"P1", "ghost"}},
    });
    graphs::DiGraph g = graphs::build_citation_graph(c);
    CHECK(g.nodes.size() == 2);
    CHECK(g.edge_count() == 1);
    int p2 = g.index.at("P2");
    REQUIRE(g.out_edges[p2].size() == 1);
    CHECK(g.out_edges[p2][0].first == g.index.at("P1"));

    corpus::Corpus empty = fixtures::make_corpus({});
    CHECK(graphs::build_citation_graph(empty).nodes.empty());
}

TEST_CASE("coauthorship graph: per-paper clique, sliced by year") {
    corpus::Corpus c = fixtures::make_corpus({
        {"P1", 2000, {"a", "b", "c"}, {}},
        {"P2", 2001, {"b", "d"}, {}},
    });
    graphs::CoAuthorGraph g2000 = graphs::build_coauthorship_graph(c, 2000);
    CHECK(g2000.edge_count() == 3);
    CHECK(g2000.has_edge("a", "b"));
    CHECK(g2000.has_edge("a", "c"));
    CHECK(g2000.has_edge("b", "c"));
    CHECK_FALSE(g2000.has_edge("b", "d"));

    graphs::CoAuthorGraph g1999 = graphs::build_coauthorship_graph(c, 1999);
    CHECK(g1999.edge_count() == 0);

    graphs::CoAuthorGraph g2001 = graphs::build_coauthorship_graph(c, 2001);
    // Monotone in the slice year: earlier edges are all retained.
    CHECK(g2001.has_edge("a", "b"));
    CHECK(g2001.has_edge("b", "d"));
    CHECK(g2001.edge_count() == 4);
    // b's neighborhood is the union over its papers.
    int b = g2001.index.at("b");
    CHECK(g2001.adj[b].size() == 3);
}

TEST_CASE("venue graph: weighted edges with self-loops retained") {
    corpus::Corpus c = fixtures::make_corpus({
        {"P1", 1990, {"a1"}, {}, "t", "abstract one", "V2"},
        {"P2", 1991, {"a2"}, {"P1"}, "t", "abstract two", "V1"},
        {"P3", 1992, {"a3"}, {"P1"}, "t", "abstract three", "V1"},
        {"P4", 1993, {"a4"}, {"P3"}, "t", "abstract four", "V1"},
    });
    graphs::DiGraph g = graphs::build_venue_graph(c);
    int v1 = g.index.at("V1"), v2 = g.index.at("V2");
    double w12 = 0.0, w11 = 0.0;
    for (const auto& [v, w] : g.out_edges[v1]) {
        if (v == v2) w12 = w;
        if (v == v1) w11 = w;
    }
    CHECK(w12 == 2.0);  // P2 and P3 both cite into V2
    CHECK(w11 == 1.0);  // within-venue citation stays as a self-loop
}

TEST_CASE("shortest_distance: hop counts, cap, symmetry") {
    corpus::Corpus c = fixtures::make_corpus({
        {"P1", 2000, {"a", "b"}, {}},
        {"P2", 2000, {"b", "c"}, {}},
        {"P3", 2000, {"d"}, {}},
    });
    graphs::CoAuthorGraph g = graphs::build_coauthorship_graph(c, 2000);
    CHECK(graphs::shortest_distance(g, "a", "a") == 0);
    CHECK(graphs::shortest_distance(g, "a", "b") == 1);
    CHECK(graphs::shortest_distance(g, "a", "c") == 2);
    CHECK(graphs::shortest_distance(g, "c", "a") == 2);  // symmetric
    CHECK(graphs::shortest_distance(g, "a", "d") == graphs::kUnreachable);
    CHECK(graphs::shortest_distance(g, "a", "c", 1) == graphs::kUnreachable);
    CHECK_THROWS_AS(graphs::shortest_distance(g, "a", "zz"), not_found_error);
}

TEST_CASE("pagerank: directed 3-cycle is uniform") {
    graphs::DiGraph g;
    g.add_edge("A", "B");
    g.add_edge("B", "C");
    g.add_edge("C", "A");
    graphs::CentralityScores s = graphs::pagerank(g);
    for (const auto& id : {"A", "B", "C"}) {
        CHECK(s.at(id) == doctest::Approx(1.0 / 3).epsilon(1e-8));
    }
}

TEST_CASE("pagerank: edgeless graph is uniform 1/n") {
    graphs::DiGraph g;
    for (int i = 0; i < 4; ++i) g.add_node("n" + std::to_string(i));
    graphs::CentralityScores s = graphs::pagerank(g);
    for (const auto& n : g.nodes) CHECK(s.at(n) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("pagerank: two-node chain matches the dense stationary solve") {
    graphs::DiGraph g;
    g.add_edge("A", "B");
    graphs::CentralityScores s = graphs::pagerank(g);
    Eigen::VectorXd x = pagerank_dense(2, g.out_edges, 0.85);
    CHECK(std::abs(s.at("A") - x(g.index.at("A"))) < 1e-8);
    CHECK(std::abs(s.at("B") - x(g.index.at("B"))) < 1e-8);
    CHECK(s.at("B") > s.at("A"));
    CHECK(s.at("A") + s.at("B") == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pagerank: agrees with the dense oracle on random digraphs") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 10; ++trial) {
        graphs::DiGraph g = random_digraph(rng, 50);
        graphs::CentralityScores s = graphs::pagerank(g);
        Eigen::VectorXd x = pagerank_dense(static_cast<int>(g.nodes.size()), g.out_edges, 0.85);
        double sum = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            CHECK(std::abs(s.at(g.nodes[i]) - x(static_cast<int>(i))) < 1e-8);
            CHECK(s.at(g.nodes[i]) >= 0.0);
            sum += s.at(g.nodes[i]);
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("pagerank: invariant under node relabeling") {
    graphs::DiGraph g1, g2;
    g1.add_edge("A", "B");
    g1.add_edge("B", "C");
    g1.add_edge("A", "C");
    // Same edges, different insertion order.
    g2.add_node("C");
    g2.add_node("B");
    g2.add_edge("A", "C");
    g2.add_edge("A", "B");
    g2.add_edge("B", "C");
    graphs::CentralityScores s1 = graphs::pagerank(g1);
    graphs::CentralityScores s2 = graphs::pagerank(g2);
    for (const auto& id : {"A", "B", "C"}) {
        CHECK(s1.at(id) == doctest::Approx(s2.at(id)).epsilon(1e-10));
    }
}

TEST_CASE("pagerank: non-convergence is reported") {
    graphs::DiGraph g;
    g.add_edge("A", "B");
    graphs::PageRankOptions opts;
    opts.max_iter = 1;
    opts.tol = 1e-15;
    CHECK_THROWS_AS(graphs::pagerank(g, opts), non_convergence_error);
}

TEST_CASE("shortest_distance: triangle inequality on reachable triples") {
    corpus::Corpus c = fixtures::make_corpus({
        {"P1", 2000, {"a", "b"}, {}},
        {"P2", 2000, {"b", "c"}, {}},
        {"P3", 2000, {"c", "d"}, {}},
        {"P4", 2000, {"a", "e"}, {}},
    });
    graphs::CoAuthorGraph g = graphs::build_coauthorship_graph(c, 2000);
    std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
    for (const auto& x : ids) {
        for (const auto& y : ids) {
            for (const auto& z : ids) {
                int xy = graphs::shortest_distance(g, x, y);
                int yz = graphs::shortest_distance(g, y, z);
                int xz = graphs::shortest_distance(g, x, z);
                if (xy != graphs::kUnreachable && yz != graphs::kUnreachable) {
                    REQUIRE(xz != graphs::kUnreachable);
                    CHECK(xz <= xy + yz);
                }
            }
        }
    }
}
