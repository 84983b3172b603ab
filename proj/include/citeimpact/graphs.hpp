#ifndef CITEIMPACT_GRAPHS_HPP
#define CITEIMPACT_GRAPHS_HPP

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citeimpact/corpus.hpp"

namespace citeimpact::graphs {

// Directed graph over string ids with weighted edges (weight = multiplicity
// for the venue graph, 1 elsewhere).
struct DiGraph {
    std::vector<std::string> nodes;
    std::unordered_map<std::string, int> index;
    std::vector<std::vector<std::pair<int, double>>> out_edges;

    int add_node(const std::string& id);
    void add_edge(const std::string& src, const std::string& dst, double weight = 1.0);
    std::size_t edge_count() const;
};

struct CoAuthorGraph {
    std::vector<std::string> nodes;
    std::unordered_map<std::string, int> index;
    std::vector<std::vector<int>> adj;  // symmetric, no self-edges
    int as_of = 0;

    int add_node(const std::string& id);
    void add_edge(const std::string& a, const std::string& b);
    bool has_edge(const std::string& a, const std::string& b) const;
    std::size_t edge_count() const;
};

struct CentralityScores {
    std::unordered_map<std::string, double> score;
    double damping = 0.85;
    double tolerance = 1e-10;
    int iterations = 0;
    bool converged = false;

    double at(const std::string& id) const;
};

constexpr int kUnreachable = -1;

DiGraph build_citation_graph(const corpus::Corpus& c);

// Time-sliced collaboration graph: an edge means the two authors share at
// least one paper with year <= as_of.
CoAuthorGraph build_coauthorship_graph(const corpus::Corpus& c, int as_of);

// Venue digraph; edge weight counts paper-level citations between the venues.
// Self-loops (within-venue citations) are kept.
DiGraph build_venue_graph(const corpus::Corpus& c);
DiGraph build_venue_graph(const corpus::Corpus& c, int as_of);

// Hop distance by BFS, capped; kUnreachable if no path of length <= cap.
int shortest_distance(const CoAuthorGraph& g, const std::string& a, const std::string& b,
                      int cap = 6);

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-10;
    int max_iter = 200;
};

CentralityScores pagerank(const DiGraph& g, const PageRankOptions& opts = {});
CentralityScores pagerank(const CoAuthorGraph& g, const PageRankOptions& opts = {});

// Core iteration over an index-based adjacency; exposed so callers working in
// index space can avoid the id maps.
std::vector<double> pagerank_scores(int n, const std::vector<std::vector<std::pair<int, double>>>& out_edges,
                                    const PageRankOptions& opts, int* iterations_out,
                                    bool* converged_out);

void export_edge_list(const DiGraph& g, const std::string& path);
void export_edge_list(const CoAuthorGraph& g, const std::string& path);

}  // namespace citeimpact::graphs

#endif
