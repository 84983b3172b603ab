#include "citeimpact/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "citeimpact/errors.hpp"

namespace citeimpact::graphs {

int DiGraph::add_node(const std::string& id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    int i = static_cast<int>(nodes.size());
    index.emplace(id, i);
    nodes.push_back(id);
    out_edges.emplace_back();
    return i;
}

void DiGraph::add_edge(const std::string& src, const std::string& dst, double weight) {
    int s = add_node(src);
    int d = add_node(dst);
    for (auto& [t, w] : out_edges[s]) {
        if (t == d) {
            w += weight;
            return;
        }
    }
    out_edges[s].emplace_back(d, weight);
}

std::size_t DiGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& e : out_edges) n += e.size();
    return n;
}

int CoAuthorGraph::add_node(const std::string& id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    int i = static_cast<int>(nodes.size());
    index.emplace(id, i);
    nodes.push_back(id);
    adj.emplace_back();
    return i;
}

void CoAuthorGraph::add_edge(const std::string& a, const std::string& b) {
    if (a == b) return;
    int i = add_node(a);
    int j = add_node(b);
    if (std::find(adj[i].begin(), adj[i].end(), j) != adj[i].end()) return;
    adj[i].push_back(j);
    adj[j].push_back(i);
}

bool CoAuthorGraph::has_edge(const std::string& a, const std::string& b) const {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) return false;
    return std::find(adj[ia->second].begin(), adj[ia->second].end(), ib->second) !=
           adj[ia->second].end();
}

std::size_t CoAuthorGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& e : adj) n += e.size();
    return n / 2;
}

double CentralityScores::at(const std::string& id) const {
    auto it = score.find(id);
    return it == score.end() ? 0.0 : it->second;
}

DiGraph build_citation_graph(const corpus::Corpus& c) {
    DiGraph g;
    for (const auto& p : c.papers) g.add_node(p.id);
    for (const auto& p : c.papers) {
        for (const auto& ref : p.references) {
            if (c.has_paper(ref)) g.add_edge(p.id, ref);
        }
    }
    return g;
}

CoAuthorGraph build_coauthorship_graph(const corpus::Corpus& c, int as_of) {
    CoAuthorGraph g;
    g.as_of = as_of;
    // Collect index pairs and dedupe in one pass; per-edge membership scans
    // are quadratic on papers with long author lists.
    std::vector<std::pair<int, int>> pairs;
    for (const auto& p : c.papers) {
        if (p.year > as_of) continue;
        std::vector<int> ids;
        ids.reserve(p.authors.size());
        for (const auto& a : p.authors) ids.push_back(g.add_node(a));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                pairs.emplace_back(ids[i], ids[j]);
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& [i, j] : pairs) {
        g.adj[i].push_back(j);
        g.adj[j].push_back(i);
    }
    return g;
}

DiGraph build_venue_graph(const corpus::Corpus& c) {
    return build_venue_graph(c, std::numeric_limits<int>::max());
}

DiGraph build_venue_graph(const corpus::Corpus& c, int as_of) {
    DiGraph g;
    for (const auto& p : c.papers) {
        if (p.year <= as_of) g.add_node(p.venue);
    }
    for (const auto& p : c.papers) {
        if (p.year > as_of) continue;
        for (const auto& ref : p.references) {
            const corpus::PaperRecord* cited = c.find_paper(ref);
            if (cited != nullptr && cited->year <= as_of) {
                g.add_edge(p.venue, cited->venue);
            }
        }
    }
    return g;
}

int shortest_distance(const CoAuthorGraph& g, const std::string& a, const std::string& b,
                      int cap) {
    if (cap < 0) throw std::invalid_argument("shortest_distance: cap must be >= 0");
    auto ia = g.index.find(a);
    auto ib = g.index.find(b);
    if (ia == g.index.end()) throw not_found_error("shortest_distance: unknown author " + a);
    if (ib == g.index.end()) throw not_found_error("shortest_distance: unknown author " + b);
    if (ia->second == ib->second) return 0;
    if (cap == 0) return kUnreachable;

    std::vector<int> dist(g.nodes.size(), -1);
    std::deque<int> queue;
    dist[ia->second] = 0;
    queue.push_back(ia->second);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (dist[u] >= cap) break;
        for (int v : g.adj[u]) {
            if (dist[v] != -1) continue;
            dist[v] = dist[u] + 1;
            if (v == ib->second) return dist[v];
            queue.push_back(v);
        }
    }
    return kUnreachable;
}

std::vector<double> pagerank_scores(int n,
                                    const std::vector<std::vector<std::pair<int, double>>>& out_edges,
                                    const PageRankOptions& opts, int* iterations_out,
                                    bool* converged_out) {
    std::vector<double> x(n, 1.0 / n), next(n, 0.0);
    std::vector<double> out_weight(n, 0.0);
    for (int u = 0; u < n; ++u) {
        for (const auto& [v, w] : out_edges[u]) out_weight[u] += w;
    }
    const double d = opts.damping;
    int iter = 0;
    bool converged = false;
    for (; iter < opts.max_iter; ++iter) {
        double dangling = 0.0;
        for (int u = 0; u < n; ++u) {
            if (out_weight[u] == 0.0) dangling += x[u];
        }
        double base = (1.0 - d) / n + d * dangling / n;
        std::fill(next.begin(), next.end(), base);
        for (int u = 0; u < n; ++u) {
            if (out_weight[u] == 0.0) continue;
            double share = d * x[u] / out_weight[u];
            for (const auto& [v, w] : out_edges[u]) next[v] += share * w;
        }
        double l1 = 0.0;
        for (int i = 0; i < n; ++i) l1 += std::abs(next[i] - x[i]);
        x.swap(next);
        if (l1 <= opts.tol) {
            ++iter;
            converged = true;
            break;
        }
    }
    if (iterations_out) *iterations_out = iter;
    if (converged_out) *converged_out = converged;
    return x;
}

namespace {

CentralityScores finish(const std::vector<std::string>& nodes, std::vector<double> x,
                        const PageRankOptions& opts, int iters, bool converged) {
    if (!converged) {
        throw non_convergence_error("pagerank: not converged after " +
                                    std::to_string(opts.max_iter) + " iterations");
    }
    CentralityScores s;
    s.damping = opts.damping;
    s.tolerance = opts.tol;
    s.iterations = iters;
    s.converged = converged;
    for (std::size_t i = 0; i < nodes.size(); ++i) s.score.emplace(nodes[i], x[i]);
    return s;
}

}  // namespace

CentralityScores pagerank(const DiGraph& g, const PageRankOptions& opts) {
    if (g.nodes.empty()) throw std::invalid_argument("pagerank: empty graph");
    int iters = 0;
    bool converged = false;
    auto x = pagerank_scores(static_cast<int>(g.nodes.size()), g.out_edges, opts, &iters,
                             &converged);
    return finish(g.nodes, std::move(x), opts, iters, converged);
}

CentralityScores pagerank(const CoAuthorGraph& g, const PageRankOptions& opts) {
    if (g.nodes.empty()) throw std::invalid_argument("pagerank: empty graph");
    std::vector<std::vector<std::pair<int, double>>> out(g.nodes.size());
    for (std::size_t u = 0; u < g.adj.size(); ++u) {
        for (int v : g.adj[u]) out[u].emplace_back(v, 1.0);
    }
    int iters = 0;
    bool converged = false;
    auto x = pagerank_scores(static_cast<int>(g.nodes.size()), out, opts, &iters, &converged);
    return finish(g.nodes, std::move(x), opts, iters, converged);
}

void export_edge_list(const DiGraph& g, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw parse_error("cannot open for write: " + path);
    for (std::size_t u = 0; u < g.out_edges.size(); ++u) {
        // Sorted for reproducible bytes.
        auto edges = g.out_edges[u];
        std::sort(edges.begin(), edges.end());
        for (const auto& [v, w] : edges) {
            os << g.nodes[u] << ' ' << g.nodes[v] << ' ' << w << '\n';
        }
    }
}

void export_edge_list(const CoAuthorGraph& g, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw parse_error("cannot open for write: " + path);
    for (std::size_t u = 0; u < g.adj.size(); ++u) {
        auto adj = g.adj[u];
        std::sort(adj.begin(), adj.end());
        for (int v : adj) {
            if (static_cast<int>(u) < v) os << g.nodes[u] << ' ' << g.nodes[v] << '\n';
        }
    }
}

}  // namespace citeimpact::graphs
