#include "citeimpact/earlyciters.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "citeimpact/errors.hpp"

namespace citeimpact::ec {

std::vector<std::string> early_citing_papers(const corpus::Corpus& c, const std::string& paper_id,
                                             int delta) {
    const corpus::PaperRecord& p = c.paper(paper_id);
    std::vector<std::string> out;
    auto it = c.in_citations.find(paper_id);
    if (it != c.in_citations.end()) {
        for (const auto& e : it->second) {
            if (e.year >= p.year && e.year <= p.year + delta) out.push_back(e.citing_id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

const std::vector<std::string>* authors_of_citer(const corpus::Corpus& c, const std::string& id) {
    if (const corpus::PaperRecord* p = c.find_paper(id)) return &p->authors;
    if (const corpus::CiterStub* s = c.citer_info(id)) return &s->authors;
    return nullptr;
}

int citer_year(const corpus::Corpus& c, const std::string& id) {
    if (const corpus::PaperRecord* p = c.find_paper(id)) return p->year;
    if (const corpus::CiterStub* s = c.citer_info(id)) return s->year;
    throw not_found_error("unknown citing paper " + id);
}

}  // namespace

std::set<std::string> early_citers(const corpus::Corpus& c, const std::string& paper_id,
                                   int delta) {
    std::set<std::string> out;
    for (const auto& cid : early_citing_papers(c, paper_id, delta)) {
        if (const auto* authors = authors_of_citer(c, cid)) {
            out.insert(authors->begin(), authors->end());
        }
    }
    return out;
}

AuthorSnapshot author_snapshot(const corpus::Corpus& c, const std::string& author_id, int as_of) {
    auto papers_it = c.author_papers.find(author_id);
    if (papers_it == c.author_papers.end() && c.author_names.count(author_id) == 0) {
        throw not_found_error("author_snapshot: unknown author " + author_id);
    }
    AuthorSnapshot snap;
    snap.author_id = author_id;
    snap.as_of = as_of;
    if (papers_it == c.author_papers.end()) return snap;
    for (std::size_t idx : papers_it->second) {
        const corpus::PaperRecord& p = c.papers[idx];
        if (p.year <= as_of - 1) ++snap.pub_count;
        auto cit_it = c.in_citations.find(p.id);
        if (cit_it == c.in_citations.end()) continue;
        for (const auto& e : cit_it->second) {
            if (e.year <= as_of - 1) ++snap.cit_count;
        }
    }
    return snap;
}

InfluenceThresholds fixed_thresholds() { return InfluenceThresholds{}; }

InfluenceThresholds influence_thresholds(const corpus::Corpus& c, double percentile) {
    if (c.papers.empty()) {
        throw std::invalid_argument("influence_thresholds: empty corpus");
    }
    std::vector<int> pubs, cits;
    for (const auto& [author, papers] : c.author_papers) {
        int pub = static_cast<int>(papers.size());
        int cit = 0;
        for (std::size_t idx : papers) {
            auto it = c.in_citations.find(c.papers[idx].id);
            if (it != c.in_citations.end()) cit += static_cast<int>(it->second.size());
        }
        pubs.push_back(pub);
        cits.push_back(cit);
    }
    std::sort(pubs.rbegin(), pubs.rend());
    std::sort(cits.rbegin(), cits.rend());
    // Smallest count still inside the top-percentile group.
    auto boundary = [&](const std::vector<int>& desc) {
        std::size_t k = static_cast<std::size_t>(percentile * static_cast<double>(desc.size()));
        if (k < 1) k = 1;
        if (k > desc.size()) k = desc.size();
        return desc[k - 1];
    };
    InfluenceThresholds t;
    t.percentile = percentile;
    t.pub_threshold = boundary(pubs);
    t.cit_threshold = boundary(cits);
    t.degenerate = !pubs.empty() && (pubs.front() == pubs.back() || cits.front() == cits.back());
    return t;
}

InfluenceClass classify(const AuthorSnapshot& snapshot, const InfluenceThresholds& thresholds) {
    bool influential = snapshot.pub_count >= thresholds.pub_threshold ||
                       snapshot.cit_count >= thresholds.cit_threshold;
    return influential ? InfluenceClass::INFLUENTIAL : InfluenceClass::NON_INFLUENTIAL;
}

namespace {

int ca_distance(const graphs::CoAuthorGraph& g, const std::string& citer_author,
                const std::vector<std::string>& paper_authors, int cap) {
    if (std::find(paper_authors.begin(), paper_authors.end(), citer_author) !=
        paper_authors.end()) {
        return 0;
    }
    if (g.index.count(citer_author) == 0) return graphs::kUnreachable;
    int best = graphs::kUnreachable;
    // Search outward from the cited paper's authors: their collaboration
    // neighborhoods are typically far smaller than a prolific citer's.
    for (const auto& pa : paper_authors) {
        if (g.index.count(pa) == 0) continue;
        int d = graphs::shortest_distance(g, pa, citer_author, cap);
        if (d != graphs::kUnreachable && (best == graphs::kUnreachable || d < best)) best = d;
        if (best == 1) break;
    }
    return best;
}

}  // namespace

ECAggregates ec_aggregates(const corpus::Corpus& c, const graphs::CoAuthorGraph& coauthors,
                           const std::string& paper_id, int delta,
                           const InfluenceThresholds& thresholds, const AggregateOptions& opts) {
    const corpus::PaperRecord& p = c.paper(paper_id);
    std::vector<std::string> citing = early_citing_papers(c, paper_id, delta);
    if (citing.empty()) {
        throw empty_window_error("ec_aggregates: no early citing papers for " + paper_id);
    }

    double pc_sum = 0.0, cc_sum = 0.0, ca_sum = 0.0;
    int n = 0;
    for (const auto& cid : citing) {
        const auto* authors = authors_of_citer(c, cid);
        if (authors == nullptr || authors->empty()) continue;
        int year = citer_year(c, cid);

        // Per-author values; ties resolved by lexicographically smallest id.
        std::vector<std::string> sorted_authors(authors->begin(), authors->end());
        std::sort(sorted_authors.begin(), sorted_authors.end());
        sorted_authors.erase(std::unique(sorted_authors.begin(), sorted_authors.end()),
                             sorted_authors.end());

        std::vector<int> pub_vals, cit_vals, ca_vals;
        for (const auto& a : sorted_authors) {
            AuthorSnapshot snap;
            try {
                snap = author_snapshot(c, a, year);
            } catch (const not_found_error&) {
                snap.author_id = a;
            }
            pub_vals.push_back(snap.pub_count);
            cit_vals.push_back(snap.cit_count);
            int d = ca_distance(coauthors, a, p.authors, opts.ca_cap);
            ca_vals.push_back(d == graphs::kUnreachable ? opts.ca_cap : d);
        }
        auto pick = [&](const std::vector<int>& vals, bool want_max) -> double {
            switch (opts.selector) {
                case RepSelector::MIN:
                    return *std::min_element(vals.begin(), vals.end());
                case RepSelector::AVG:
                    return std::accumulate(vals.begin(), vals.end(), 0.0) /
                           static_cast<double>(vals.size());
                case RepSelector::MEDIAN: {
                    std::vector<int> v = vals;
                    std::sort(v.begin(), v.end());
                    std::size_t m = v.size() / 2;
                    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
                }
                case RepSelector::DEFAULT:
                    break;
            }
            return want_max ? *std::max_element(vals.begin(), vals.end())
                            : *std::min_element(vals.begin(), vals.end());
        };
        pc_sum += pick(pub_vals, true);
        cc_sum += pick(cit_vals, true);
        ca_sum += pick(ca_vals, false);
        ++n;
    }
    if (n == 0) {
        throw empty_window_error("ec_aggregates: no citing papers with known authors for " +
                                 paper_id);
    }

    ECAggregates agg;
    agg.paper_id = paper_id;
    agg.year = p.year;
    agg.delta = delta;
    agg.ecc = static_cast<int>(citing.size());
    agg.pc = pc_sum / n;
    agg.cc = cc_sum / n;
    agg.ca = ca_sum / n;
    agg.influential_pc = agg.pc >= thresholds.pub_threshold;
    agg.influential_cc = agg.cc >= thresholds.cit_threshold;
    return agg;
}

int ecc(const corpus::Corpus& c, const std::string& paper_id, int delta) {
    const corpus::PaperRecord& p = c.paper(paper_id);
    return corpus::citations_in_window(c, paper_id, p.year, p.year + delta);
}

int ltsi(const corpus::Corpus& c, const std::string& paper_id, int big_delta) {
    const corpus::PaperRecord& p = c.paper(paper_id);
    int horizon = corpus::horizon(c);
    if (p.year + big_delta > horizon) {
        throw horizon_error("ltsi: window [" + std::to_string(p.year) + ", " +
                            std::to_string(p.year + big_delta) + "] exceeds corpus horizon " +
                            std::to_string(horizon));
    }
    return corpus::citations_in_window(c, paper_id, p.year, p.year + big_delta);
}

CaBucket ca_bucket(double ca) {
    if (ca < 0.0) throw std::invalid_argument("ca_bucket: negative distance");
    if (ca < 1.0) return CaBucket::BUCKET1;
    if (ca < 2.0) return CaBucket::BUCKET2;
    return CaBucket::BUCKET3;
}

std::string to_string(CaBucket b) {
    switch (b) {
        case CaBucket::BUCKET1:
            return "bucket1";
        case CaBucket::BUCKET2:
            return "bucket2";
        case CaBucket::BUCKET3:
            return "bucket3";
    }
    return "?";
}

void export_aggregates_csv(const std::vector<ECAggregates>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw parse_error("cannot open for write: " + path);
    os << "paper_id,year,delta,ecc,PC,CC,CA,bucket,influential_pc,influential_cc\n";
    for (const auto& r : rows) {
        os << r.paper_id << ',' << r.year << ',' << r.delta << ',' << r.ecc << ',' << r.pc << ','
           << r.cc << ',' << r.ca << ',' << to_string(ca_bucket(r.ca)) << ','
           << (r.influential_pc ? 1 : 0) << ',' << (r.influential_cc ? 1 : 0) << '\n';
    }
}

}  // namespace citeimpact::ec
