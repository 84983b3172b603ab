#include "citeimpact/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "citeimpact/errors.hpp"

namespace citeimpact::features {

const std::array<std::string, kSlotCount>& slot_names() {
    static const std::array<std::string, kSlotCount> kNames = {
        "ECPC", "ECCC", "ECCA",     "ECC",        "PCN",  "PCTR", "PCD",     "ACHI",
        "ACAR", "ACPI_max", "ACPI_total", "ACP",  "ACS",  "ACA",  "ACV",     "VCVR",
        "VCVC", "VCPI_max", "VCPI_total", "PR",   "CCAC", "CCAW"};
    return kNames;
}

int slot_by_name(const std::string& name) {
    const auto& names = slot_names();
    for (int i = 0; i < kSlotCount; ++i) {
        if (names[i] == name) return i;
    }
    throw std::invalid_argument("unknown feature slot: " + name);
}

std::vector<int> at_publication_slots() {
    return {PCN, PCTR, PCD,  ACHI, ACAR, ACPI_MAX, ACPI_TOTAL, ACP,
            ACS, ACA,  ACV,  VCVR, VCVC, VCPI_MAX, VCPI_TOTAL, PR};
}

std::vector<int> early_window_slots() { return {ECPC, ECCC, ECCA, ECC, CCAC, CCAW}; }

int h_index(std::vector<int> citation_counts) {
    std::sort(citation_counts.rbegin(), citation_counts.rend());
    int h = 0;
    for (std::size_t i = 0; i < citation_counts.size(); ++i) {
        if (citation_counts[i] >= static_cast<int>(i) + 1) {
            h = static_cast<int>(i) + 1;
        } else {
            break;
        }
    }
    return h;
}

double kl_divergence_smoothed(const std::vector<std::string>& p_tokens,
                              const std::vector<std::string>& q_tokens) {
    constexpr double kEps = 1e-9;
    std::vector<std::string> vocab;
    std::unordered_map<std::string, int> index;
    auto intern = [&](const std::string& w) {
        auto it = index.find(w);
        if (it != index.end()) return it->second;
        int i = static_cast<int>(vocab.size());
        index.emplace(w, i);
        vocab.push_back(w);
        return i;
    };
    std::vector<double> pc, qc;
    for (const auto& w : p_tokens) {
        int i = intern(w);
        if (i >= static_cast<int>(pc.size())) pc.resize(i + 1, 0.0);
        pc[i] += 1.0;
    }
    for (const auto& w : q_tokens) {
        int i = intern(w);
        if (i >= static_cast<int>(qc.size())) qc.resize(i + 1, 0.0);
        qc[i] += 1.0;
    }
    std::size_t v = vocab.size();
    if (v == 0) return 0.0;
    pc.resize(v, 0.0);
    qc.resize(v, 0.0);
    double pn = std::accumulate(pc.begin(), pc.end(), 0.0) + kEps * static_cast<double>(v);
    double qn = std::accumulate(qc.begin(), qc.end(), 0.0) + kEps * static_cast<double>(v);
    double kl = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
        double p = (pc[i] + kEps) / pn;
        double q = (qc[i] + kEps) / qn;
        kl += p * std::log(p / q);
    }
    return kl;
}

double recency(int publication_year, int reference_year) {
    if (reference_year < publication_year) {
        throw std::invalid_argument("recency: reference year precedes publication");
    }
    return static_cast<double>(reference_year - publication_year);
}

namespace {

// Dense rank (1 = best) normalized to (0,1].
std::unordered_map<std::string, double> normalized_ranks(
    const std::vector<std::pair<std::string, double>>& counts) {
    std::unordered_map<std::string, double> out;
    if (counts.empty()) return out;
    std::vector<double> distinct;
    distinct.reserve(counts.size());
    for (const auto& [id, v] : counts) distinct.push_back(v);
    std::sort(distinct.rbegin(), distinct.rend());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    double d = static_cast<double>(distinct.size());
    for (const auto& [id, v] : counts) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), v, std::greater<double>());
        double rank = static_cast<double>(it - distinct.begin()) + 1.0;
        out[id] = (d - rank + 1.0) / d;
    }
    return out;
}

}  // namespace

struct FeatureExtractor::YearCache {
    int as_of = 0;

    // Author history at as_of: papers with year <= as_of-1 and citations
    // arriving in years <= as_of-1.
    std::unordered_map<std::string, int> pub_count;
    std::unordered_map<std::string, int> cit_count;
    std::unordered_map<std::string, std::vector<int>> per_paper_cits;
    std::unordered_map<std::string, double> acar;
    std::unordered_map<std::string, double> sociality;
    std::unordered_map<std::string, double> authority;
    std::unordered_map<std::string, double> versatility;  // filled on demand

    std::unordered_map<std::string, double> venue_rank;
    std::unordered_map<std::string, double> venue_centrality;
    std::unordered_map<std::string, double> venue_max_cits;
    std::unordered_map<std::string, double> venue_total_cits;

    std::vector<double> topic_rank_norm;
    double median_pcn = 0.0;
};

FeatureExtractor::FeatureExtractor(const corpus::Corpus& c, const topics::TopicModel& model,
                                   const ec::InfluenceThresholds& thresholds,
                                   const ExtractorOptions& opts)
    : corpus_(c), model_(model), thresholds_(thresholds), opts_(opts) {}

FeatureExtractor::~FeatureExtractor() = default;

const graphs::CoAuthorGraph& FeatureExtractor::coauthor_graph(int as_of) {
    auto it = coauthor_graphs_.find(as_of);
    if (it == coauthor_graphs_.end()) {
        it = coauthor_graphs_.emplace(as_of, graphs::build_coauthorship_graph(corpus_, as_of))
                 .first;
    }
    return it->second;
}

FeatureExtractor::YearCache& FeatureExtractor::cache_for(int as_of) {
    auto found = caches_.find(as_of);
    if (found != caches_.end()) return *found->second;

    auto cache = std::make_unique<YearCache>();
    YearCache& yc = *cache;
    yc.as_of = as_of;

    auto arrivals_until = [&](const std::string& paper_id, int last_year) {
        auto it = corpus_.in_citations.find(paper_id);
        if (it == corpus_.in_citations.end()) return 0;
        int n = 0;
        for (const auto& e : it->second) {
            if (e.year <= last_year) ++n;
        }
        return n;
    };

    for (const auto& p : corpus_.papers) {
        if (p.year > as_of - 1) continue;
        int cits = arrivals_until(p.id, as_of - 1);
        for (const auto& a : p.authors) {
            ++yc.pub_count[a];
            yc.cit_count[a] += cits;
            yc.per_paper_cits[a].push_back(cits);
        }
    }

    {
        // Rank population: every author with at least one paper before as_of.
        std::vector<std::string> seen;
        for (const auto& p : corpus_.papers) {
            if (p.year > as_of - 1) continue;
            for (const auto& a : p.authors) seen.push_back(a);
        }
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        std::vector<std::pair<std::string, double>> counts;
        counts.reserve(seen.size());
        for (const auto& a : seen) counts.emplace_back(a, yc.cit_count[a]);
        yc.acar = normalized_ranks(counts);
    }

    {
        const graphs::CoAuthorGraph& g = coauthor_graph(as_of);
        if (!g.nodes.empty()) {
            graphs::CentralityScores s = graphs::pagerank(g);
            yc.sociality = std::move(s.score);
        }
    }

    {
        // Citation graph over papers published by as_of; paper authority is
        // its PageRank mass, transmitted to each of its authors.
        std::vector<int> node_of(corpus_.papers.size(), -1);
        std::vector<std::size_t> paper_of;
        for (std::size_t i = 0; i < corpus_.papers.size(); ++i) {
            if (corpus_.papers[i].year <= as_of) {
                node_of[i] = static_cast<int>(paper_of.size());
                paper_of.push_back(i);
            }
        }
        int n = static_cast<int>(paper_of.size());
        if (n > 0) {
            std::vector<std::vector<std::pair<int, double>>> out(n);
            for (int u = 0; u < n; ++u) {
                const corpus::PaperRecord& p = corpus_.papers[paper_of[u]];
                for (const auto& ref : p.references) {
                    auto it = corpus_.paper_index.find(ref);
                    if (it == corpus_.paper_index.end()) continue;
                    int v = node_of[it->second];
                    if (v >= 0) out[u].emplace_back(v, 1.0);
                }
            }
            auto scores = graphs::pagerank_scores(n, out, graphs::PageRankOptions{}, nullptr,
                                                  nullptr);
            for (int u = 0; u < n; ++u) {
                const corpus::PaperRecord& p = corpus_.papers[paper_of[u]];
                for (const auto& a : p.authors) yc.authority[a] += scores[u];
            }
        }
    }

    {
        std::vector<std::pair<std::string, double>> venue_counts;
        std::vector<std::string> venue_order;
        for (const auto& p : corpus_.papers) {
            if (p.year > as_of - 1) continue;
            double cits = arrivals_until(p.id, as_of - 1);
            if (yc.venue_total_cits.count(p.venue) == 0) venue_order.push_back(p.venue);
            yc.venue_total_cits[p.venue] += cits;
            auto& mx = yc.venue_max_cits[p.venue];
            mx = std::max(mx, cits);
        }
        venue_counts.reserve(venue_order.size());
        for (const auto& v : venue_order) venue_counts.emplace_back(v, yc.venue_total_cits[v]);
        yc.venue_rank = normalized_ranks(venue_counts);

        graphs::DiGraph vg = graphs::build_venue_graph(corpus_, as_of);
        if (!vg.nodes.empty()) {
            graphs::CentralityScores s = graphs::pagerank(vg);
            yc.venue_centrality = std::move(s.score);
        }
    }

    {
        std::vector<double> topic_sum(model_.K, 0.0);
        std::vector<int> topic_docs(model_.K, 0);
        for (const auto& id : model_.doc_ids) {
            int k = topics::TopicModel::argmax_topic(model_.doc_theta.at(id));
            topic_sum[k] += arrivals_until(id, as_of - 1);
            ++topic_docs[k];
        }
        std::vector<std::pair<std::string, double>> rows;
        for (int k = 0; k < model_.K; ++k) {
            double mean = topic_docs[k] > 0 ? topic_sum[k] / topic_docs[k] : 0.0;
            rows.emplace_back(std::to_string(k), mean);
        }
        auto ranks = normalized_ranks(rows);
        yc.topic_rank_norm.resize(model_.K, 0.0);
        for (int k = 0; k < model_.K; ++k) yc.topic_rank_norm[k] = ranks[std::to_string(k)];
    }

    {
        std::vector<double> novelties;
        for (const auto& p : corpus_.papers) {
            if (p.year > as_of) continue;
            std::vector<std::string> pooled;
            for (const auto& ref : p.references) {
                const corpus::PaperRecord* r = corpus_.find_paper(ref);
                if (r == nullptr) continue;
                auto toks = topics::tokenize(r->title + " " + r->abstract_text);
                pooled.insert(pooled.end(), toks.begin(), toks.end());
            }
            if (pooled.empty()) continue;
            novelties.push_back(kl_divergence_smoothed(
                topics::tokenize(p.title + " " + p.abstract_text), pooled));
        }
        if (!novelties.empty()) {
            std::sort(novelties.begin(), novelties.end());
            std::size_t m = novelties.size() / 2;
            yc.median_pcn = novelties.size() % 2 ? novelties[m]
                                                 : (novelties[m - 1] + novelties[m]) / 2.0;
        }
    }

    YearCache& ref = *cache;
    caches_.emplace(as_of, std::move(cache));
    return ref;
}

void FeatureExtractor::paper_features(const std::string& paper_id, int as_of, double* pcn,
                                      double* pctr, double* pcd) {
    const corpus::PaperRecord& p = corpus_.paper(paper_id);
    YearCache& yc = cache_for(as_of);

    std::vector<std::string> pooled;
    for (const auto& ref : p.references) {
        const corpus::PaperRecord* r = corpus_.find_paper(ref);
        if (r == nullptr) continue;
        auto toks = topics::tokenize(r->title + " " + r->abstract_text);
        pooled.insert(pooled.end(), toks.begin(), toks.end());
    }
    if (pooled.empty()) {
        *pcn = yc.median_pcn;
    } else {
        *pcn = kl_divergence_smoothed(topics::tokenize(p.title + " " + p.abstract_text), pooled);
    }

    std::vector<double> theta = model_.doc_distribution(corpus_, paper_id);
    int k = topics::TopicModel::argmax_topic(theta);
    *pctr = yc.topic_rank_norm.empty() ? 0.0 : yc.topic_rank_norm[k];
    *pcd = topics::entropy(theta);
}

void FeatureExtractor::author_features(const std::string& paper_id, int as_of, double out[8]) {
    const corpus::PaperRecord& p = corpus_.paper(paper_id);
    YearCache& yc = cache_for(as_of);

    double achi = 0, acar = 0, acpi_max = 0, acpi_total = 0, acp = 0, acs = 0, aca = 0, acv = 0;
    for (const auto& a : p.authors) {
        auto per_it = yc.per_paper_cits.find(a);
        if (per_it != yc.per_paper_cits.end()) {
            achi = std::max(achi, static_cast<double>(h_index(per_it->second)));
            acpi_max = std::max(acpi_max, static_cast<double>(*std::max_element(
                                              per_it->second.begin(), per_it->second.end())));
            acpi_total = std::max(acpi_total, static_cast<double>(yc.cit_count[a]));
            acp = std::max(acp, static_cast<double>(yc.pub_count[a]));
        }
        auto r = yc.acar.find(a);
        if (r != yc.acar.end()) acar = std::max(acar, r->second);
        auto s = yc.sociality.find(a);
        if (s != yc.sociality.end()) acs = std::max(acs, s->second);
        auto t = yc.authority.find(a);
        if (t != yc.authority.end()) aca = std::max(aca, t->second);

        auto v = yc.versatility.find(a);
        if (v == yc.versatility.end()) {
            double ent = 0.0;
            auto papers_it = corpus_.author_papers.find(a);
            if (papers_it != corpus_.author_papers.end()) {
                std::vector<double> mean(model_.K, 0.0);
                int n = 0;
                for (std::size_t idx : papers_it->second) {
                    const corpus::PaperRecord& q = corpus_.papers[idx];
                    if (q.year > as_of - 1) continue;
                    std::vector<double> theta = model_.doc_distribution(corpus_, q.id);
                    for (int k = 0; k < model_.K; ++k) mean[k] += theta[k];
                    ++n;
                }
                if (n > 0) {
                    for (auto& x : mean) x /= n;
                    ent = topics::entropy(mean);
                }
            }
            v = yc.versatility.emplace(a, ent).first;
        }
        acv = std::max(acv, v->second);
    }
    out[0] = achi;
    out[1] = acar;
    out[2] = acpi_max;
    out[3] = acpi_total;
    out[4] = acp;
    out[5] = acs;
    out[6] = aca;
    out[7] = acv;
}

void FeatureExtractor::venue_features(const std::string& paper_id, int as_of, double out[4]) {
    const corpus::PaperRecord& p = corpus_.paper(paper_id);
    YearCache& yc = cache_for(as_of);
    auto get = [](const std::unordered_map<std::string, double>& m, const std::string& k) {
        auto it = m.find(k);
        return it == m.end() ? 0.0 : it->second;
    };
    out[0] = get(yc.venue_rank, p.venue);
    out[1] = get(yc.venue_centrality, p.venue);
    out[2] = get(yc.venue_max_cits, p.venue);
    out[3] = get(yc.venue_total_cits, p.venue);
}

void FeatureExtractor::context_features(const std::string& paper_id, int delta, double* ccac,
                                        double* ccaw) {
    auto citing = ec::early_citing_papers(corpus_, paper_id, delta);
    if (citing.empty()) {
        *ccac = 1.0;
        *ccaw = 0.0;
        return;
    }
    double cx = 0.0, cw = 0.0;
    for (const auto& cid : citing) {
        auto it = corpus_.contexts.find({cid, paper_id});
        if (it != corpus_.contexts.end()) {
            cx += it->second.count_x;
            cw += it->second.cite_words;
        } else {
            cx += 1.0;  // imputation for a missing context record
        }
    }
    *ccac = cx / static_cast<double>(citing.size());
    *ccaw = cw / static_cast<double>(citing.size());
}

FeatureVector FeatureExtractor::extract(const std::string& paper_id, int reference_year) {
    const corpus::PaperRecord& p = corpus_.paper(paper_id);
    const int T = p.year;
    // Papers newer than the reference point get zero age rather than a
    // negative one, so one reference year can serve a mixed-year batch.
    reference_year = std::max(reference_year, T);
    FeatureVector fv;
    fv.paper_id = paper_id;
    fv.year = T;
    fv.delta = opts_.delta;
    fv.reference_year = reference_year;
    auto& v = fv.values;

    ec::AggregateOptions agg_opts;
    agg_opts.ca_cap = opts_.ca_cap;
    ec::ECAggregates agg = ec::ec_aggregates(corpus_, coauthor_graph(T + opts_.delta), paper_id,
                                             opts_.delta, thresholds_, agg_opts);
    v[ECPC] = agg.pc;
    v[ECCC] = agg.cc;
    v[ECCA] = agg.ca;
    // The early-citation count keeps its conventional two-year window even
    // when the EC features use a different delta.
    v[ECC] = static_cast<double>(ec::ecc(corpus_, paper_id, 2));

    paper_features(paper_id, T, &v[PCN], &v[PCTR], &v[PCD]);

    double author_out[8];
    author_features(paper_id, T, author_out);
    v[ACHI] = author_out[0];
    v[ACAR] = author_out[1];
    v[ACPI_MAX] = author_out[2];
    v[ACPI_TOTAL] = author_out[3];
    v[ACP] = author_out[4];
    v[ACS] = author_out[5];
    v[ACA] = author_out[6];
    v[ACV] = author_out[7];

    double venue_out[4];
    venue_features(paper_id, T, venue_out);
    v[VCVR] = venue_out[0];
    v[VCVC] = venue_out[1];
    v[VCPI_MAX] = venue_out[2];
    v[VCPI_TOTAL] = venue_out[3];

    v[PR] = recency(T, reference_year);
    context_features(paper_id, opts_.delta, &v[CCAC], &v[CCAW]);
    return fv;
}

void export_feature_csv(const FeatureMatrix& m, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw parse_error("cannot open for write: " + path);
    os << "paper_id,year,delta,reference_year";
    for (const auto& name : slot_names()) os << ',' << name;
    os << '\n';
    char buf[32];
    for (const auto& fv : m.rows) {
        os << fv.paper_id << ',' << fv.year << ',' << fv.delta << ',' << fv.reference_year;
        for (double x : fv.values) {
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            os << ',' << buf;
        }
        os << '\n';
    }
}

FeatureMatrix load_feature_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open feature csv: " + path);
    FeatureMatrix m;
    std::string line;
    if (!std::getline(is, line)) throw parse_error("empty feature csv: " + path);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        FeatureVector fv;
        std::getline(ss, fv.paper_id, ',');
        std::getline(ss, field, ',');
        fv.year = std::stoi(field);
        std::getline(ss, field, ',');
        fv.delta = std::stoi(field);
        std::getline(ss, field, ',');
        fv.reference_year = std::stoi(field);
        for (int i = 0; i < kSlotCount; ++i) {
            if (!std::getline(ss, field, ',')) {
                throw parse_error("short feature row in " + path);
            }
            fv.values[i] = std::stod(field);
        }
        m.rows.push_back(std::move(fv));
    }
    return m;
}

}  // namespace citeimpact::features
