#include "citeimpact/topics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "citeimpact/errors.hpp"

namespace citeimpact::topics {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> kStopwords = {
        "a",    "an",   "and",  "are",  "as",   "at",   "be",   "by",   "for", "from",
        "has",  "have", "in",   "is",   "it",   "its",  "of",   "on",   "or",  "that",
        "the",  "this", "to",   "was",  "we",   "were", "which", "with", "our", "these",
        "their", "they", "can",  "also", "such", "than", "then", "using", "used", "based"};
    return kStopwords;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            if (cur.size() >= 2 && !stopwords().count(cur)) tokens.push_back(cur);
            cur.clear();
        }
    }
    if (cur.size() >= 2 && !stopwords().count(cur)) tokens.push_back(cur);
    return tokens;
}

double TopicModel::phi(int word, int topic) const {
    double v = static_cast<double>(vocab.size());
    return (word_topic[word][topic] + beta) / (topic_total[topic] + v * beta);
}

int TopicModel::argmax_topic(const std::vector<double>& theta) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(theta.size()); ++k) {
        if (theta[k] > theta[best]) best = k;
    }
    return best;
}

std::vector<double> TopicModel::infer(const std::vector<std::string>& tokens) const {
    std::vector<int> words;
    for (const auto& t : tokens) {
        auto it = word_index.find(t);
        if (it != word_index.end()) words.push_back(it->second);
    }
    std::vector<double> theta(K, 1.0 / K);
    if (words.empty()) {
        return theta;
    }
    // Fixed-point fold-in against frozen word-topic counts; deterministic.
    std::vector<double> counts(K, 0.0);
    for (int pass = 0; pass < 50; ++pass) {
        std::fill(counts.begin(), counts.end(), 0.0);
        for (int w : words) {
            double norm = 0.0;
            std::vector<double> g(K);
            for (int k = 0; k < K; ++k) {
                g[k] = phi(w, k) * theta[k];
                norm += g[k];
            }
            for (int k = 0; k < K; ++k) counts[k] += g[k] / norm;
        }
        double denom = static_cast<double>(words.size()) + K * alpha;
        for (int k = 0; k < K; ++k) theta[k] = (counts[k] + alpha) / denom;
    }
    return theta;
}

std::vector<double> TopicModel::doc_distribution(const corpus::Corpus& c,
                                                 const std::string& paper_id) const {
    auto it = doc_theta.find(paper_id);
    if (it != doc_theta.end()) return it->second;
    const corpus::PaperRecord& p = c.paper(paper_id);
    return infer(tokenize(p.title + " " + p.abstract_text));
}

TopicModel fit_topic_model(const corpus::Corpus& c, const TopicModelOptions& opts) {
    if (opts.K < 1) throw std::invalid_argument("fit_topic_model: K must be >= 1");
    if (c.papers.empty()) throw std::invalid_argument("fit_topic_model: empty corpus");

    TopicModel m;
    m.K = opts.K;
    m.alpha = opts.alpha > 0 ? opts.alpha : 50.0 / opts.K;
    m.beta = opts.beta;
    m.seed = opts.seed;
    m.iterations = opts.iterations;
    m.cutoff_year = opts.cutoff_year;

    std::vector<std::vector<std::string>> raw_docs;
    for (const auto& p : c.papers) {
        if (p.year > opts.cutoff_year) continue;
        m.doc_ids.push_back(p.id);
        raw_docs.push_back(tokenize(p.title + " " + p.abstract_text));
    }
    if (raw_docs.empty()) throw std::invalid_argument("fit_topic_model: no documents at cutoff");

    // Vocabulary with document-frequency pruning, in first-seen order.
    std::unordered_map<std::string, int> doc_freq;
    for (const auto& doc : raw_docs) {
        std::set<std::string> uniq(doc.begin(), doc.end());
        for (const auto& w : uniq) ++doc_freq[w];
    }
    for (const auto& doc : raw_docs) {
        for (const auto& w : doc) {
            if (doc_freq[w] >= opts.min_doc_freq && m.word_index.count(w) == 0) {
                m.word_index.emplace(w, static_cast<int>(m.vocab.size()));
                m.vocab.push_back(w);
            }
        }
    }
    if (m.vocab.empty()) {
        throw std::invalid_argument("fit_topic_model: vocabulary empty after pruning");
    }

    std::vector<std::vector<int>> docs(raw_docs.size());
    for (std::size_t d = 0; d < raw_docs.size(); ++d) {
        for (const auto& w : raw_docs[d]) {
            auto it = m.word_index.find(w);
            if (it != m.word_index.end()) docs[d].push_back(it->second);
        }
    }

    const int K = m.K;
    const int V = static_cast<int>(m.vocab.size());
    m.word_topic.assign(V, std::vector<std::int32_t>(K, 0));
    m.topic_total.assign(K, 0);
    std::vector<std::vector<std::int32_t>> doc_topic(docs.size(), std::vector<std::int32_t>(K, 0));
    std::vector<std::vector<std::int16_t>> z(docs.size());

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (std::size_t d = 0; d < docs.size(); ++d) {
        z[d].resize(docs[d].size());
        for (std::size_t i = 0; i < docs[d].size(); ++i) {
            int k = static_cast<int>(rng() % static_cast<std::uint64_t>(K));
            z[d][i] = static_cast<std::int16_t>(k);
            ++m.word_topic[docs[d][i]][k];
            ++m.topic_total[k];
            ++doc_topic[d][k];
        }
    }

    std::vector<double> prob(K);
    const double vbeta = V * m.beta;
    for (int iter = 0; iter < opts.iterations; ++iter) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            for (std::size_t i = 0; i < docs[d].size(); ++i) {
                int w = docs[d][i];
                int old = z[d][i];
                --m.word_topic[w][old];
                --m.topic_total[old];
                --doc_topic[d][old];
                double total = 0.0;
                for (int k = 0; k < K; ++k) {
                    total += (doc_topic[d][k] + m.alpha) * (m.word_topic[w][k] + m.beta) /
                             (m.topic_total[k] + vbeta);
                    prob[k] = total;
                }
                double u = unif(rng) * total;
                int k_new = static_cast<int>(
                    std::lower_bound(prob.begin(), prob.end(), u) - prob.begin());
                if (k_new >= K) k_new = K - 1;
                z[d][i] = static_cast<std::int16_t>(k_new);
                ++m.word_topic[w][k_new];
                ++m.topic_total[k_new];
                ++doc_topic[d][k_new];
            }
        }
    }

    for (std::size_t d = 0; d < docs.size(); ++d) {
        std::vector<double> theta(K);
        double denom = static_cast<double>(docs[d].size()) + K * m.alpha;
        for (int k = 0; k < K; ++k) theta[k] = (doc_topic[d][k] + m.alpha) / denom;
        m.doc_theta.emplace(m.doc_ids[d], std::move(theta));
    }
    return m;
}

double entropy(const std::vector<double>& dist) {
    double h = 0.0;
    for (double p : dist) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'E', 'C', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_topic_model(const TopicModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw parse_error("cannot open for write: " + path);
    auto put = [&os](const auto& v) { os.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    auto put_str = [&](const std::string& s) {
        std::uint32_t n = static_cast<std::uint32_t>(s.size());
        put(n);
        os.write(s.data(), n);
    };
    os.write(kMagic, 4);
    put(kVersion);
    put(m.K);
    put(m.alpha);
    put(m.beta);
    put(m.seed);
    put(m.iterations);
    put(m.cutoff_year);
    std::uint32_t v = static_cast<std::uint32_t>(m.vocab.size());
    put(v);
    for (const auto& w : m.vocab) put_str(w);
    for (const auto& row : m.word_topic) {
        os.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(row.size() * sizeof(std::int32_t)));
    }
    os.write(reinterpret_cast<const char*>(m.topic_total.data()),
             static_cast<std::streamsize>(m.topic_total.size() * sizeof(std::int64_t)));
    std::uint32_t nd = static_cast<std::uint32_t>(m.doc_ids.size());
    put(nd);
    for (const auto& id : m.doc_ids) {
        put_str(id);
        const auto& theta = m.doc_theta.at(id);
        os.write(reinterpret_cast<const char*>(theta.data()),
                 static_cast<std::streamsize>(theta.size() * sizeof(double)));
    }
    if (!os) throw parse_error("write failed: " + path);
}

TopicModel load_topic_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw parse_error("cannot open topic model: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4)) {
        throw parse_error("bad topic model magic: " + path);
    }
    auto get = [&is](auto& v) { is.read(reinterpret_cast<char*>(&v), sizeof(v)); };
    std::uint32_t version = 0;
    get(version);
    if (version != kVersion) throw parse_error("unsupported topic model version");
    TopicModel m;
    get(m.K);
    get(m.alpha);
    get(m.beta);
    get(m.seed);
    get(m.iterations);
    get(m.cutoff_year);
    std::uint32_t v = 0;
    get(v);
    m.vocab.resize(v);
    for (auto& w : m.vocab) {
        std::uint32_t n = 0;
        get(n);
        w.resize(n);
        is.read(w.data(), n);
    }
    for (std::size_t i = 0; i < m.vocab.size(); ++i) m.word_index.emplace(m.vocab[i], (int)i);
    m.word_topic.assign(v, std::vector<std::int32_t>(m.K, 0));
    for (auto& row : m.word_topic) {
        is.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(std::int32_t)));
    }
    m.topic_total.assign(m.K, 0);
    is.read(reinterpret_cast<char*>(m.topic_total.data()),
            static_cast<std::streamsize>(m.topic_total.size() * sizeof(std::int64_t)));
    std::uint32_t nd = 0;
    get(nd);
    m.doc_ids.resize(nd);
    for (auto& id : m.doc_ids) {
        std::uint32_t n = 0;
        get(n);
        id.resize(n);
        is.read(id.data(), n);
        std::vector<double> theta(m.K);
        is.read(reinterpret_cast<char*>(theta.data()),
                static_cast<std::streamsize>(theta.size() * sizeof(double)));
        m.doc_theta.emplace(id, std::move(theta));
    }
    if (!is) throw parse_error("truncated topic model: " + path);
    return m;
}

}  // namespace citeimpact::topics
