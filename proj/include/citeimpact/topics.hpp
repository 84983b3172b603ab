#ifndef CITEIMPACT_TOPICS_HPP
#define CITEIMPACT_TOPICS_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "citeimpact/corpus.hpp"

namespace citeimpact::topics {

std::vector<std::string> tokenize(const std::string& text);

struct TopicModelOptions {
    int K = 50;
    int iterations = 500;
    double alpha = -1.0;  // defaults to 50 / K
    double beta = 0.01;
    std::uint64_t seed = 1;
    int min_doc_freq = 5;
    int cutoff_year = std::numeric_limits<int>::max();  // fit on papers with year <= cutoff
};

// Collapsed-Gibbs LDA over title+abstract tokens. Fitting is single-threaded
// and bit-reproducible for a given seed.
class TopicModel {
public:
    int K = 0;
    double alpha = 1.0;
    double beta = 0.01;
    std::uint64_t seed = 1;
    int iterations = 0;
    int cutoff_year = 0;

    std::vector<std::string> vocab;
    std::unordered_map<std::string, int> word_index;
    std::vector<std::vector<std::int32_t>> word_topic;  // V x K
    std::vector<std::int64_t> topic_total;              // K

    std::vector<std::string> doc_ids;  // training docs, corpus order
    std::unordered_map<std::string, std::vector<double>> doc_theta;

    // Topic mixture for any token sequence; training docs return the sampled
    // mixture, anything else is folded in against the fixed word-topic counts.
    std::vector<double> doc_distribution(const corpus::Corpus& c, const std::string& paper_id) const;
    std::vector<double> infer(const std::vector<std::string>& tokens) const;

    double phi(int word, int topic) const;
    static int argmax_topic(const std::vector<double>& theta);
};

TopicModel fit_topic_model(const corpus::Corpus& c, const TopicModelOptions& opts);

void save_topic_model(const TopicModel& m, const std::string& path);
TopicModel load_topic_model(const std::string& path);

double entropy(const std::vector<double>& dist);

}  // namespace citeimpact::topics

#endif
