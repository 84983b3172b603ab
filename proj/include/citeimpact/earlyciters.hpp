#ifndef CITEIMPACT_EARLYCITERS_HPP
#define CITEIMPACT_EARLYCITERS_HPP

#include <set>
#include <string>
#include <vector>

#include "citeimpact/corpus.hpp"
#include "citeimpact/graphs.hpp"

namespace citeimpact::ec {

struct AuthorSnapshot {
    std::string author_id;
    int as_of = 0;
    int pub_count = 0;  // papers with year <= as_of - 1
    int cit_count = 0;  // citations to those papers arriving in years <= as_of - 1
};

struct InfluenceThresholds {
    int pub_threshold = 21;
    int cit_threshold = 250;
    double percentile = 0.05;
    bool degenerate = false;  // all-ties quantile boundary
};

enum class InfluenceClass { INFLUENTIAL, NON_INFLUENTIAL };

enum class CaBucket { BUCKET1, BUCKET2, BUCKET3 };

struct ECAggregates {
    std::string paper_id;
    int year = 0;
    int delta = 0;
    int ecc = 0;
    double pc = 0.0;  // mean over citing papers of max author publication count
    double cc = 0.0;  // mean over citing papers of max author citation count
    double ca = 0.0;  // mean over citing papers of min co-authorship distance
    bool influential_pc = false;
    bool influential_cc = false;
};

// Representative-author selection variants; defaults follow the aggregates
// above (max PC, max CC, min CA).
enum class RepSelector { DEFAULT, MIN, AVG, MEDIAN };

std::vector<std::string> early_citing_papers(const corpus::Corpus& c, const std::string& paper_id,
                                             int delta);

std::set<std::string> early_citers(const corpus::Corpus& c, const std::string& paper_id,
                                   int delta);

AuthorSnapshot author_snapshot(const corpus::Corpus& c, const std::string& author_id, int as_of);

// Fixed-mode thresholds are the defaults; percentile mode recomputes the top
// quantile boundaries from the corpus at hand.
InfluenceThresholds influence_thresholds(const corpus::Corpus& c, double percentile = 0.05);
InfluenceThresholds fixed_thresholds();

InfluenceClass classify(const AuthorSnapshot& snapshot, const InfluenceThresholds& thresholds);

struct AggregateOptions {
    int ca_cap = 6;  // unreachable pairs contribute this distance
    RepSelector selector = RepSelector::DEFAULT;
};

ECAggregates ec_aggregates(const corpus::Corpus& c, const graphs::CoAuthorGraph& coauthors,
                           const std::string& paper_id, int delta,
                           const InfluenceThresholds& thresholds,
                           const AggregateOptions& opts = {});

int ecc(const corpus::Corpus& c, const std::string& paper_id, int delta);

int ltsi(const corpus::Corpus& c, const std::string& paper_id, int big_delta);

CaBucket ca_bucket(double ca);

std::string to_string(CaBucket b);

void export_aggregates_csv(const std::vector<ECAggregates>& rows, const std::string& path);

}  // namespace citeimpact::ec

#endif
