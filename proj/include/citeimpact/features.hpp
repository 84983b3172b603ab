#ifndef CITEIMPACT_FEATURES_HPP
#define CITEIMPACT_FEATURES_HPP

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "citeimpact/corpus.hpp"
#include "citeimpact/earlyciters.hpp"
#include "citeimpact/graphs.hpp"
#include "citeimpact/topics.hpp"

namespace citeimpact::features {

// 20 features; the two past-influence features each carry their max and total
// variants as separate slots, giving 22 numeric slots.
enum Slot : int {
    ECPC = 0,
    ECCC,
    ECCA,
    ECC,
    PCN,
    PCTR,
    PCD,
    ACHI,
    ACAR,
    ACPI_MAX,
    ACPI_TOTAL,
    ACP,
    ACS,
    ACA,
    ACV,
    VCVR,
    VCVC,
    VCPI_MAX,
    VCPI_TOTAL,
    PR,
    CCAC,
    CCAW,
};

constexpr int kSlotCount = 22;

const std::array<std::string, kSlotCount>& slot_names();
int slot_by_name(const std::string& name);

// Slots readable at publication time (events with year <= T only).
std::vector<int> at_publication_slots();
// Slots that additionally read the early window (events with year <= T+delta).
std::vector<int> early_window_slots();

struct FeatureVector {
    std::array<double, kSlotCount> values{};
    std::string paper_id;
    int year = 0;        // T
    int delta = 0;
    int reference_year = 0;
};

int h_index(std::vector<int> citation_counts);

double kl_divergence_smoothed(const std::vector<std::string>& p_tokens,
                              const std::vector<std::string>& q_tokens);

struct ExtractorOptions {
    int delta = 2;
    int ca_cap = 6;
};

// Computes the full vector for candidate papers, caching the per-year graphs,
// centrality scores and rank tables that at-publication features share.
class FeatureExtractor {
public:
    FeatureExtractor(const corpus::Corpus& c, const topics::TopicModel& model,
                     const ec::InfluenceThresholds& thresholds, const ExtractorOptions& opts = {});
    ~FeatureExtractor();

    FeatureVector extract(const std::string& paper_id, int reference_year);

    // Individual groups, exposed for direct testing.
    void paper_features(const std::string& paper_id, int as_of, double* pcn, double* pctr,
                        double* pcd);
    void author_features(const std::string& paper_id, int as_of, double out[8]);
    void venue_features(const std::string& paper_id, int as_of, double out[4]);
    void context_features(const std::string& paper_id, int delta, double* ccac, double* ccaw);

    const graphs::CoAuthorGraph& coauthor_graph(int as_of);

private:
    struct YearCache;
    YearCache& cache_for(int as_of);

    const corpus::Corpus& corpus_;
    const topics::TopicModel& model_;
    ec::InfluenceThresholds thresholds_;
    ExtractorOptions opts_;
    std::map<int, std::unique_ptr<YearCache>> caches_;
    std::map<int, graphs::CoAuthorGraph> coauthor_graphs_;
};

double recency(int publication_year, int reference_year);

struct FeatureMatrix {
    std::vector<FeatureVector> rows;
};

void export_feature_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_feature_csv(const std::string& path);

}  // namespace citeimpact::features

#endif
