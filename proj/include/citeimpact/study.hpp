#ifndef CITEIMPACT_STUDY_HPP
#define CITEIMPACT_STUDY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "citeimpact/corpus.hpp"
#include "citeimpact/earlyciters.hpp"
#include "citeimpact/features.hpp"
#include "citeimpact/models.hpp"

namespace citeimpact::study {

enum class EcProperty { PC, CC };

std::string to_string(EcProperty p);
EcProperty ec_property_from_string(const std::string& s);

struct CorrelationRow {
    int delta_t = 0;
    bool influential = false;
    int bucket = -1;  // -1: unbucketed table
    double rho = 0.0;
    std::int64_t n = 0;
    bool insufficient = false;  // fewer than 3 papers
    bool undefined = false;     // zero-variance input
};

struct CorrelationTable {
    EcProperty property = EcProperty::PC;
    std::vector<CorrelationRow> rows;
};

CorrelationTable correlation_study(const corpus::Corpus& c, EcProperty property,
                                   const ec::InfluenceThresholds& thresholds,
                                   const std::vector<int>& delta_t_list = {5, 8, 10, 12, 15},
                                   int delta = 2);

CorrelationTable bucketed_correlation_study(const corpus::Corpus& c, EcProperty property,
                                            const ec::InfluenceThresholds& thresholds,
                                            const std::vector<int>& delta_t_list = {5, 8, 10, 12},
                                            int delta = 2);

struct ExamplePair {
    std::string low_id;   // property below threshold
    std::string high_id;  // property at or above threshold
    int ecc = 0;
    double low_property = 0.0;
    double high_property = 0.0;
    int low_ltsi = 0;
    int high_ltsi = 0;
    int ltsi_gap = 0;  // low_ltsi - high_ltsi
};

std::vector<ExamplePair> mine_example_pairs(const corpus::Corpus& c, EcProperty property,
                                            int delta_t,
                                            const ec::InfluenceThresholds& thresholds,
                                            int delta = 2, std::size_t limit = 20);

// Feature-slot subsets for the evaluation baselines; nesting I < II < III.
std::vector<int> baseline_features(const std::string& name);

struct ExperimentConfig {
    int train_year_max = 1995;
    int train_size = 10000;
    int test_year_min = 1998;
    int test_year_max = 2010;
    int test_size = 10000;
    int n_test_samples = 3;
    int delta = 2;
    std::vector<int> delta_t_list = {3, 5, 7, 9, 11};
    std::vector<models::ModelKind> model_kinds = {models::ModelKind::LR, models::ModelKind::GPR,
                                                  models::ModelKind::CART, models::ModelKind::SVR};
    std::string baseline = "OUR";
    std::uint64_t seed = 1;
    int topic_k = 10;
    int topic_iterations = 200;
};

void validate(const ExperimentConfig& config);

struct ScatterPoint {
    std::string paper_id;
    double predicted = 0.0;
    double actual = 0.0;
};

struct ModelCell {
    models::ModelKind kind = models::ModelKind::LR;
    int delta_t = 0;
    double rho_mean = 0.0, rho_std = 0.0;
    double r2_paper_mean = 0.0, r2_paper_std = 0.0;
    double r2_standard_mean = 0.0, r2_standard_std = 0.0;
    std::int64_t n_test = 0;     // per-sample test size actually used
    std::int64_t n_samples = 0;  // test samples with defined metrics
    std::vector<ScatterPoint> scatter;  // first test sample
};

struct EvaluationReport {
    ExperimentConfig config;
    std::vector<ModelCell> cells;
    std::vector<std::string> warnings;
};

EvaluationReport run_experiment(const corpus::Corpus& c, const ExperimentConfig& config);

struct DeltaSensitivityCell {
    int delta = 0;
    int delta_t = 0;
    double rho = 0.0;
    double r2_paper = 0.0;
    double r2_standard = 0.0;
    std::int64_t n_test = 0;
};

std::vector<DeltaSensitivityCell> delta_sensitivity(const corpus::Corpus& c,
                                                    const ExperimentConfig& config,
                                                    const std::vector<int>& delta_list = {1, 2, 3},
                                                    const std::vector<int>& delta_t_list = {5, 7,
                                                                                            9});

struct RankedFeature {
    int slot = -1;
    std::string name;
    double rho = 0.0;
    bool defined = true;  // false: zero-variance or failed fit, ranked last
};

std::vector<RankedFeature> feature_ranking(const corpus::Corpus& c,
                                           const ExperimentConfig& config, int delta_t = 3);

// Pairwise Pearson matrix over feature columns; unit diagonal. Zero-variance
// columns are listed in `flagged` and their off-diagonal entries set to 0.
Eigen::MatrixXd feature_cross_correlation(const features::FeatureMatrix& m,
                                          std::vector<int>* flagged = nullptr);

struct SynthParams {
    int n_papers = 5000;
    int n_authors = 0;  // informational; author count follows the layout
    int year_min = 1975;
    int year_max = 2012;
    double stealing_strength = 0.5;
    double influence_fraction = 0.1;
    double bucket2_boost = 0.5;
    // Alternate target wiring: long-term counts proportional to the early
    // citation count plus 10% noise, for feature-ranking checks.
    bool ecc_driven = false;
};

corpus::Corpus generate_synthetic_corpus(const SynthParams& params, std::uint64_t seed);

void export_correlation_csv(const CorrelationTable& t, const std::string& path);
void export_metrics_csv(const EvaluationReport& r, const std::string& path);
void export_scatter_csv(const EvaluationReport& r, const std::string& directory);
void export_delta_sensitivity_csv(const std::vector<DeltaSensitivityCell>& cells,
                                  const std::string& path);
void export_ranking_csv(const std::vector<RankedFeature>& ranking, const std::string& path);
void export_cross_correlation_csv(const Eigen::MatrixXd& m, const std::string& path);

// Key-value text config ("key = value" lines, '#' comments).
ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const ExperimentConfig& config, const std::string& path);

}  // namespace citeimpact::study

#endif
