#include "citeimpact/study.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "citeimpact/errors.hpp"
#include "citeimpact/graphs.hpp"
#include "citeimpact/topics.hpp"

namespace citeimpact::study {

std::string to_string(EcProperty p) { return p == EcProperty::PC ? "PC" : "CC"; }

EcProperty ec_property_from_string(const std::string& s) {
    if (s == "PC" || s == "pc") return EcProperty::PC;
    if (s == "CC" || s == "cc") return EcProperty::CC;
    throw std::invalid_argument("unknown early-citer property: " + s);
}

namespace {

int corpus_horizon(const corpus::Corpus& c) { return corpus::horizon(c); }

double property_value(const ec::ECAggregates& a, EcProperty p) {
    return p == EcProperty::PC ? a.pc : a.cc;
}

bool property_influential(const ec::ECAggregates& a, EcProperty p) {
    return p == EcProperty::PC ? a.influential_pc : a.influential_cc;
}

// Aggregates for every paper with at least one early citation, computing the
// co-authorship graph once per distinct observation year.
std::vector<ec::ECAggregates> candidate_aggregates(const corpus::Corpus& c, int delta,
                                                   const ec::InfluenceThresholds& thresholds) {
    std::map<int, graphs::CoAuthorGraph> graph_cache;
    std::vector<ec::ECAggregates> out;
    for (const auto& p : c.papers) {
        if (ec::early_citing_papers(c, p.id, delta).empty()) continue;
        int as_of = p.year + delta;
        auto it = graph_cache.find(as_of);
        if (it == graph_cache.end()) {
            it = graph_cache.emplace(as_of, graphs::build_coauthorship_graph(c, as_of)).first;
        }
        out.push_back(ec::ec_aggregates(c, it->second, p.id, delta, thresholds));
    }
    return out;
}

CorrelationRow make_row(int delta_t, bool influential, int bucket,
                        const std::vector<double>& prop, const std::vector<double>& impact) {
    CorrelationRow row;
    row.delta_t = delta_t;
    row.influential = influential;
    row.bucket = bucket;
    row.n = static_cast<std::int64_t>(prop.size());
    if (row.n < 3) {
        row.insufficient = true;
        return row;
    }
    Eigen::Map<const Eigen::VectorXd> a(prop.data(), static_cast<Eigen::Index>(prop.size()));
    Eigen::Map<const Eigen::VectorXd> b(impact.data(), static_cast<Eigen::Index>(impact.size()));
    try {
        row.rho = models::pearson(a, b);
    } catch (const undefined_metric_error&) {
        row.undefined = true;
    }
    return row;
}

CorrelationTable correlation_table(const corpus::Corpus& c, EcProperty property,
                                   const ec::InfluenceThresholds& thresholds,
                                   const std::vector<int>& delta_t_list, int delta,
                                   bool bucketed) {
    CorrelationTable table;
    table.property = property;
    int horizon = corpus_horizon(c);
    std::vector<ec::ECAggregates> aggs = candidate_aggregates(c, delta, thresholds);

    for (int delta_t : delta_t_list) {
        int n_buckets = bucketed ? 3 : 1;
        for (int bucket = 0; bucket < n_buckets; ++bucket) {
            for (bool influential : {true, false}) {
                std::vector<double> prop, impact;
                for (const auto& a : aggs) {
                    if (a.year + delta_t > horizon) continue;  // censored
                    if (property_influential(a, property) != influential) continue;
                    if (bucketed &&
                        static_cast<int>(ec::ca_bucket(a.ca)) != bucket) {
                        continue;
                    }
                    prop.push_back(property_value(a, property));
                    impact.push_back(static_cast<double>(
                        corpus::citations_in_window(c, a.paper_id, a.year, a.year + delta_t)));
                }
                table.rows.push_back(
                    make_row(delta_t, influential, bucketed ? bucket : -1, prop, impact));
            }
        }
    }
    return table;
}

}  // namespace

CorrelationTable correlation_study(const corpus::Corpus& c, EcProperty property,
                                   const ec::InfluenceThresholds& thresholds,
                                   const std::vector<int>& delta_t_list, int delta) {
    return correlation_table(c, property, thresholds, delta_t_list, delta, false);
}

CorrelationTable bucketed_correlation_study(const corpus::Corpus& c, EcProperty property,
                                            const ec::InfluenceThresholds& thresholds,
                                            const std::vector<int>& delta_t_list, int delta) {
    return correlation_table(c, property, thresholds, delta_t_list, delta, true);
}

std::vector<ExamplePair> mine_example_pairs(const corpus::Corpus& c, EcProperty property,
                                            int delta_t,
                                            const ec::InfluenceThresholds& thresholds,
                                            int delta, std::size_t limit) {
    int horizon = corpus_horizon(c);
    std::vector<ec::ECAggregates> aggs = candidate_aggregates(c, delta, thresholds);
    std::map<int, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_ecc;
    std::vector<int> impact(aggs.size(), 0);
    for (std::size_t i = 0; i < aggs.size(); ++i) {
        if (aggs[i].year + delta_t > horizon) continue;
        impact[i] = corpus::citations_in_window(c, aggs[i].paper_id, aggs[i].year,
                                                aggs[i].year + delta_t);
        auto& [lows, highs] = by_ecc[aggs[i].ecc];
        (property_influential(aggs[i], property) ? highs : lows).push_back(i);
    }

    std::vector<ExamplePair> pairs;
    for (const auto& [ecc_value, group] : by_ecc) {
        for (std::size_t lo : group.first) {
            for (std::size_t hi : group.second) {
                ExamplePair p;
                p.low_id = aggs[lo].paper_id;
                p.high_id = aggs[hi].paper_id;
                p.ecc = ecc_value;
                p.low_property = property_value(aggs[lo], property);
                p.high_property = property_value(aggs[hi], property);
                p.low_ltsi = impact[lo];
                p.high_ltsi = impact[hi];
                p.ltsi_gap = p.low_ltsi - p.high_ltsi;
                pairs.push_back(std::move(p));
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const ExamplePair& a, const ExamplePair& b) {
        if (a.ltsi_gap != b.ltsi_gap) return a.ltsi_gap > b.ltsi_gap;
        if (a.low_id != b.low_id) return a.low_id < b.low_id;
        return a.high_id < b.high_id;
    });
    if (pairs.size() > limit) pairs.resize(limit);
    return pairs;
}

std::vector<int> baseline_features(const std::string& name) {
    using namespace features;
    std::vector<int> slots;
    if (name == "I" || name == "II" || name == "III") {
        slots = at_publication_slots();
        if (name == "II" || name == "III") slots.push_back(ECC);
        if (name == "III") {
            slots.push_back(CCAC);
            slots.push_back(CCAW);
        }
    } else if (name == "OUR" || name == "FULL") {
        for (int s = 0; s < kSlotCount; ++s) {
            if (name == "OUR" && (s == CCAC || s == CCAW)) continue;
            slots.push_back(s);
        }
    } else {
        throw std::invalid_argument("unknown baseline: " + name);
    }
    std::sort(slots.begin(), slots.end());
    return slots;
}

void validate(const ExperimentConfig& config) {
    if (config.test_year_min < config.train_year_max + config.delta + 1) {
        throw std::invalid_argument("experiment config leaks: first test year must be >= " +
                                    std::to_string(config.train_year_max + config.delta + 1));
    }
    if (config.train_size < 1 || config.test_size < 1 || config.n_test_samples < 1) {
        throw std::invalid_argument("experiment config: sizes must be positive");
    }
    if (config.delta_t_list.empty() || config.model_kinds.empty()) {
        throw std::invalid_argument("experiment config: empty horizon or model list");
    }
    baseline_features(config.baseline);  // rejects unknown names
}

namespace {

struct PaperYear {
    std::string id;
    int year = 0;
};

// Deterministic prefix Fisher-Yates draw without replacement.
std::vector<std::size_t> draw_indices(std::size_t pool, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(pool);
    for (std::size_t i = 0; i < pool; ++i) idx[i] = i;
    k = std::min(k, pool);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (pool - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

std::vector<PaperYear> early_cited_papers(const corpus::Corpus& c, int delta) {
    std::vector<PaperYear> out;
    for (const auto& p : c.papers) {
        if (ec::ecc(c, p.id, delta) >= 1) out.push_back({p.id, p.year});
    }
    return out;
}

Eigen::MatrixXd to_matrix(const std::vector<const features::FeatureVector*>& rows,
                          const std::vector<int>& slots) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(slots.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < slots.size(); ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i]->values[static_cast<std::size_t>(slots[j])];
        }
    }
    return X;
}

models::TrainedModel train_kind(models::ModelKind kind, const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y) {
    switch (kind) {
        case models::ModelKind::LR:
            return models::train_lr(X, y);
        case models::ModelKind::GPR:
            return models::train_gpr(X, y);
        case models::ModelKind::CART:
            return models::train_cart(X, y);
        case models::ModelKind::SVR: {
            models::SvrOptions opts;
            opts.gap_tol = std::max(1e-6, 1e-3 * static_cast<double>(X.rows()));
            opts.max_iter = 200000;
            return models::train_svr(X, y, opts);
        }
    }
    throw std::invalid_argument("train_kind: unknown model kind");
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Shared trainer/evaluator behind run_experiment and delta_sensitivity. Draws
// from the rng in a model-independent order so reports are reproducible.
std::vector<ModelCell> run_cells(const corpus::Corpus& c, const ExperimentConfig& config,
                                 features::FeatureExtractor& extractor,
                                 const std::vector<PaperYear>& candidates, int horizon,
                                 const std::vector<models::ModelKind>& kinds,
                                 const std::vector<int>& delta_t_list,
                                 const std::vector<int>& slots, int n_test_samples,
                                 std::vector<std::string>& warnings) {
    const int reference_year = config.train_year_max + config.delta;
    std::mt19937_64 rng(config.seed);

    std::vector<std::size_t> train_pool;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].year <= config.train_year_max) train_pool.push_back(i);
    }
    if (train_pool.size() < 5) {
        warnings.push_back("fewer than 5 training papers; nothing to evaluate");
        return {};
    }
    std::size_t n_train = std::min<std::size_t>(config.train_size, train_pool.size());
    if (n_train < static_cast<std::size_t>(config.train_size)) {
        warnings.push_back("training pool smaller than requested size; using " +
                           std::to_string(n_train));
    }
    std::vector<std::size_t> train_ids;
    for (std::size_t d : draw_indices(train_pool.size(), n_train, rng)) {
        train_ids.push_back(train_pool[d]);
    }

    // Test samples drawn per horizon before any model work.
    std::map<int, std::vector<std::vector<std::size_t>>> test_samples;
    for (int delta_t : delta_t_list) {
        int last_year = std::min(config.test_year_max, horizon - delta_t);
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (candidates[i].year >= config.test_year_min && candidates[i].year <= last_year) {
                eligible.push_back(i);
            }
        }
        if (eligible.size() < 3) {
            warnings.push_back("horizon " + std::to_string(delta_t) +
                               ": fewer than 3 eligible test papers; skipped");
            continue;
        }
        std::size_t n_test = std::min<std::size_t>(config.test_size, eligible.size());
        if (n_test < static_cast<std::size_t>(config.test_size)) {
            warnings.push_back("horizon " + std::to_string(delta_t) +
                               ": test pool shrunk to " + std::to_string(n_test));
        }
        auto& samples = test_samples[delta_t];
        for (int s = 0; s < n_test_samples; ++s) {
            std::vector<std::size_t> sample;
            for (std::size_t d : draw_indices(eligible.size(), n_test, rng)) {
                sample.push_back(eligible[d]);
            }
            samples.push_back(std::move(sample));
        }
    }

    std::unordered_map<std::size_t, features::FeatureVector> cache;
    auto fv = [&](std::size_t i) -> const features::FeatureVector* {
        auto it = cache.find(i);
        if (it == cache.end()) {
            it = cache.emplace(i, extractor.extract(candidates[i].id, reference_year)).first;
        }
        return &it->second;
    };
    auto impact = [&](std::size_t i, int delta_t) {
        return static_cast<double>(corpus::citations_in_window(
            c, candidates[i].id, candidates[i].year, candidates[i].year + delta_t));
    };

    std::vector<ModelCell> cells;
    for (models::ModelKind kind : kinds) {
        for (int delta_t : delta_t_list) {
            auto ts = test_samples.find(delta_t);
            if (ts == test_samples.end()) continue;

            std::vector<const features::FeatureVector*> train_rows;
            std::vector<double> train_y;
            for (std::size_t i : train_ids) {
                if (candidates[i].year + delta_t > horizon) continue;
                train_rows.push_back(fv(i));
                train_y.push_back(impact(i, delta_t));
            }
            if (train_rows.size() < 5) {
                warnings.push_back("horizon " + std::to_string(delta_t) +
                                   ": fewer than 5 uncensored training papers; skipped");
                continue;
            }
            Eigen::MatrixXd Xtr = to_matrix(train_rows, slots);
            Eigen::VectorXd ytr = Eigen::Map<Eigen::VectorXd>(
                train_y.data(), static_cast<Eigen::Index>(train_y.size()));
            models::TrainedModel model = train_kind(kind, Xtr, ytr);

            ModelCell cell;
            cell.kind = kind;
            cell.delta_t = delta_t;
            cell.n_test = static_cast<std::int64_t>(ts->second.front().size());
            std::vector<double> rhos, r2p, r2s;
            for (std::size_t s = 0; s < ts->second.size(); ++s) {
                const auto& sample = ts->second[s];
                std::vector<const features::FeatureVector*> rows;
                Eigen::VectorXd actual(static_cast<Eigen::Index>(sample.size()));
                for (std::size_t k = 0; k < sample.size(); ++k) {
                    rows.push_back(fv(sample[k]));
                    actual(static_cast<Eigen::Index>(k)) = impact(sample[k], delta_t);
                }
                Eigen::VectorXd pred =
                    models::predict(model, to_matrix(rows, slots), {.clamp_nonnegative = true});
                if (s == 0) {
                    for (std::size_t k = 0; k < sample.size(); ++k) {
                        cell.scatter.push_back({candidates[sample[k]].id,
                                                pred(static_cast<Eigen::Index>(k)),
                                                actual(static_cast<Eigen::Index>(k))});
                    }
                }
                try {
                    models::Metrics metrics = models::evaluate(pred, actual);
                    rhos.push_back(metrics.rho);
                    r2p.push_back(metrics.r2_paper);
                    r2s.push_back(metrics.r2_standard);
                } catch (const undefined_metric_error& e) {
                    warnings.push_back(std::string("metric undefined for ") +
                                       models::to_string(kind) + " horizon " +
                                       std::to_string(delta_t) + ": " + e.what());
                }
            }
            cell.n_samples = static_cast<std::int64_t>(rhos.size());
            cell.rho_mean = mean_of(rhos);
            cell.rho_std = std_of(rhos);
            cell.r2_paper_mean = mean_of(r2p);
            cell.r2_paper_std = std_of(r2p);
            cell.r2_standard_mean = mean_of(r2s);
            cell.r2_standard_std = std_of(r2s);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

topics::TopicModel fit_experiment_topics(const corpus::Corpus& c,
                                         const ExperimentConfig& config) {
    topics::TopicModelOptions opts;
    opts.K = config.topic_k;
    opts.iterations = config.topic_iterations;
    opts.seed = config.seed;
    opts.cutoff_year = config.train_year_max;
    return topics::fit_topic_model(c, opts);
}

}  // namespace

EvaluationReport run_experiment(const corpus::Corpus& c, const ExperimentConfig& config) {
    validate(config);
    EvaluationReport report;
    report.config = config;
    int horizon = corpus_horizon(c);
    ec::InfluenceThresholds thresholds = ec::fixed_thresholds();
    topics::TopicModel topic_model = fit_experiment_topics(c, config);
    features::ExtractorOptions fopts;
    fopts.delta = config.delta;
    features::FeatureExtractor extractor(c, topic_model, thresholds, fopts);
    std::vector<PaperYear> candidates = early_cited_papers(c, config.delta);
    report.cells = run_cells(c, config, extractor, candidates, horizon, config.model_kinds,
                             config.delta_t_list, baseline_features(config.baseline),
                             config.n_test_samples, report.warnings);
    return report;
}

std::vector<DeltaSensitivityCell> delta_sensitivity(const corpus::Corpus& c,
                                                    const ExperimentConfig& config,
                                                    const std::vector<int>& delta_list,
                                                    const std::vector<int>& delta_t_list) {
    validate(config);
    if (delta_list.empty()) throw std::invalid_argument("delta_sensitivity: empty delta list");
    int horizon = corpus_horizon(c);
    ec::InfluenceThresholds thresholds = ec::fixed_thresholds();
    topics::TopicModel topic_model = fit_experiment_topics(c, config);
    // One eligibility set across deltas: papers cited within the tightest window.
    int min_delta = *std::min_element(delta_list.begin(), delta_list.end());
    std::vector<PaperYear> candidates = early_cited_papers(c, min_delta);

    std::vector<DeltaSensitivityCell> out;
    std::vector<std::string> warnings;
    for (int delta : delta_list) {
        features::ExtractorOptions fopts;
        fopts.delta = delta;
        features::FeatureExtractor extractor(c, topic_model, thresholds, fopts);
        std::vector<ModelCell> cells =
            run_cells(c, config, extractor, candidates, horizon, {models::ModelKind::SVR},
                      delta_t_list, baseline_features(config.baseline), 1, warnings);
        for (const auto& cell : cells) {
            DeltaSensitivityCell d;
            d.delta = delta;
            d.delta_t = cell.delta_t;
            d.rho = cell.rho_mean;
            d.r2_paper = cell.r2_paper_mean;
            d.r2_standard = cell.r2_standard_mean;
            d.n_test = cell.n_test;
            out.push_back(d);
        }
    }
    return out;
}

std::vector<RankedFeature> feature_ranking(const corpus::Corpus& c,
                                           const ExperimentConfig& config, int delta_t) {
    validate(config);
    int horizon = corpus_horizon(c);
    ec::InfluenceThresholds thresholds = ec::fixed_thresholds();
    topics::TopicModel topic_model = fit_experiment_topics(c, config);
    features::ExtractorOptions fopts;
    fopts.delta = config.delta;
    features::FeatureExtractor extractor(c, topic_model, thresholds, fopts);
    std::vector<PaperYear> candidates = early_cited_papers(c, config.delta);

    std::vector<RankedFeature> out;
    std::vector<std::string> warnings;
    for (int slot = 0; slot < features::kSlotCount; ++slot) {
        RankedFeature r;
        r.slot = slot;
        r.name = features::slot_names()[static_cast<std::size_t>(slot)];
        try {
            std::vector<ModelCell> cells =
                run_cells(c, config, extractor, candidates, horizon, {models::ModelKind::SVR},
                          {delta_t}, {slot}, 1, warnings);
            if (cells.empty() || cells.front().n_samples == 0) {
                r.defined = false;
            } else {
                r.rho = cells.front().rho_mean;
            }
        } catch (const std::exception&) {
            r.defined = false;
        }
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const RankedFeature& a, const RankedFeature& b) {
        if (a.defined != b.defined) return a.defined;
        if (a.rho != b.rho) return a.rho > b.rho;
        return a.slot < b.slot;
    });
    return out;
}

Eigen::MatrixXd feature_cross_correlation(const features::FeatureMatrix& m,
                                          std::vector<int>* flagged) {
    const std::size_t n = m.rows.size();
    if (n < 2) throw std::invalid_argument("feature_cross_correlation: need >= 2 rows");
    const int d = features::kSlotCount;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            X(static_cast<Eigen::Index>(i), j) = m.rows[i].values[static_cast<std::size_t>(j)];
        }
    }
    std::vector<bool> zero_var(static_cast<std::size_t>(d), false);
    for (int j = 0; j < d; ++j) {
        double var = (X.col(j).array() - X.col(j).mean()).square().sum();
        if (var <= 0.0) {
            zero_var[static_cast<std::size_t>(j)] = true;
            if (flagged) flagged->push_back(j);
        }
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            double rho = 0.0;
            if (!zero_var[static_cast<std::size_t>(i)] && !zero_var[static_cast<std::size_t>(j)]) {
                rho = models::pearson(X.col(i), X.col(j));
            }
            out(i, j) = out(j, i) = rho;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

namespace {

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

const std::array<std::array<const char*, 6>, 5>& theme_words() {
    static const std::array<std::array<const char*, 6>, 5> kThemes = {{
        {"network", "graph", "centrality", "community", "clustering", "topology"},
        {"learning", "kernel", "regression", "classifier", "gradient", "training"},
        {"database", "query", "index", "transaction", "storage", "schema"},
        {"protocol", "routing", "latency", "bandwidth", "wireless", "packet"},
        {"compiler", "runtime", "memory", "parallel", "scheduling", "cache"},
    }};
    return kThemes;
}

std::string synth_text(int theme, int words, std::mt19937_64& rng) {
    static const std::array<const char*, 6> kShared = {"analysis", "model",  "system",
                                                       "method",   "result", "evaluation"};
    const auto& t = theme_words()[static_cast<std::size_t>(theme) % 5];
    std::string out;
    for (int i = 0; i < words; ++i) {
        if (!out.empty()) out.push_back(' ');
        if (i % 3 == 2) {
            out += kShared[rng() % kShared.size()];
        } else {
            out += t[rng() % t.size()];
        }
    }
    return out;
}

}  // namespace

corpus::Corpus generate_synthetic_corpus(const SynthParams& params, std::uint64_t seed) {
    if (params.n_papers < 1 || params.year_max <= params.year_min + 25) {
        throw std::invalid_argument("generate_synthetic_corpus: bad params");
    }
    std::mt19937_64 rng(seed);
    corpus::Corpus c;
    auto add_paper = [&](std::string id, int year, std::vector<std::string> authors,
                         std::string venue, int theme,
                         std::vector<std::string> refs) -> corpus::PaperRecord& {
        corpus::PaperRecord p;
        p.id = std::move(id);
        p.year = year;
        p.authors = std::move(authors);
        p.venue = std::move(venue);
        p.title = synth_text(theme, 4, rng);
        p.abstract_text = synth_text(theme, 14, rng);
        p.references = std::move(refs);
        c.papers.push_back(std::move(p));
        return c.papers.back();
    };

    const int y0 = params.year_min;
    const int cand_last = params.year_max - 12;
    const int cand_first = cand_last - 10;
    const int crowd_first = cand_first + 3;
    const int crowd_years = params.year_max - crowd_first + 1;

    // Shared back-catalog papers carrying author publication/citation history.
    constexpr int kInfPool = 120;
    constexpr int kRegPool = 30;
    std::vector<std::string> inf_pool_ids, reg_pool_ids;
    for (int i = 0; i < kInfPool; ++i) {
        std::string id = "hist_i" + std::to_string(i);
        add_paper(id, y0 + i % 10, {"hba_" + std::to_string(i)}, "v_hist", i % 5, {});
        inf_pool_ids.push_back(id);
    }
    for (int i = 0; i < kRegPool; ++i) {
        std::string id = "hist_r" + std::to_string(i);
        add_paper(id, y0 + i % 10, {"hbr_" + std::to_string(i)}, "v_hist", i % 5, {});
        reg_pool_ids.push_back(id);
    }
    // Archive citers give every back-catalog paper a fixed citation tally long
    // before any candidate is published.
    for (int w = 0; w < 12; ++w) {
        add_paper("arch_i" + std::to_string(w), y0 + 13 + w % 2,
                  {"arch_a" + std::to_string(w)}, "v_arch", w % 5, inf_pool_ids);
    }
    for (int w = 0; w < 8; ++w) {
        add_paper("arch_r" + std::to_string(w), y0 + 13 + w % 2,
                  {"arch_b" + std::to_string(w)}, "v_arch", w % 5, reg_pool_ids);
    }

    const int crowd_per_year =
        std::max(5, std::min(15, params.n_papers / 300));
    const double per_candidate = params.ecc_driven ? 4.6 : 3.0;
    const int fixed = kInfPool + kRegPool + 12 + 8 + crowd_per_year * crowd_years;
    const int n_candidates = std::max(
        12, static_cast<int>((params.n_papers - fixed) / per_candidate));

    struct Candidate {
        std::string id;
        int year = 0;
        double q = 0.0;
        double qn = 0.0;
        bool treated = false;
        int ca_class = 0;  // 1..3 when treated
        int early_count = 1;
    };
    std::vector<Candidate> cands(static_cast<std::size_t>(n_candidates));

    int n_treated = 0;
    for (int i = 0; i < n_candidates; ++i) {
        Candidate& cd = cands[static_cast<std::size_t>(i)];
        cd.id = "cand" + std::to_string(i);
        cd.year = cand_first + i % (cand_last - cand_first + 1);
        cd.q = unit_draw(rng);
        cd.qn = clamp01(cd.q + 0.1 * (2.0 * unit_draw(rng) - 1.0));
        cd.treated = !params.ecc_driven && unit_draw(rng) < params.influence_fraction;

        std::vector<std::string> authors = {cd.id + "_a0", cd.id + "_a1"};
        std::vector<std::string> refs;
        int n_refs = 3 + static_cast<int>(rng() % 5);
        std::size_t ref0 = static_cast<std::size_t>(rng() % kInfPool);
        for (int r = 0; r < n_refs; ++r) refs.push_back(inf_pool_ids[(ref0 + 7u * r) % kInfPool]);

        std::string citer_author;
        if (cd.treated) {
            cd.ca_class = 1 + n_treated % 3;
            ++n_treated;
            int pubs = 21 + static_cast<int>(std::lround(59.0 * cd.qn));
            citer_author = "inf" + std::to_string(i);
            std::size_t off = static_cast<std::size_t>(rng() % kInfPool);
            for (int k = 0; k < pubs; ++k) {
                c.papers[(off + static_cast<std::size_t>(k)) % kInfPool].authors.push_back(
                    citer_author);
            }
            if (cd.ca_class == 1) authors.push_back(citer_author);
            cd.early_count = 1;
        } else {
            int pubs = 2 + static_cast<int>(std::lround(15.0 * cd.qn));
            citer_author = "regc" + std::to_string(i);
            std::size_t off = static_cast<std::size_t>(rng() % kRegPool);
            for (int k = 0; k < pubs; ++k) {
                c.papers[kInfPool + (off + static_cast<std::size_t>(k)) % kRegPool]
                    .authors.push_back(citer_author);
            }
            cd.early_count =
                1 + static_cast<int>(rng() % (params.ecc_driven ? 6 : 3));
        }

        add_paper(cd.id, cd.year, std::move(authors), "v" + std::to_string(i % 8), i % 5,
                  std::move(refs));
        if (cd.treated && cd.ca_class == 2) {
            add_paper(cd.id + "_link", cd.year - 5, {cd.id + "_a0", citer_author}, "v_hist",
                      i % 5, {});
        }
        for (int e = 0; e < cd.early_count; ++e) {
            std::string eid = cd.id + "_ec" + std::to_string(e);
            add_paper(eid, cd.year + 1, {citer_author}, "v_early", i % 5, {cd.id});
            corpus::CitationContextRecord ctx;
            ctx.citing = eid;
            ctx.cited = cd.id;
            ctx.count_x = 1 + static_cast<int>(rng() % 3);
            ctx.cite_words = 3 + static_cast<int>(rng() % 15);
            ctx.context_text = synth_text(i % 5, 6, rng);
            c.contexts.emplace(std::make_pair(ctx.citing, ctx.cited), std::move(ctx));
        }
    }

    // Crowd papers realize the later-year citation streams; their per-year
    // volume toward a candidate decays with the planted stealing term.
    // Indices, not references: the paper vector reallocates while growing.
    std::vector<std::vector<std::size_t>> crowd(static_cast<std::size_t>(crowd_years));
    for (int y = 0; y < crowd_years; ++y) {
        for (int k = 0; k < crowd_per_year; ++k) {
            add_paper("crowd_" + std::to_string(crowd_first + y) + "_" + std::to_string(k),
                      crowd_first + y, {"crowd_a" + std::to_string(k)}, "v_crowd",
                      static_cast<int>(rng() % 5), {});
            crowd[static_cast<std::size_t>(y)].push_back(c.papers.size() - 1);
        }
    }
    for (int y = 0; y < crowd_years; ++y) {
        int year = crowd_first + y;
        std::size_t cursor = 0;
        for (const Candidate& cd : cands) {
            if (year < cd.year + 3 || year > cd.year + 15) continue;
            double mu;
            if (params.ecc_driven) {
                mu = 0.9 * static_cast<double>(cd.early_count);
            } else {
                double steal = 1.0;
                if (cd.treated) {
                    double s = params.stealing_strength * (0.2 + cd.qn) *
                               (cd.ca_class == 2 ? 1.0 + params.bucket2_boost : 1.0);
                    steal = std::max(0.05, 1.0 - s);
                }
                mu = 2.0 * std::exp(0.3 * cd.q) * steal;
            }
            double noise = params.ecc_driven ? (0.9 + 0.2 * unit_draw(rng))
                                             : (0.7 + 0.6 * unit_draw(rng));
            int k = static_cast<int>(std::lround(mu * noise));
            k = std::min(k, crowd_per_year);
            for (int j = 0; j < k; ++j) {
                std::size_t slot = (cursor + static_cast<std::size_t>(j)) %
                                   static_cast<std::size_t>(crowd_per_year);
                c.papers[crowd[static_cast<std::size_t>(y)][slot]].references.push_back(cd.id);
            }
            cursor += static_cast<std::size_t>(k);
        }
    }

    for (const auto& p : c.papers) {
        for (const auto& a : p.authors) c.author_names.emplace(a, a);
        c.venue_names.emplace(p.venue, p.venue);
    }
    c.rebuild_indexes();
    c.rebuild_citation_index();
    return c;
}

// ---------------------------------------------------------------------------
// CSV / config IO
// ---------------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw parse_error("cannot open for write: " + path);
    os << std::setprecision(17);
    return os;
}

}  // namespace

void export_correlation_csv(const CorrelationTable& t, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "property,delta_t,subset,bucket,rho,n,flag\n";
    for (const auto& r : t.rows) {
        os << to_string(t.property) << ',' << r.delta_t << ','
           << (r.influential ? "influential" : "non_influential") << ','
           << (r.bucket < 0 ? std::string("-") : "bucket" + std::to_string(r.bucket + 1)) << ','
           << r.rho << ',' << r.n << ','
           << (r.insufficient ? "insufficient" : (r.undefined ? "undefined" : "ok")) << '\n';
    }
}

void export_metrics_csv(const EvaluationReport& r, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "model,delta_t,rho_mean,rho_std,r2_paper_mean,r2_paper_std,"
          "r2_standard_mean,r2_standard_std,n_test\n";
    for (const auto& cell : r.cells) {
        os << models::to_string(cell.kind) << ',' << cell.delta_t << ',' << cell.rho_mean << ','
           << cell.rho_std << ',' << cell.r2_paper_mean << ',' << cell.r2_paper_std << ','
           << cell.r2_standard_mean << ',' << cell.r2_standard_std << ',' << cell.n_test << '\n';
    }
}

void export_scatter_csv(const EvaluationReport& r, const std::string& directory) {
    std::filesystem::create_directories(directory);
    for (const auto& cell : r.cells) {
        std::string path = directory + "/scatter_" + models::to_string(cell.kind) + "_dt" +
                           std::to_string(cell.delta_t) + ".csv";
        std::ofstream os = open_out(path);
        os << "paper_id,predicted,actual\n";
        for (const auto& p : cell.scatter) {
            os << p.paper_id << ',' << p.predicted << ',' << p.actual << '\n';
        }
    }
}

void export_delta_sensitivity_csv(const std::vector<DeltaSensitivityCell>& cells,
                                  const std::string& path) {
    std::ofstream os = open_out(path);
    os << "delta,delta_t,rho,r2_paper,r2_standard,n_test\n";
    for (const auto& d : cells) {
        os << d.delta << ',' << d.delta_t << ',' << d.rho << ',' << d.r2_paper << ','
           << d.r2_standard << ',' << d.n_test << '\n';
    }
}

void export_ranking_csv(const std::vector<RankedFeature>& ranking, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "rank,feature,rho,defined\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        os << (i + 1) << ',' << ranking[i].name << ',' << ranking[i].rho << ','
           << (ranking[i].defined ? 1 : 0) << '\n';
    }
}

void export_cross_correlation_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "feature";
    for (int j = 0; j < m.cols(); ++j) {
        os << ',' << features::slot_names()[static_cast<std::size_t>(j)];
    }
    os << '\n';
    for (int i = 0; i < m.rows(); ++i) {
        os << features::slot_names()[static_cast<std::size_t>(i)];
        for (int j = 0; j < m.cols(); ++j) os << ',' << m(i, j);
        os << '\n';
    }
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open config: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw parse_error(path + ":" + std::to_string(lineno) + ": expected key = value");
            }
            continue;
        }
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "train_year_max") {
                cfg.train_year_max = std::stoi(value);
            } else if (key == "train_size") {
                cfg.train_size = std::stoi(value);
            } else if (key == "test_year_min") {
                cfg.test_year_min = std::stoi(value);
            } else if (key == "test_year_max") {
                cfg.test_year_max = std::stoi(value);
            } else if (key == "test_size") {
                cfg.test_size = std::stoi(value);
            } else if (key == "n_test_samples") {
                cfg.n_test_samples = std::stoi(value);
            } else if (key == "delta") {
                cfg.delta = std::stoi(value);
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key == "topic_k") {
                cfg.topic_k = std::stoi(value);
            } else if (key == "topic_iterations") {
                cfg.topic_iterations = std::stoi(value);
            } else if (key == "baseline") {
                cfg.baseline = value;
            } else if (key == "delta_t_list") {
                cfg.delta_t_list.clear();
                for (const auto& v : split_list(value)) cfg.delta_t_list.push_back(std::stoi(v));
            } else if (key == "models") {
                cfg.model_kinds.clear();
                for (const auto& v : split_list(value)) {
                    cfg.model_kinds.push_back(models::model_kind_from_string(v));
                }
            } else {
                throw parse_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
            }
        } catch (const std::invalid_argument& e) {
            throw parse_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

void save_experiment_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "train_year_max = " << cfg.train_year_max << '\n'
       << "train_size = " << cfg.train_size << '\n'
       << "test_year_min = " << cfg.test_year_min << '\n'
       << "test_year_max = " << cfg.test_year_max << '\n'
       << "test_size = " << cfg.test_size << '\n'
       << "n_test_samples = " << cfg.n_test_samples << '\n'
       << "delta = " << cfg.delta << '\n'
       << "seed = " << cfg.seed << '\n'
       << "topic_k = " << cfg.topic_k << '\n'
       << "topic_iterations = " << cfg.topic_iterations << '\n'
       << "baseline = " << cfg.baseline << '\n';
    os << "delta_t_list = ";
    for (std::size_t i = 0; i < cfg.delta_t_list.size(); ++i) {
        os << (i ? "," : "") << cfg.delta_t_list[i];
    }
    os << "\nmodels = ";
    for (std::size_t i = 0; i < cfg.model_kinds.size(); ++i) {
        os << (i ? "," : "") << models::to_string(cfg.model_kinds[i]);
    }
    os << '\n';
}

}  // namespace citeimpact::study
