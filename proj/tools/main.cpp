// Command-line front end: thin adapters around the library operations, plus
// static per-paper report emission. Workspace layout:
//   corpus.bin     corpus snapshot (ingest / filter / synth)
//   topics.bin     topic model (topics)
//   features.csv   feature matrix (features)
//   model_<kind>_dt<h>.bin  trained models (train)
//   train_meta.txt baseline/delta/reference year used at training time
//   graphs/, study/, metrics.csv, scatter/, report.json, report.html
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "citeimpact/corpus.hpp"
#include "citeimpact/earlyciters.hpp"
#include "citeimpact/errors.hpp"
#include "citeimpact/features.hpp"
#include "citeimpact/graphs.hpp"
#include "citeimpact/models.hpp"
#include "citeimpact/study.hpp"
#include "citeimpact/topics.hpp"

namespace fs = std::filesystem;
using namespace citeimpact;
using nlohmann::json;

namespace {

struct Workspace {
    fs::path dir;

    fs::path corpus_file() const { return dir / "corpus.bin"; }
    fs::path topics_file() const { return dir / "topics.bin"; }
    fs::path features_file() const { return dir / "features.csv"; }
    fs::path meta_file() const { return dir / "train_meta.txt"; }
    fs::path model_file(models::ModelKind k, int delta_t) const {
        return dir / ("model_" + models::to_string(k) + "_dt" + std::to_string(delta_t) + ".bin");
    }
};

// Advisory lock: concurrent invocations on one workspace are unsupported.
class WorkspaceLock {
public:
    explicit WorkspaceLock(const fs::path& dir) : path_(dir / ".lock") {
        fs::create_directories(dir);
        std::ofstream probe(path_, std::ios::app);
        if (fs::file_size(path_) > 0) {
            throw std::runtime_error("workspace is locked by another invocation (" +
                                     path_.string() + "); remove the lock file if stale");
        }
        probe << "locked\n";
    }
    ~WorkspaceLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    WorkspaceLock(const WorkspaceLock&) = delete;
    WorkspaceLock& operator=(const WorkspaceLock&) = delete;

private:
    fs::path path_;
};

int corpus_horizon(const corpus::Corpus& c) { return corpus::horizon(c); }

struct TrainMeta {
    std::string baseline = "OUR";
    int delta = 2;
    int reference_year = 1997;
    std::vector<int> delta_t_list;
    std::vector<std::string> kinds;
};

void save_meta(const Workspace& ws, const TrainMeta& m) {
    std::ofstream os(ws.meta_file(), std::ios::trunc);
    os << "baseline = " << m.baseline << "\ndelta = " << m.delta
       << "\nreference_year = " << m.reference_year << "\ndelta_t_list = ";
    for (std::size_t i = 0; i < m.delta_t_list.size(); ++i) {
        os << (i ? "," : "") << m.delta_t_list[i];
    }
    os << "\nmodels = ";
    for (std::size_t i = 0; i < m.kinds.size(); ++i) os << (i ? "," : "") << m.kinds[i];
    os << '\n';
}

TrainMeta load_meta(const Workspace& ws) {
    std::ifstream is(ws.meta_file());
    if (!is) throw not_found_error("no trained models in workspace (missing train_meta.txt)");
    TrainMeta m;
    std::string line;
    while (std::getline(is, line)) {
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, line.find_last_not_of(" \t", eq - 1) + 1);
        std::string value = line.substr(line.find_first_not_of(" \t", eq + 1));
        if (key == "baseline") {
            m.baseline = value;
        } else if (key == "delta") {
            m.delta = std::stoi(value);
        } else if (key == "reference_year") {
            m.reference_year = std::stoi(value);
        } else if (key == "delta_t_list" || key == "models") {
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (key == "delta_t_list") {
                    m.delta_t_list.push_back(std::stoi(tok));
                } else {
                    m.kinds.push_back(tok);
                }
            }
        }
    }
    return m;
}

corpus::Corpus load_ws_corpus(const Workspace& ws) {
    if (!fs::exists(ws.corpus_file())) {
        throw not_found_error("no corpus snapshot in workspace; run ingest or synth first");
    }
    return corpus::load_snapshot(ws.corpus_file().string());
}

std::vector<std::string> candidate_ids(const corpus::Corpus& c, int delta) {
    std::vector<std::string> out;
    for (const auto& p : c.papers) {
        if (ec::ecc(c, p.id, delta) >= 1) out.push_back(p.id);
    }
    return out;
}

study::ExperimentConfig config_for(const std::string& config_path, std::uint64_t seed) {
    study::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = study::load_experiment_config(config_path);
    cfg.seed = seed;
    return cfg;
}

// ---------------------------------------------------------------------------
// report emission
// ---------------------------------------------------------------------------

json build_report(const Workspace& ws, const corpus::Corpus& c, const std::string& paper_id) {
    const corpus::PaperRecord& p = c.paper(paper_id);
    TrainMeta meta = load_meta(ws);

    std::vector<std::pair<models::ModelKind, int>> available;
    for (const auto& kind_name : meta.kinds) {
        models::ModelKind kind = models::model_kind_from_string(kind_name);
        for (int dt : meta.delta_t_list) {
            if (fs::exists(ws.model_file(kind, dt))) available.emplace_back(kind, dt);
        }
    }
    if (available.empty()) {
        std::string have = "none";
        throw not_found_error("no trained models in workspace (available artifacts: " + have +
                              "); run train first");
    }

    features::FeatureMatrix fm = features::load_feature_csv(ws.features_file().string());
    const features::FeatureVector* row = nullptr;
    for (const auto& r : fm.rows) {
        if (r.paper_id == paper_id) {
            row = &r;
            break;
        }
    }
    if (!row) throw not_found_error("paper " + paper_id + " has no feature row; rerun features");

    json out;
    out["paper"] = {{"id", p.id},
                    {"title", p.title},
                    {"venue", p.venue},
                    {"year", p.year},
                    {"authors", p.authors}};

    ec::InfluenceThresholds thresholds = ec::fixed_thresholds();
    graphs::CoAuthorGraph coauthors = graphs::build_coauthorship_graph(c, p.year + meta.delta);
    ec::ECAggregates agg = ec::ec_aggregates(c, coauthors, paper_id, meta.delta, thresholds);
    json citers = json::array();
    for (const auto& cid : ec::early_citing_papers(c, paper_id, meta.delta)) {
        int year = p.year + meta.delta;
        if (const corpus::PaperRecord* cp = c.find_paper(cid)) {
            year = cp->year;
        } else if (const corpus::CiterStub* s = c.citer_info(cid)) {
            year = s->year;
        }
        std::vector<std::string> authors;
        if (const corpus::PaperRecord* cp = c.find_paper(cid)) {
            authors = cp->authors;
        } else if (const corpus::CiterStub* s = c.citer_info(cid)) {
            authors = s->authors;
        }
        for (const auto& a : authors) {
            ec::AuthorSnapshot snap;
            try {
                snap = ec::author_snapshot(c, a, year);
            } catch (const not_found_error&) {
                snap.author_id = a;
            }
            bool influential = ec::classify(snap, thresholds) == ec::InfluenceClass::INFLUENTIAL;
            citers.push_back(
                {{"author", a}, {"class", influential ? "influential" : "non_influential"}});
        }
    }
    out["ec"] = {{"ecc", agg.ecc},
                 {"pc", agg.pc},
                 {"cc", agg.cc},
                 {"ca", agg.ca},
                 {"bucket", ec::to_string(ec::ca_bucket(agg.ca))},
                 {"citers", citers}};

    int horizon = corpus_horizon(c);
    std::vector<int> slots = study::baseline_features(meta.baseline);
    Eigen::MatrixXd X(1, static_cast<Eigen::Index>(slots.size()));
    for (std::size_t j = 0; j < slots.size(); ++j) {
        X(0, static_cast<Eigen::Index>(j)) = row->values[static_cast<std::size_t>(slots[j])];
    }
    json predictions = json::object();
    for (const auto& [kind, dt] : available) {
        models::TrainedModel model = models::load_model(ws.model_file(kind, dt).string());
        double predicted = models::predict(model, X, {.clamp_nonnegative = true})(0);
        json actual;
        if (p.year + dt <= horizon) {
            actual = corpus::citations_in_window(c, paper_id, p.year, p.year + dt);
        }
        predictions[models::to_string(kind)][std::to_string(dt)] = {{"predicted", predicted},
                                                                    {"actual", actual}};
    }
    out["predictions"] = predictions;
    return out;
}

std::string render_html(const json& report) {
    std::ostringstream os;
    const json& paper = report.at("paper");
    const json& ecj = report.at("ec");
    os << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n<title>Paper report: "
       << paper.at("id").get<std::string>() << "</title>\n"
       << "<style>body{font-family:sans-serif;max-width:60em;margin:2em auto}"
       << "table{border-collapse:collapse}td,th{border:1px solid #999;padding:0.3em 0.7em}"
       << ".bar{display:inline-block;height:0.8em;background:#369}"
       << ".bar.actual{background:#c60}</style></head><body>\n";
    os << "<h1>" << paper.at("title").get<std::string>() << "</h1>\n<p>"
       << paper.at("venue").get<std::string>() << ", " << paper.at("year").get<int>()
       << "</p>\n";
    os << "<h2>Early citer statistics</h2>\n<table><tr><th>ECC</th><th>PC</th><th>CC</th>"
       << "<th>CA</th><th>bucket</th></tr><tr><td>" << ecj.at("ecc").get<int>() << "</td><td>"
       << ecj.at("pc").get<double>() << "</td><td>" << ecj.at("cc").get<double>() << "</td><td>"
       << ecj.at("ca").get<double>() << "</td><td>" << ecj.at("bucket").get<std::string>()
       << "</td></tr></table>\n";
    os << "<h3>Early citers</h3>\n<ul>\n";
    for (const auto& citer : ecj.at("citers")) {
        os << "<li>" << citer.at("author").get<std::string>() << " ("
           << citer.at("class").get<std::string>() << ")</li>\n";
    }
    os << "</ul>\n<h2>Predicted vs actual citations</h2>\n"
       << "<table><tr><th>model</th><th>horizon</th><th>predicted</th><th>actual</th>"
       << "<th></th></tr>\n";
    for (const auto& [model, horizons] : report.at("predictions").items()) {
        for (const auto& [dt, cell] : horizons.items()) {
            double predicted = cell.at("predicted").get<double>();
            os << "<tr><td>" << model << "</td><td>+" << dt << "y</td><td>" << predicted
               << "</td><td>";
            double actual_w = 0.0;
            if (cell.at("actual").is_null()) {
                os << "beyond horizon";
            } else {
                actual_w = cell.at("actual").get<double>();
                os << cell.at("actual").get<int>();
            }
            os << "</td><td><span class=\"bar\" style=\"width:" << predicted * 4.0
               << "px\"></span><br><span class=\"bar actual\" style=\"width:" << actual_w * 4.0
               << "px\"></span></td></tr>\n";
        }
    }
    os << "</table>\n<p>Blue: predicted. Orange: actual.</p>\n</body></html>\n";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Early-citer citation analysis toolkit"};
    app.require_subcommand(1);

    std::string workspace_dir = "workspace";
    app.add_option("--workspace", workspace_dir, "Workspace directory")->capture_default_str();

    // ingest
    auto* cmd_ingest = app.add_subcommand("ingest", "Build a corpus snapshot from JSONL files");
    std::string papers_path, authors_path, venues_path, contexts_path, out_path;
    cmd_ingest->add_option("--papers", papers_path, "Paper records (JSONL)")->required();
    cmd_ingest->add_option("--authors", authors_path, "Author records (JSONL)");
    cmd_ingest->add_option("--venues", venues_path, "Venue records (JSONL)");
    cmd_ingest->add_option("--contexts", contexts_path, "Citation context records (JSONL)");
    cmd_ingest->add_option("--out", out_path, "Snapshot path (default: workspace corpus)");

    // filter
    auto* cmd_filter = app.add_subcommand("filter", "Keep papers with early citations");
    int filter_delta = 2;
    cmd_filter->add_option("--delta", filter_delta, "Early window length")->capture_default_str();

    // graphs
    auto* cmd_graphs = app.add_subcommand("graphs", "Export graphs and centrality scores");
    int graphs_as_of = 0;
    cmd_graphs->add_option("--as-of", graphs_as_of, "Collaboration graph cutoff year (default horizon)");

    // topics
    auto* cmd_topics = app.add_subcommand("topics", "Fit the topic model");
    int topic_k = 50, topic_iterations = 500, topic_cutoff = 0;
    std::uint64_t topics_seed = 0;
    cmd_topics->add_option("--k", topic_k, "Topic count")->capture_default_str();
    cmd_topics->add_option("--iterations", topic_iterations, "Sampler sweeps")->capture_default_str();
    cmd_topics->add_option("--cutoff-year", topic_cutoff, "Fit on papers up to this year");
    cmd_topics->add_option("--seed", topics_seed, "RNG seed")->required();

    // features
    auto* cmd_features = app.add_subcommand("features", "Extract feature vectors");
    int features_delta = 2, reference_year = 1997;
    cmd_features->add_option("--delta", features_delta, "Early window length")->capture_default_str();
    cmd_features->add_option("--reference-year", reference_year, "Recency reference year")
        ->capture_default_str();

    // train
    auto* cmd_train = app.add_subcommand("train", "Train prediction models");
    std::string train_models = "lr,gpr,cart,svr", train_config;
    std::vector<int> train_delta_ts = {3, 5, 7, 9, 11};
    cmd_train->add_option("--models", train_models, "Comma list of lr,gpr,cart,svr")
        ->capture_default_str();
    cmd_train->add_option("--delta-t", train_delta_ts, "Prediction horizons")->delimiter(',');
    cmd_train->add_option("--config", train_config, "Experiment config file");

    // evaluate
    auto* cmd_eval = app.add_subcommand("evaluate", "Run the full prediction experiment");
    std::string eval_config;
    std::uint64_t eval_seed = 0;
    cmd_eval->add_option("--config", eval_config, "Experiment config file");
    cmd_eval->add_option("--seed", eval_seed, "RNG seed")->required();

    // study
    auto* cmd_study = app.add_subcommand("study", "Correlation and sensitivity studies");
    std::string study_kind = "correlation", study_property = "PC", study_config;
    std::optional<std::uint64_t> study_seed;
    int study_delta = 2, pairs_delta_t = 10;
    cmd_study
        ->add_option("--kind", study_kind,
                     "correlation | buckets | pairs | delta | ranking | crosscorr")
        ->capture_default_str();
    cmd_study->add_option("--property", study_property, "PC or CC")->capture_default_str();
    cmd_study->add_option("--delta", study_delta, "Early window length")->capture_default_str();
    cmd_study->add_option("--delta-t", pairs_delta_t, "Horizon for pair mining")
        ->capture_default_str();
    cmd_study->add_option("--config", study_config, "Experiment config file");
    cmd_study->add_option("--seed", study_seed, "RNG seed (required for delta/ranking)");

    // report
    auto* cmd_report = app.add_subcommand("report", "Emit a per-paper report");
    std::string report_paper, report_format = "json,html";
    cmd_report->add_option("--paper", report_paper, "Paper id")->required();
    cmd_report->add_option("--format", report_format, "json, html, or json,html")
        ->capture_default_str();

    // synth
    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    study::SynthParams synth_params;
    std::uint64_t synth_seed = 0;
    cmd_synth->add_option("--papers", synth_params.n_papers, "Approximate corpus size")
        ->capture_default_str();
    cmd_synth->add_option("--stealing", synth_params.stealing_strength, "Stealing strength")
        ->capture_default_str();
    cmd_synth
        ->add_option("--influence-fraction", synth_params.influence_fraction,
                     "Treated paper fraction")
        ->capture_default_str();
    cmd_synth->add_option("--bucket2-boost", synth_params.bucket2_boost, "Bucket-2 intensifier")
        ->capture_default_str();
    bool ecc_driven = false;
    cmd_synth->add_flag("--ecc-driven", ecc_driven, "Targets follow early citation counts");
    cmd_synth->add_option("--seed", synth_seed, "RNG seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Workspace ws{fs::path(workspace_dir)};
        WorkspaceLock lock(ws.dir);

        if (cmd_ingest->parsed()) {
            std::ifstream fp(papers_path), fa(authors_path), fv(venues_path), fc(contexts_path);
            if (!fp) throw not_found_error("cannot open " + papers_path);
            std::istringstream empty_a, empty_v, empty_c;
            corpus::Corpus c = corpus::ingest(
                fp, fa.is_open() ? static_cast<std::istream&>(fa) : empty_a,
                fv.is_open() ? static_cast<std::istream&>(fv) : empty_v,
                fc.is_open() ? static_cast<std::istream&>(fc) : empty_c);
            std::string out = out_path.empty() ? ws.corpus_file().string() : out_path;
            corpus::save_snapshot(c, out);
            corpus::CorpusStats s = corpus::stats(c);
            std::cout << "ingested " << s.n_papers << " papers, " << s.n_authors << " authors, "
                      << s.n_contexts << " contexts -> " << out << "\n";
        } else if (cmd_filter->parsed()) {
            corpus::Corpus c = corpus::filter(load_ws_corpus(ws), filter_delta);
            corpus::save_snapshot(c, ws.corpus_file().string());
            corpus::CorpusStats s = corpus::stats(c);
            std::cout << "filtered corpus: " << s.n_papers << " papers, " << s.n_authors
                      << " authors, " << s.n_contexts << " contexts\n";
        } else if (cmd_graphs->parsed()) {
            corpus::Corpus c = load_ws_corpus(ws);
            int as_of = graphs_as_of > 0 ? graphs_as_of : corpus_horizon(c);
            fs::path out = ws.dir / "graphs";
            fs::create_directories(out);
            graphs::DiGraph cg = graphs::build_citation_graph(c);
            graphs::export_edge_list(cg, (out / "citation_edges.csv").string());
            graphs::CoAuthorGraph ag = graphs::build_coauthorship_graph(c, as_of);
            graphs::export_edge_list(ag, (out / "coauthor_edges.csv").string());
            graphs::export_edge_list(graphs::build_venue_graph(c),
                                     (out / "venue_edges.csv").string());
            graphs::CentralityScores pr = graphs::pagerank(cg);
            std::ofstream os(out / "citation_pagerank.csv", std::ios::trunc);
            os << std::setprecision(17) << "node,score\n";
            for (const auto& node : cg.nodes) os << node << ',' << pr.at(node) << '\n';
            std::cout << "graphs exported to " << out.string() << "\n";
        } else if (cmd_topics->parsed()) {
            corpus::Corpus c = load_ws_corpus(ws);
            topics::TopicModelOptions opts;
            opts.K = topic_k;
            opts.iterations = topic_iterations;
            opts.seed = topics_seed;
            if (topic_cutoff > 0) opts.cutoff_year = topic_cutoff;
            topics::TopicModel m = topics::fit_topic_model(c, opts);
            topics::save_topic_model(m, ws.topics_file().string());
            std::cout << "topic model: K=" << m.K << ", vocabulary " << m.vocab.size()
                      << " words\n";
        } else if (cmd_features->parsed()) {
            corpus::Corpus c = load_ws_corpus(ws);
            if (!fs::exists(ws.topics_file())) {
                throw not_found_error("no topic model in workspace; run topics first");
            }
            topics::TopicModel m = topics::load_topic_model(ws.topics_file().string());
            features::ExtractorOptions opts;
            opts.delta = features_delta;
            features::FeatureExtractor extractor(c, m, ec::fixed_thresholds(), opts);
            features::FeatureMatrix fm;
            for (const auto& id : candidate_ids(c, features_delta)) {
                fm.rows.push_back(extractor.extract(id, reference_year));
            }
            features::export_feature_csv(fm, ws.features_file().string());
            std::cout << "extracted " << fm.rows.size() << " feature vectors\n";
        } else if (cmd_train->parsed()) {
            corpus::Corpus c = load_ws_corpus(ws);
            if (!fs::exists(ws.features_file())) {
                throw not_found_error("no feature matrix in workspace; run features first");
            }
            features::FeatureMatrix fm = features::load_feature_csv(ws.features_file().string());
            study::ExperimentConfig cfg = config_for(train_config, 1);
            int horizon = corpus_horizon(c);
            std::vector<int> slots = study::baseline_features(cfg.baseline);

            TrainMeta meta;
            meta.baseline = cfg.baseline;
            meta.delta = fm.rows.empty() ? cfg.delta : fm.rows.front().delta;
            meta.reference_year = fm.rows.empty() ? 0 : fm.rows.front().reference_year;
            meta.delta_t_list = train_delta_ts;

            std::stringstream ss(train_models);
            std::string tok;
            std::vector<models::ModelKind> kinds;
            while (std::getline(ss, tok, ',')) {
                kinds.push_back(models::model_kind_from_string(tok));
                meta.kinds.push_back(tok);
            }
            for (int dt : train_delta_ts) {
                std::vector<const features::FeatureVector*> rows;
                std::vector<double> y;
                for (const auto& r : fm.rows) {
                    if (r.year > cfg.train_year_max || r.year + dt > horizon) continue;
                    rows.push_back(&r);
                    y.push_back(static_cast<double>(
                        corpus::citations_in_window(c, r.paper_id, r.year, r.year + dt)));
                }
                if (rows.size() < 5) {
                    std::cout << "horizon " << dt << ": fewer than 5 training papers, skipped\n";
                    continue;
                }
                Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                                  static_cast<Eigen::Index>(slots.size()));
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    for (std::size_t j = 0; j < slots.size(); ++j) {
                        X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                            rows[i]->values[static_cast<std::size_t>(slots[j])];
                    }
                }
                Eigen::VectorXd yv =
                    Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
                for (models::ModelKind kind : kinds) {
                    models::TrainedModel model;
                    if (kind == models::ModelKind::SVR) {
                        models::SvrOptions sopt;
                        sopt.gap_tol = std::max(1e-6, 1e-3 * static_cast<double>(X.rows()));
                        sopt.max_iter = 200000;
                        model = models::train_svr(X, yv, sopt);
                    } else if (kind == models::ModelKind::LR) {
                        model = models::train_lr(X, yv);
                    } else if (kind == models::ModelKind::GPR) {
                        model = models::train_gpr(X, yv);
                    } else {
                        model = models::train_cart(X, yv);
                    }
                    models::save_model(model, ws.model_file(kind, dt).string());
                    std::cout << "trained " << models::to_string(kind) << " dt=" << dt << " on "
                              << rows.size() << " papers\n";
                }
            }
            save_meta(ws, meta);
        } else if (cmd_eval->parsed()) {
            corpus::Corpus c = load_ws_corpus(ws);
            study::ExperimentConfig cfg = config_for(eval_config, eval_seed);
            study::EvaluationReport report = study::run_experiment(c, cfg);
            study::export_metrics_csv(report, (ws.dir / "metrics.csv").string());
            study::export_scatter_csv(report, (ws.dir / "scatter").string());
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "evaluation written to " << (ws.dir / "metrics.csv").string() << "\n";
        } else if (cmd_study->parsed()) {
            corpus::Corpus c = load_ws_corpus(ws);
            fs::path out = ws.dir / "study";
            fs::create_directories(out);
            study::EcProperty prop = study::ec_property_from_string(study_property);
            if (study_kind == "correlation" || study_kind == "buckets") {
                ec::InfluenceThresholds t = ec::fixed_thresholds();
                study::CorrelationTable table =
                    study_kind == "correlation"
                        ? study::correlation_study(c, prop, t, {5, 8, 10, 12, 15}, study_delta)
                        : study::bucketed_correlation_study(c, prop, t, {5, 8, 10, 12},
                                                            study_delta);
                std::string name = std::string("correlation_") + study::to_string(prop) +
                                   (study_kind == "buckets" ? "_buckets" : "") + ".csv";
                study::export_correlation_csv(table, (out / name).string());
                std::cout << "study written to " << (out / name).string() << "\n";
            } else if (study_kind == "pairs") {
                auto pairs = study::mine_example_pairs(c, prop, pairs_delta_t,
                                                       ec::fixed_thresholds(), study_delta);
                std::ofstream os(out / "example_pairs.csv", std::ios::trunc);
                os << std::setprecision(17)
                   << "low_id,high_id,ecc,low_property,high_property,low_ltsi,high_ltsi,gap\n";
                for (const auto& p : pairs) {
                    os << p.low_id << ',' << p.high_id << ',' << p.ecc << ',' << p.low_property
                       << ',' << p.high_property << ',' << p.low_ltsi << ',' << p.high_ltsi
                       << ',' << p.ltsi_gap << '\n';
                }
                std::cout << "study written to " << (out / "example_pairs.csv").string() << "\n";
            } else if (study_kind == "delta" || study_kind == "ranking") {
                if (!study_seed.has_value()) {
                    std::cerr << "--seed is required for study --kind " << study_kind << "\n";
                    return 2;
                }
                study::ExperimentConfig cfg = config_for(study_config, *study_seed);
                if (study_kind == "delta") {
                    auto cells = study::delta_sensitivity(c, cfg);
                    study::export_delta_sensitivity_csv(cells,
                                                        (out / "delta_sensitivity.csv").string());
                    std::cout << "study written to " << (out / "delta_sensitivity.csv").string()
                              << "\n";
                } else {
                    auto ranking = study::feature_ranking(c, cfg);
                    study::export_ranking_csv(ranking, (out / "feature_ranking.csv").string());
                    std::cout << "study written to " << (out / "feature_ranking.csv").string()
                              << "\n";
                }
            } else if (study_kind == "crosscorr") {
                if (!fs::exists(ws.features_file())) {
                    throw not_found_error("no feature matrix in workspace; run features first");
                }
                features::FeatureMatrix fm =
                    features::load_feature_csv(ws.features_file().string());
                Eigen::MatrixXd m = study::feature_cross_correlation(fm);
                study::export_cross_correlation_csv(m, (out / "cross_correlation.csv").string());
                std::cout << "study written to " << (out / "cross_correlation.csv").string()
                          << "\n";
            } else {
                std::cerr << "unknown study kind: " << study_kind << "\n";
                return 2;
            }
        } else if (cmd_report->parsed()) {
            corpus::Corpus c = load_ws_corpus(ws);
            json report = build_report(ws, c, report_paper);
            if (report_format.find("json") != std::string::npos) {
                std::ofstream os(ws.dir / "report.json", std::ios::trunc);
                os << report.dump(2) << '\n';
                std::cout << "wrote " << (ws.dir / "report.json").string() << "\n";
            }
            if (report_format.find("html") != std::string::npos) {
                std::ofstream os(ws.dir / "report.html", std::ios::trunc);
                os << render_html(report);
                std::cout << "wrote " << (ws.dir / "report.html").string() << "\n";
            }
        } else if (cmd_synth->parsed()) {
            synth_params.ecc_driven = ecc_driven;
            corpus::Corpus c = study::generate_synthetic_corpus(synth_params, synth_seed);
            corpus::save_snapshot(c, ws.corpus_file().string());
            corpus::CorpusStats s = corpus::stats(c);
            std::cout << "synthetic corpus: " << s.n_papers << " papers, " << s.n_authors
                      << " authors\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
