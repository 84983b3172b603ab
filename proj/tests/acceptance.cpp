// Acceptance checks: one pass/fail line per criterion, nonzero exit on any
// failure. Each check is self-contained and seeded.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "citeimpact/corpus.hpp"
#include "citeimpact/earlyciters.hpp"
#include "citeimpact/features.hpp"
#include "citeimpact/graphs.hpp"
#include "citeimpact/models.hpp"
#include "citeimpact/study.hpp"
#include "citeimpact/topics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace citeimpact;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

void report_skip(const std::string& name, const std::string& why) {
    std::cout << "[SKIP] " << name << " (" << why << ")" << std::endl;
}

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

MatrixXd random_matrix(std::mt19937_64& rng, int n, int d) {
    MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) X(i, j) = 4.0 * unit_draw(rng) - 2.0;
    }
    return X;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void check_pagerank() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        graphs::DiGraph g;
        int n = 2 + static_cast<int>(rng() % 49);
        for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(i));
        int edges = static_cast<int>(rng() % static_cast<std::uint64_t>(3 * n + 1));
        for (int e = 0; e < edges; ++e) {
            int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
            g.add_edge(g.nodes[u], g.nodes[v], 1.0 + static_cast<double>(rng() % 4));
        }
        graphs::CentralityScores s = graphs::pagerank(g);
        VectorXd x = oracles::pagerank_dense(n, g.out_edges, 0.85);
        for (int i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(s.at(g.nodes[i]) - x(i)));
        }
    }
    double elapsed = seconds_since(t0);
    std::ostringstream detail;
    detail << "50 graphs, max |err| " << worst << ", " << elapsed << " s";
    report("pagerank matches dense stationary solve", worst <= 1e-8 && elapsed < 5.0,
           detail.str());
}

void check_gpr() {
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        MatrixXd X = random_matrix(rng, 10, 3);
        VectorXd y(10);
        for (int i = 0; i < 10; ++i) y(i) = std::sin(X(i, 0)) + 0.5 * X(i, 1) + unit_draw(rng);
        models::TrainedModel m = models::train_gpr(X, y);
        MatrixXd Xtest = random_matrix(rng, 5, 3);
        VectorXd got = models::predict(m, Xtest);
        VectorXd want = oracles::gpr_direct(m.kernel, m.train_inputs, y, m.sigma,
                                            m.scaler.transform(Xtest));
        worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
    }
    bool ok = worst <= 1e-8;

    // Noise-free training: the posterior mean interpolates the targets.
    double interp_worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        MatrixXd X = random_matrix(rng, 8, 2);
        VectorXd y(8);
        for (int i = 0; i < 8; ++i) y(i) = X(i, 0) * X(i, 1) + unit_draw(rng);
        models::GprOptions opts;
        opts.sigma = 0.0;
        models::TrainedModel m = models::train_gpr(X, y, opts);
        VectorXd back = models::predict(m, X);
        interp_worst = std::max(interp_worst, (back - y).cwiseAbs().maxCoeff());
    }
    std::ostringstream detail;
    detail << "max |err| " << worst << ", interpolation " << interp_worst;
    report("gpr matches direct kernel solve and interpolates at sigma=0",
           ok && interp_worst <= 1e-8, detail.str());
}

void check_svr() {
    std::mt19937_64 rng(303);
    double worst_dual = 0.0, worst_pred = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        MatrixXd X = random_matrix(rng, 20, 2);
        VectorXd y(20);
        for (int i = 0; i < 20; ++i) {
            y(i) = 1.5 * X(i, 0) - 0.7 * X(i, 1) + 0.3 + 0.05 * (unit_draw(rng) - 0.5);
        }
        models::TrainedModel m = models::train_svr(X, y);
        MatrixXd K = m.kernel.gram(m.train_inputs, m.train_inputs);
        oracles::SvrSolution ref = oracles::svr_qp(K, y, m.svr_c, m.svr_epsilon);
        double rel = std::abs(m.svr_dual_objective - ref.dual) /
                     std::max(1.0, std::abs(ref.dual));
        worst_dual = std::max(worst_dual, rel);

        MatrixXd Xtest = random_matrix(rng, 6, 2);
        VectorXd got = models::predict(m, Xtest);
        VectorXd want = m.kernel.gram(m.scaler.transform(Xtest), m.train_inputs) * ref.beta +
                        VectorXd::Constant(6, ref.bias);
        worst_pred = std::max(worst_pred, (got - want).cwiseAbs().maxCoeff());
    }
    std::ostringstream detail;
    detail << "max dual rel err " << worst_dual << ", max pred err " << worst_pred;
    report("svr matches the reference quadratic-programming solve",
           worst_dual <= 1e-4 && worst_pred <= 1e-3, detail.str());
}

void check_cart() {
    std::mt19937_64 rng(404);
    bool ok = true;
    std::string detail = "200 fixtures, n <= 10";
    for (int trial = 0; trial < 200 && ok; ++trial) {
        int n = 2 + static_cast<int>(rng() % 9);
        int d = 1 + static_cast<int>(rng() % 3);
        MatrixXd X = random_matrix(rng, n, d);
        VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = std::round(4.0 * unit_draw(rng));
        models::CartOptions opts;
        opts.min_leaf = 1;
        models::TrainedModel m = models::train_cart(X, y, opts);
        oracles::CartSplit ref = oracles::cart_best_split(X, y, opts.min_leaf);
        const models::TreeNode& root = m.tree[0];
        if (root.feature != ref.feature) {
            ok = false;
            detail = "root feature mismatch at trial " + std::to_string(trial);
        } else if (ref.feature >= 0 && std::abs(root.threshold - ref.threshold) > 1e-12) {
            ok = false;
            detail = "root threshold mismatch at trial " + std::to_string(trial);
        }
    }
    report("cart root split equals exhaustive enumeration", ok, detail);
}

void check_lr_identity() {
    std::mt19937_64 rng(505);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 5 + static_cast<int>(rng() % 36);
        int d = 1 + static_cast<int>(rng() % 5);
        MatrixXd X = random_matrix(rng, n, d);
        VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = X.row(i).sum() + 2.0 * unit_draw(rng);
        models::TrainedModel m = models::train_lr(X, y);
        VectorXd pred = models::predict(m, X);
        double paper = models::r_squared(pred, y, models::R2Variant::PAPER);
        double standard = models::r_squared(pred, y, models::R2Variant::STANDARD);
        worst = std::max(worst, std::abs(paper - standard));
    }
    std::ostringstream detail;
    detail << "100 instances, max |diff| " << worst;
    report("lr in-sample r-squared variants coincide", worst <= 1e-9, detail.str());
}

// Random corpus with ~100 candidate papers, plus a variant with extra events
// strictly after T + delta.
void check_leakage() {
    std::mt19937_64 rng(606);
    std::vector<fixtures::Paper> base;
    std::vector<std::string> venues = {"VA", "VB", "VC"};
    for (int i = 0; i < 120; ++i) {
        fixtures::Paper p;
        p.id = "base" + std::to_string(i);
        p.year = 1990 + static_cast<int>(rng() % 10);
        p.authors = {"w" + std::to_string(rng() % 60)};
        if (i > 0 && rng() % 2 == 0) p.refs.push_back("base" + std::to_string(rng() % i));
        p.venue = venues[rng() % venues.size()];
        base.push_back(p);
    }
    std::vector<std::string> candidates;
    for (int i = 0; i < 100; ++i) {
        fixtures::Paper p;
        p.id = "cand" + std::to_string(i);
        p.year = 2000;
        p.authors = {"w" + std::to_string(rng() % 60)};
        p.refs = {"base" + std::to_string(rng() % 120)};
        p.venue = venues[rng() % venues.size()];
        base.push_back(p);
        candidates.push_back(p.id);
        int n_citers = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < n_citers; ++k) {
            fixtures::Paper q;
            q.id = p.id + "_c" + std::to_string(k);
            q.year = 2001 + static_cast<int>(rng() % 2);
            q.authors = {"w" + std::to_string(rng() % 60)};
            q.refs = {p.id};
            q.venue = venues[rng() % venues.size()];
            base.push_back(q);
        }
    }
    std::vector<fixtures::Paper> perturbed = base;
    for (int i = 0; i < 60; ++i) {
        fixtures::Paper late;
        late.id = "late" + std::to_string(i);
        late.year = 2005 + static_cast<int>(rng() % 6);
        late.authors = {"w" + std::to_string(rng() % 60), "new" + std::to_string(i)};
        late.refs = {"cand" + std::to_string(rng() % 100), "base" + std::to_string(rng() % 120)};
        late.venue = venues[rng() % venues.size()];
        perturbed.push_back(late);
    }

    corpus::Corpus before = fixtures::make_corpus(base);
    corpus::Corpus after = fixtures::make_corpus(perturbed);
    topics::TopicModelOptions topt;
    topt.K = 4;
    topt.iterations = 40;
    topt.min_doc_freq = 1;
    topt.seed = 11;
    topics::TopicModel model = topics::fit_topic_model(before, topt);

    features::FeatureExtractor ex1(before, model, ec::fixed_thresholds());
    features::FeatureExtractor ex2(after, model, ec::fixed_thresholds());
    bool ok = true;
    for (const auto& id : candidates) {
        features::FeatureVector a = ex1.extract(id, 2002);
        features::FeatureVector b = ex2.extract(id, 2002);
        for (int s = 0; s < features::kSlotCount && ok; ++s) {
            if (a.values[s] != b.values[s]) ok = false;
        }
        if (!ok) break;
    }

    // At-publication slots under truncation at T.
    std::vector<fixtures::Paper> truncated_papers;
    for (const auto& p : base) {
        if (p.year <= 2000) truncated_papers.push_back(p);
    }
    corpus::Corpus truncated = fixtures::make_corpus(truncated_papers);
    features::FeatureExtractor ex3(truncated, model, ec::fixed_thresholds());
    bool trunc_ok = true;
    for (const auto& id : candidates) {
        double p1[3], p2[3], a1[8], a2[8], v1[4], v2[4];
        ex1.paper_features(id, 2000, &p1[0], &p1[1], &p1[2]);
        ex3.paper_features(id, 2000, &p2[0], &p2[1], &p2[2]);
        ex1.author_features(id, 2000, a1);
        ex3.author_features(id, 2000, a2);
        ex1.venue_features(id, 2000, v1);
        ex3.venue_features(id, 2000, v2);
        for (int i = 0; i < 3; ++i) trunc_ok = trunc_ok && p1[i] == p2[i];
        for (int i = 0; i < 8; ++i) trunc_ok = trunc_ok && a1[i] == a2[i];
        for (int i = 0; i < 4; ++i) trunc_ok = trunc_ok && v1[i] == v2[i];
        if (!trunc_ok) break;
    }
    report("feature vectors ignore events after the early window", ok && trunc_ok,
           "100 papers, bitwise");
}

void check_sign_reproduction() {
    auto t0 = std::chrono::steady_clock::now();
    study::SynthParams params;
    params.n_papers = 5000;
    params.stealing_strength = 0.5;
    corpus::Corpus c = study::generate_synthetic_corpus(params, 42);
    std::vector<int> horizons = {5, 8, 10, 12};
    study::CorrelationTable t =
        study::correlation_study(c, study::EcProperty::PC, ec::fixed_thresholds(), horizons);
    bool ok = true;
    std::ostringstream detail;
    for (int dt : horizons) {
        double rho_inf = 0.0, rho_non = 0.0;
        for (const auto& r : t.rows) {
            if (r.delta_t != dt || r.insufficient || r.undefined) continue;
            (r.influential ? rho_inf : rho_non) = r.rho;
        }
        detail << "dt" << dt << ": " << rho_inf << "/" << rho_non << " ";
        if (!(rho_inf < 0.0 && rho_non > 0.0)) ok = false;
    }

    study::CorrelationTable buckets = study::bucketed_correlation_study(
        c, study::EcProperty::PC, ec::fixed_thresholds(), horizons);
    for (int dt : horizons) {
        double rho[3] = {0.0, 0.0, 0.0};
        for (const auto& r : buckets.rows) {
            if (r.delta_t == dt && r.influential && !r.insufficient && !r.undefined &&
                r.bucket >= 0) {
                rho[r.bucket] = r.rho;
            }
        }
        if (!(rho[1] < rho[0] && rho[1] < rho[2])) ok = false;
    }
    double elapsed = seconds_since(t0);
    detail << elapsed << " s";
    report("influence signs and bucket ordering on the seeded corpus", ok && elapsed < 60.0,
           detail.str());
}

void check_feature_ranking() {
    study::SynthParams params;
    params.n_papers = 1200;
    params.ecc_driven = true;
    corpus::Corpus c = study::generate_synthetic_corpus(params, 6);
    study::ExperimentConfig cfg;
    cfg.train_size = 300;
    cfg.test_size = 300;
    cfg.seed = 6;
    cfg.topic_k = 4;
    cfg.topic_iterations = 40;
    auto ranking = study::feature_ranking(c, cfg, 3);
    bool ok = !ranking.empty() && ranking[0].slot == features::ECC;
    std::ostringstream detail;
    if (!ranking.empty()) detail << "top: " << ranking[0].name << " rho " << ranking[0].rho;
    report("early citation count ranks first on count-driven targets", ok, detail.str());
}

void check_full_data() {
    std::filesystem::path root = "data/full";
    if (!std::filesystem::exists(root / "papers.jsonl")) {
        report_skip("full-data reproduction suite",
                    "released dataset not present under data/full/");
        return;
    }
    std::ifstream fp(root / "papers.jsonl"), fa(root / "authors.jsonl"),
        fv(root / "venues.jsonl"), fc(root / "contexts.jsonl");
    std::istringstream ea, ev, ec_;
    corpus::Corpus c = corpus::ingest(fp, fa.is_open() ? static_cast<std::istream&>(fa) : ea,
                                      fv.is_open() ? static_cast<std::istream&>(fv) : ev,
                                      fc.is_open() ? static_cast<std::istream&>(fc) : ec_);
    c = corpus::filter(c, 2);
    corpus::CorpusStats s = corpus::stats(c);
    bool counts_ok = s.n_papers == 949336 && s.n_authors == 535543 && s.n_contexts == 11532780;
    std::ostringstream detail;
    detail << s.n_papers << " papers, " << s.n_authors << " authors, " << s.n_contexts
           << " contexts";
    report("full-data filtered-corpus counts", counts_ok, detail.str());

    study::ExperimentConfig cfg;
    cfg.delta_t_list = {3};
    cfg.model_kinds = {models::ModelKind::SVR};
    cfg.seed = 42;
    study::EvaluationReport r = study::run_experiment(c, cfg);
    bool svr_ok = false;
    std::ostringstream svr_detail;
    for (const auto& cell : r.cells) {
        if (cell.kind == models::ModelKind::SVR && cell.delta_t == 3) {
            svr_ok = std::abs(cell.rho_mean - 0.971) <= 0.05 &&
                     std::abs(cell.r2_paper_mean - 0.841) <= 0.05;
            svr_detail << "rho " << cell.rho_mean << ", r2 " << cell.r2_paper_mean;
        }
    }
    report("full-data svr metrics at the 3-year horizon", svr_ok, svr_detail.str());
}

void check_determinism() {
    fixtures::TempDir tmp("acceptance_det");
    study::SynthParams params;
    params.n_papers = 800;
    for (int round = 0; round < 2; ++round) {
        corpus::Corpus c = study::generate_synthetic_corpus(params, 7);
        corpus::save_snapshot(c, tmp.path("snap" + std::to_string(round) + ".bin"));
        study::CorrelationTable t =
            study::correlation_study(c, study::EcProperty::PC, ec::fixed_thresholds(), {5, 8});
        study::export_correlation_csv(t, tmp.path("corr" + std::to_string(round) + ".csv"));
    }
    bool ok = fixtures::read_file(tmp.path("snap0.bin")) ==
                  fixtures::read_file(tmp.path("snap1.bin")) &&
              fixtures::read_file(tmp.path("corr0.csv")) ==
                  fixtures::read_file(tmp.path("corr1.csv"));
    report("seeded reruns give bitwise-identical outputs", ok, "snapshot + correlation csv");
}

void check_end_to_end() {
    auto t0 = std::chrono::steady_clock::now();
    fixtures::TempDir tmp("acceptance_e2e");
    study::SynthParams params;
    params.n_papers = 1000;
    corpus::Corpus c = study::generate_synthetic_corpus(params, 1);
    c = corpus::filter(c, 2);

    graphs::DiGraph cg = graphs::build_citation_graph(c);
    graphs::export_edge_list(cg, tmp.path("citation_edges.csv"));
    graphs::pagerank(cg);

    topics::TopicModelOptions topt;
    topt.K = 10;
    topt.iterations = 60;
    topt.min_doc_freq = 1;
    topt.seed = 2;
    topics::TopicModel model = topics::fit_topic_model(c, topt);

    features::FeatureExtractor ex(c, model, ec::fixed_thresholds());
    features::FeatureMatrix fm;
    for (const auto& p : c.papers) {
        if (ec::ecc(c, p.id, 2) >= 1) fm.rows.push_back(ex.extract(p.id, 1997));
    }
    features::export_feature_csv(fm, tmp.path("features.csv"));

    study::ExperimentConfig cfg;
    cfg.train_size = 300;
    cfg.test_size = 300;
    cfg.n_test_samples = 2;
    cfg.delta_t_list = {3, 5};
    cfg.seed = 3;
    cfg.topic_k = 10;
    cfg.topic_iterations = 60;
    study::EvaluationReport r = study::run_experiment(c, cfg);  // all four model kinds
    study::export_metrics_csv(r, tmp.path("metrics.csv"));

    double elapsed = seconds_since(t0);
    bool ok = elapsed <= 60.0 && !fm.rows.empty() && r.cells.size() == 8;
    std::ostringstream detail;
    detail << fm.rows.size() << " feature rows, " << r.cells.size() << " model cells, "
           << elapsed << " s";
    report("end-to-end pipeline at the thousand-paper scale", ok, detail.str());
}

}  // namespace

int main() {
    check_pagerank();
    check_gpr();
    check_svr();
    check_cart();
    check_lr_identity();
    check_leakage();
    check_sign_reproduction();
    check_feature_ranking();
    check_full_data();
    check_determinism();
    check_end_to_end();
    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria satisfied" << std::endl;
    return 0;
}
