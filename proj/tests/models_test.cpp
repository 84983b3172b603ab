#include <doctest.h>

#include <cmath>
#include <random>

#include "citeimpact/errors.hpp"
#include "citeimpact/models.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace citeimpact;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
    MatrixXd X(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) X(i, j) = 2.0 * unit_draw(rng) - 1.0;
    }
    return X;
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear regression
// ---------------------------------------------------------------------------

TEST_CASE("lr: exact fit of y = 2x + 1") {
    MatrixXd X(5, 1);
    VectorXd y(5);
    for (int i = 0; i < 5; ++i) {
        X(i, 0) = i;
        y(i) = 2.0 * i + 1.0;
    }
    models::TrainedModel m = models::train_lr(X, y);
    CHECK(m.weights(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(m.intercept == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lr: constant target collapses to the mean") {
    // Generic X: with a full-column-rank design the unique least-squares fit
    // to a constant target is the mean with zero weights.
    std::mt19937_64 rng(43);
    MatrixXd X = random_matrix(rng, 6, 2);
    VectorXd y = VectorXd::Constant(6, 7.5);
    models::TrainedModel m = models::train_lr(X, y);
    CHECK(m.weights.norm() < 1e-9);
    CHECK(m.intercept == doctest::Approx(7.5).epsilon(1e-9));
}

TEST_CASE("lr: matches the normal-equations solve on a noisy instance") {
    std::mt19937_64 rng(11);
    MatrixXd X = random_matrix(rng, 5, 2);
    VectorXd y(5);
    for (int i = 0; i < 5; ++i) y(i) = 1.5 * X(i, 0) - 0.7 * X(i, 1) + 0.1 * unit_draw(rng);

    MatrixXd A(5, 3);
    A.leftCols(2) = X;
    A.col(2).setOnes();
    VectorXd sol = (A.transpose() * A).ldlt().solve(A.transpose() * y);

    models::TrainedModel m = models::train_lr(X, y);
    CHECK(std::abs(m.weights(0) - sol(0)) < 1e-8);
    CHECK(std::abs(m.weights(1) - sol(1)) < 1e-8);
    CHECK(std::abs(m.intercept - sol(2)) < 1e-8);
}

TEST_CASE("lr: fewer than two samples is rejected") {
    MatrixXd X(1, 1);
    X << 1.0;
    VectorXd y(1);
    y << 2.0;
    CHECK_THROWS_AS(models::train_lr(X, y), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Gaussian-process regression
// ---------------------------------------------------------------------------

TEST_CASE("gpr: zero noise interpolates the training targets") {
    std::mt19937_64 rng(22);
    MatrixXd X = random_matrix(rng, 8, 2);
    VectorXd y(8);
    for (int i = 0; i < 8; ++i) y(i) = std::sin(X(i, 0)) + X(i, 1);
    models::GprOptions opts;
    opts.sigma = 0.0;
    models::TrainedModel m = models::train_gpr(X, y, opts);
    VectorXd pred = models::predict(m, X);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(pred(i) - y(i)) < 1e-8);
}

TEST_CASE("gpr: two-point model matches the dense 2x2 solve") {
    MatrixXd X(2, 1);
    X << 0.0, 1.0;
    VectorXd y(2);
    y << 1.0, 3.0;
    models::TrainedModel m = models::train_gpr(X, y);  // sigma = 0.5, RBF
    MatrixXd Xtest(3, 1);
    Xtest << 0.0, 0.5, 1.0;
    VectorXd got = models::predict(m, Xtest);
    VectorXd want = oracles::gpr_direct(m.kernel, m.train_inputs, y, m.sigma,
                                        m.scaler.transform(Xtest));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(got(i) - want(i)) < 1e-8);
}

TEST_CASE("gpr: predictions vanish as the noise grows") {
    std::mt19937_64 rng(23);
    MatrixXd X = random_matrix(rng, 6, 2);
    VectorXd y = VectorXd::Constant(6, 5.0);
    models::GprOptions opts;
    opts.sigma = 1e5;
    models::TrainedModel m = models::train_gpr(X, y, opts);
    VectorXd pred = models::predict(m, X);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(pred(i)) < 1e-3);
}

TEST_CASE("gpr: matches direct evaluation on random 10-point sets") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 5; ++trial) {
        MatrixXd X = random_matrix(rng, 10, 3);
        VectorXd y(10);
        for (int i = 0; i < 10; ++i) y(i) = X.row(i).sum() + 0.5 * unit_draw(rng);
        models::TrainedModel m = models::train_gpr(X, y);
        MatrixXd Xtest = random_matrix(rng, 4, 3);
        VectorXd got = models::predict(m, Xtest);
        VectorXd want = oracles::gpr_direct(m.kernel, m.train_inputs, y, m.sigma,
                                            m.scaler.transform(Xtest));
        for (int i = 0; i < 4; ++i) CHECK(std::abs(got(i) - want(i)) < 1e-8);
    }
}

// ---------------------------------------------------------------------------
// Regression tree
// ---------------------------------------------------------------------------

TEST_CASE("cart: depth zero is a single leaf predicting the global mean") {
    MatrixXd X(6, 1);
    VectorXd y(6);
    for (int i = 0; i < 6; ++i) {
        X(i, 0) = i;
        y(i) = i * i;
    }
    models::TrainedModel m = models::train_cart(X, y, {0, 1});
    REQUIRE(m.tree.size() == 1);
    CHECK(m.tree[0].feature == -1);
    CHECK(m.tree[0].value == doctest::Approx(y.mean()));
}

TEST_CASE("cart: step data splits at the step with zero training error") {
    MatrixXd X(6, 1);
    X << -2.0, -1.0, -0.5, 0.0, 1.0, 2.0;
    VectorXd y(6);
    y << 0.0, 0.0, 0.0, 10.0, 10.0, 10.0;
    models::TrainedModel m = models::train_cart(X, y, {10, 1});
    REQUIRE(m.tree.size() == 3);
    CHECK(m.tree[0].feature == 0);
    CHECK(m.tree[0].threshold == doctest::Approx(-0.25));
    VectorXd pred = models::predict(m, X);
    CHECK((pred - y).norm() == doctest::Approx(0.0));
}

TEST_CASE("cart: root split equals the exhaustive-enumeration choice") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 6 + static_cast<int>(rng() % 5);
        MatrixXd X = random_matrix(rng, n, 2);
        VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = 3.0 * X(i, 0) + unit_draw(rng);
        for (int min_leaf : {1, 2}) {
            models::TrainedModel m = models::train_cart(X, y, {1, min_leaf});
            oracles::CartSplit want = oracles::cart_best_split(X, y, min_leaf);
            REQUIRE_FALSE(m.tree.empty());
            CHECK(m.tree[0].feature == want.feature);
            if (want.feature >= 0) {
                CHECK(m.tree[0].threshold == doctest::Approx(want.threshold).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("cart: training error is monotone nonincreasing in depth") {
    std::mt19937_64 rng(34);
    MatrixXd X = random_matrix(rng, 40, 3);
    VectorXd y(40);
    for (int i = 0; i < 40; ++i) y(i) = X(i, 0) * X(i, 1) + 0.2 * unit_draw(rng);
    double prev = std::numeric_limits<double>::infinity();
    for (int depth = 0; depth <= 6; ++depth) {
        models::TrainedModel m = models::train_cart(X, y, {depth, 2});
        double sse = (models::predict(m, X) - y).squaredNorm();
        CHECK(sse <= prev + 1e-9);
        prev = sse;
    }
}

// ---------------------------------------------------------------------------
// Support-vector regression
// ---------------------------------------------------------------------------

TEST_CASE("svr: recovers the slope of y = 3x inside the epsilon tube") {
    MatrixXd X(21, 1);
    VectorXd y(21);
    for (int i = 0; i <= 20; ++i) {
        X(i, 0) = i / 20.0;
        y(i) = 3.0 * X(i, 0);
    }
    models::TrainedModel m = models::train_svr(X, y);
    MatrixXd probe(2, 1);
    probe << 0.0, 1.0;
    VectorXd pred = models::predict(m, probe);
    double slope = pred(1) - pred(0);
    // The flattest line whose residuals stay inside the insensitive tube has
    // slope 3 - 2*epsilon = 2.8; anything in [2.8, 3] is loss-free.
    CHECK(slope >= 2.8 - 0.05);
    CHECK(slope <= 3.0 + 0.05);
}

TEST_CASE("svr: constant targets give a flat model at that value") {
    std::mt19937_64 rng(44);
    MatrixXd X = random_matrix(rng, 10, 2);
    VectorXd y = VectorXd::Constant(10, 4.25);
    models::TrainedModel m = models::train_svr(X, y);
    CHECK(m.svr_beta.norm() == doctest::Approx(0.0));
    CHECK(m.svr_bias == doctest::Approx(4.25).epsilon(1e-9));
    VectorXd pred = models::predict(m, X);
    for (int i = 0; i < 10; ++i) CHECK(pred(i) == doctest::Approx(4.25).epsilon(1e-9));
}

TEST_CASE("svr: agrees with a quadratic-programming reference solve") {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 3; ++trial) {
        MatrixXd X = random_matrix(rng, 20, 3);
        VectorXd y(20);
        for (int i = 0; i < 20; ++i) {
            y(i) = 1.2 * X(i, 0) - 0.4 * X(i, 1) + 0.3 * X(i, 2) + 0.05 * unit_draw(rng);
        }
        models::TrainedModel m = models::train_svr(X, y);
        MatrixXd K = m.kernel.gram(m.train_inputs, m.train_inputs);
        oracles::SvrSolution ref = oracles::svr_qp(K, y, m.svr_c, m.svr_epsilon);
        CHECK(std::abs(m.svr_dual_objective - ref.dual) <=
              1e-4 * std::max(1.0, std::abs(ref.dual)));
        VectorXd got = models::predict(m, X);
        VectorXd want = K * ref.beta + VectorXd::Constant(20, ref.bias);
        for (int i = 0; i < 20; ++i) CHECK(std::abs(got(i) - want(i)) < 1e-3);
    }
}

TEST_CASE("svr: reported duality gap is within tolerance") {
    std::mt19937_64 rng(46);
    MatrixXd X = random_matrix(rng, 25, 2);
    VectorXd y(25);
    for (int i = 0; i < 25; ++i) y(i) = X(i, 0) + 0.1 * unit_draw(rng);
    models::TrainedModel m = models::train_svr(X, y);
    CHECK(m.svr_gap <= 1e-5);
}

// ---------------------------------------------------------------------------
// Prediction plumbing
// ---------------------------------------------------------------------------

TEST_CASE("predict: dimension mismatch and clamping") {
    MatrixXd X(5, 2);
    VectorXd y(5);
    std::mt19937_64 rng(55);
    X = random_matrix(rng, 5, 2);
    for (int i = 0; i < 5; ++i) y(i) = X(i, 0) - 5.0;
    models::TrainedModel m = models::train_lr(X, y);

    MatrixXd wrong(2, 3);
    wrong.setZero();
    CHECK_THROWS_AS(models::predict(m, wrong), std::invalid_argument);

    models::PredictOptions clamp;
    clamp.clamp_nonnegative = true;
    VectorXd clamped = models::predict(m, X, clamp);
    for (int i = 0; i < 5; ++i) CHECK(clamped(i) >= 0.0);
}

TEST_CASE("scaler: zero-variance features map to zero") {
    MatrixXd X(4, 2);
    X << 1, 7, 2, 7, 3, 7, 4, 7;
    models::Scaler s = models::Scaler::fit(X);
    CHECK(s.stddev(1) == 1.0);
    MatrixXd Z = s.transform(X);
    for (int i = 0; i < 4; ++i) CHECK(Z(i, 1) == 0.0);
    CHECK(std::abs(Z.col(0).mean()) < 1e-12);
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

TEST_CASE("r_squared: hand-computed values for both variants") {
    VectorXd t(3), p(3);
    t << 1, 2, 3;

    p = t;
    CHECK(models::r_squared(p, t, models::R2Variant::PAPER) == doctest::Approx(1.0));
    CHECK(models::r_squared(p, t, models::R2Variant::STANDARD) == doctest::Approx(1.0));

    p = VectorXd::Constant(3, t.mean());
    CHECK(models::r_squared(p, t, models::R2Variant::PAPER) == doctest::Approx(0.0));
    CHECK(models::r_squared(p, t, models::R2Variant::STANDARD) == doctest::Approx(0.0));

    p << 1, 2, 4;
    // mean(t) = 2, SStot = 2; regression SS = 1 + 0 + 4 = 5; SSres = 1.
    CHECK(models::r_squared(p, t, models::R2Variant::PAPER) == doctest::Approx(2.5));
    CHECK(models::r_squared(p, t, models::R2Variant::STANDARD) == doctest::Approx(0.5));

    VectorXd flat = VectorXd::Constant(3, 2.0);
    CHECK_THROWS_AS(models::r_squared(p, flat, models::R2Variant::PAPER),
                    undefined_metric_error);
}

TEST_CASE("r_squared: both variants coincide for in-sample least squares") {
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 10 + static_cast<int>(rng() % 40);
        MatrixXd X = random_matrix(rng, n, 3);
        VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            y(i) = X(i, 0) - 2.0 * X(i, 2) + 0.5 * unit_draw(rng);
        }
        models::TrainedModel m = models::train_lr(X, y);
        VectorXd pred = models::predict(m, X);
        double paper = models::r_squared(pred, y, models::R2Variant::PAPER);
        double standard = models::r_squared(pred, y, models::R2Variant::STANDARD);
        CHECK(std::abs(paper - standard) < 1e-9);
    }
}

TEST_CASE("pearson: symmetry, affine invariance, sign flip") {
    VectorXd a(4), b(4);
    a << 1, 2, 3, 4;
    b << 2, 1, 4, 3;
    CHECK(models::pearson(a, a) == doctest::Approx(1.0));
    CHECK(models::pearson(a, -a) == doctest::Approx(-1.0));
    CHECK(models::pearson(a, b) == doctest::Approx(models::pearson(b, a)));
    VectorXd scaled = (3.0 * b.array() + 11.0).matrix();
    CHECK(models::pearson(a, scaled) == doctest::Approx(models::pearson(a, b)).epsilon(1e-12));
    CHECK(models::pearson(a, -b) == doctest::Approx(-models::pearson(a, b)).epsilon(1e-12));
    VectorXd flat = VectorXd::Constant(4, 1.0);
    CHECK_THROWS_AS(models::pearson(a, flat), undefined_metric_error);
    CHECK(models::pearson(a, b) >= -1.0);
    CHECK(models::pearson(a, b) <= 1.0);
}

TEST_CASE("evaluate: bundles both variants and the correlation") {
    VectorXd t(3), p(3);
    t << 1, 2, 3;
    p << 1, 2, 4;
    models::Metrics m = models::evaluate(p, t);
    CHECK(m.n == 3);
    CHECK(m.r2_paper == doctest::Approx(2.5));
    CHECK(m.r2_standard == doctest::Approx(0.5));
    CHECK(m.rho == doctest::Approx(models::pearson(p, t)));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

TEST_CASE("model save/load: round trip reproduces predictions bitwise") {
    fixtures::TempDir tmp("models_io");
    std::mt19937_64 rng(77);
    MatrixXd X = random_matrix(rng, 15, 3);
    VectorXd y(15);
    for (int i = 0; i < 15; ++i) y(i) = 2.0 * X(i, 1) + unit_draw(rng);
    MatrixXd Xtest = random_matrix(rng, 6, 3);

    std::vector<models::TrainedModel> trained;
    trained.push_back(models::train_lr(X, y));
    trained.push_back(models::train_gpr(X, y));
    trained.push_back(models::train_cart(X, y, {4, 2}));
    trained.push_back(models::train_svr(X, y));

    for (const auto& m : trained) {
        std::string path = tmp.path(models::to_string(m.kind) + ".bin");
        models::save_model(m, path);
        models::TrainedModel r = models::load_model(path);
        CHECK(r.kind == m.kind);
        VectorXd p0 = models::predict(m, Xtest);
        VectorXd p1 = models::predict(r, Xtest);
        for (int i = 0; i < 6; ++i) CHECK(p0(i) == p1(i));  // bitwise
    }

    CHECK_THROWS_AS(models::load_model(tmp.path("missing.bin")), parse_error);
}

TEST_CASE("model kind names round trip") {
    for (auto k : {models::ModelKind::LR, models::ModelKind::GPR, models::ModelKind::CART,
                   models::ModelKind::SVR}) {
        CHECK(models::model_kind_from_string(models::to_string(k)) == k);
    }
    CHECK_THROWS_AS(models::model_kind_from_string("nope"), std::invalid_argument);
}
