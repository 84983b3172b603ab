#ifndef CITEIMPACT_MODELS_HPP
#define CITEIMPACT_MODELS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace citeimpact::models {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class ModelKind { LR, GPR, CART, SVR };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct Scaler {
    VectorXd mean;
    VectorXd stddev;  // zero-variance features keep stddev 1 and map to 0

    static Scaler fit(const MatrixXd& X);
    MatrixXd transform(const MatrixXd& X) const;
};

enum class KernelType { RBF, LINEAR };

struct KernelSpec {
    KernelType type = KernelType::RBF;
    double length_scale = 1.0;

    double operator()(const VectorXd& a, const VectorXd& b) const;
    MatrixXd gram(const MatrixXd& A, const MatrixXd& B) const;
};

// Median pairwise training distance; 1 if degenerate.
double median_pairwise_distance(const MatrixXd& X);

struct TreeNode {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    double value = 0.0;  // leaf prediction (training mean)
    int left = -1;
    int right = -1;
};

struct TrainedModel {
    ModelKind kind = ModelKind::LR;
    Scaler scaler;
    bool use_scaler = false;
    std::uint64_t seed = 0;

    // LR
    VectorXd weights;
    double intercept = 0.0;

    // GPR
    MatrixXd train_inputs;
    VectorXd gpr_alpha;
    KernelSpec kernel;
    double sigma = 0.5;

    // CART
    std::vector<TreeNode> tree;
    int max_depth = 10;
    int min_leaf = 5;

    // SVR: beta = alpha - alpha*, over all training rows
    VectorXd svr_beta;
    double svr_bias = 0.0;
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double svr_dual_objective = 0.0;
    double svr_gap = 0.0;
};

TrainedModel train_lr(const MatrixXd& X, const VectorXd& y);

struct GprOptions {
    double sigma = 0.5;
    KernelSpec kernel{KernelType::RBF, -1.0};  // length_scale < 0: median heuristic
};

TrainedModel train_gpr(const MatrixXd& X, const VectorXd& y, const GprOptions& opts = {});

struct CartOptions {
    int max_depth = 10;
    int min_leaf = 5;
};

TrainedModel train_cart(const MatrixXd& X, const VectorXd& y, const CartOptions& opts = {});

struct SvrOptions {
    double c = 1.0;
    double epsilon = 0.1;
    KernelSpec kernel{KernelType::LINEAR, 1.0};
    double gap_tol = 1e-6;
    int max_iter = 2000000;
};

TrainedModel train_svr(const MatrixXd& X, const VectorXd& y, const SvrOptions& opts = {});

struct PredictOptions {
    bool clamp_nonnegative = false;
};

VectorXd predict(const TrainedModel& model, const MatrixXd& X, const PredictOptions& opts = {});

// Both variants of the coefficient of determination: "paper" is the printed
// regression-SS over total-SS form; "standard" is 1 - SSres/SStot.
enum class R2Variant { PAPER, STANDARD };

double r_squared(const VectorXd& y_pred, const VectorXd& y_true, R2Variant variant);

double pearson(const VectorXd& a, const VectorXd& b);

struct Metrics {
    double r2_paper = 0.0;
    double r2_standard = 0.0;
    double rho = 0.0;
    std::int64_t n = 0;
};

Metrics evaluate(const VectorXd& y_pred, const VectorXd& y_true);

void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace citeimpact::models

#endif
