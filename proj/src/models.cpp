#include "citeimpact/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "citeimpact/errors.hpp"

namespace citeimpact::models {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::LR:
            return "lr";
        case ModelKind::GPR:
            return "gpr";
        case ModelKind::CART:
            return "cart";
        case ModelKind::SVR:
            return "svr";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "lr") return ModelKind::LR;
    if (s == "gpr") return ModelKind::GPR;
    if (s == "cart") return ModelKind::CART;
    if (s == "svr") return ModelKind::SVR;
    throw std::invalid_argument("unknown model kind: " + s);
}

Scaler Scaler::fit(const MatrixXd& X) {
    Scaler s;
    s.mean = X.colwise().mean();
    s.stddev = VectorXd::Ones(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double var = (X.col(j).array() - s.mean(j)).square().mean();
        double sd = std::sqrt(var);
        if (sd > 0.0) s.stddev(j) = sd;
    }
    return s;
}

MatrixXd Scaler::transform(const MatrixXd& X) const {
    if (X.cols() != mean.size()) {
        throw std::invalid_argument("scaler: feature count mismatch");
    }
    return (X.rowwise() - mean.transpose()).array().rowwise() /
           stddev.transpose().array();
}

double KernelSpec::operator()(const VectorXd& a, const VectorXd& b) const {
    if (type == KernelType::LINEAR) return a.dot(b);
    double d2 = (a - b).squaredNorm();
    return std::exp(-d2 / (2.0 * length_scale * length_scale));
}

MatrixXd KernelSpec::gram(const MatrixXd& A, const MatrixXd& B) const {
    MatrixXd K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            K(i, j) = (*this)(A.row(i).transpose(), B.row(j).transpose());
        }
    }
    return K;
}

double median_pairwise_distance(const MatrixXd& X) {
    Eigen::Index n = std::min<Eigen::Index>(X.rows(), 500);
    std::vector<double> d;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d.push_back((X.row(i) - X.row(j)).norm());
        }
    }
    if (d.empty()) return 1.0;
    std::sort(d.begin(), d.end());
    double m = d[d.size() / 2];
    return m > 0.0 ? m : 1.0;
}

TrainedModel train_lr(const MatrixXd& X, const VectorXd& y) {
    if (X.rows() != y.size() || X.rows() < 2) {
        throw std::invalid_argument("train_lr: need at least 2 samples");
    }
    MatrixXd A(X.rows(), X.cols() + 1);
    A.leftCols(X.cols()) = X;
    A.col(X.cols()).setOnes();
    // Minimum-norm solution for rank-deficient systems.
    VectorXd sol = A.completeOrthogonalDecomposition().solve(y);
    TrainedModel m;
    m.kind = ModelKind::LR;
    m.weights = sol.head(X.cols());
    m.intercept = sol(X.cols());
    return m;
}

TrainedModel train_gpr(const MatrixXd& X, const VectorXd& y, const GprOptions& opts) {
    if (X.rows() != y.size() || X.rows() < 1) {
        throw std::invalid_argument("train_gpr: bad shapes");
    }
    TrainedModel m;
    m.kind = ModelKind::GPR;
    m.use_scaler = true;
    m.scaler = Scaler::fit(X);
    m.train_inputs = m.scaler.transform(X);
    m.sigma = opts.sigma;
    m.kernel = opts.kernel;
    if (m.kernel.type == KernelType::RBF && m.kernel.length_scale <= 0.0) {
        m.kernel.length_scale = median_pairwise_distance(m.train_inputs);
    }
    MatrixXd K = m.kernel.gram(m.train_inputs, m.train_inputs);
    K.diagonal().array() += opts.sigma * opts.sigma;
    double jitter = 0.0;
    for (int attempt = 0;; ++attempt) {
        Eigen::LLT<MatrixXd> llt(K);
        if (llt.info() == Eigen::Success) {
            m.gpr_alpha = llt.solve(y);
            return m;
        }
        if (attempt >= 3) {
            throw non_convergence_error("train_gpr: factorization failed after jitter retries");
        }
        jitter += 1e-8;
        K.diagonal().array() += 1e-8;
    }
}

// ---------------------------------------------------------------------------
// CART
// ---------------------------------------------------------------------------

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

SplitChoice best_split(const MatrixXd& X, const VectorXd& y, const std::vector<int>& idx,
                       int min_leaf) {
    SplitChoice best;
    int n = static_cast<int>(idx.size());
    double sum = 0.0, sq = 0.0;
    for (int i : idx) {
        sum += y(i);
        sq += y(i) * y(i);
    }
    double parent_sse = sq - sum * sum / n;

    std::vector<int> order(idx);
    for (int j = 0; j < X.cols(); ++j) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return X(a, j) != X(b, j) ? X(a, j) < X(b, j) : a < b;
        });
        double lsum = 0.0, lsq = 0.0;
        for (int k = 0; k < n - 1; ++k) {
            int i = order[k];
            lsum += y(i);
            lsq += y(i) * y(i);
            if (X(order[k], j) == X(order[k + 1], j)) continue;
            int nl = k + 1, nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            double rsum = sum - lsum, rsq = sq - lsq;
            double sse = (lsq - lsum * lsum / nl) + (rsq - rsum * rsum / nr);
            double gain = parent_sse - sse;
            double threshold = (X(order[k], j) + X(order[k + 1], j)) / 2.0;
            if (gain > best.gain + 1e-12 ||
                (std::abs(gain - best.gain) <= 1e-12 && best.feature != -1 &&
                 (j < best.feature || (j == best.feature && threshold < best.threshold)))) {
                best.feature = j;
                best.threshold = threshold;
                best.gain = gain;
            }
        }
    }
    return best;
}

int grow_tree(const MatrixXd& X, const VectorXd& y, std::vector<int> idx, int depth,
              const CartOptions& opts, std::vector<TreeNode>& nodes) {
    TreeNode node;
    double mean = 0.0;
    for (int i : idx) mean += y(i);
    mean /= static_cast<double>(idx.size());
    node.value = mean;

    if (depth < opts.max_depth && static_cast<int>(idx.size()) >= 2 * opts.min_leaf) {
        SplitChoice split = best_split(X, y, idx, opts.min_leaf);
        if (split.feature >= 0 && split.gain > 1e-12) {
            std::vector<int> left, right;
            for (int i : idx) {
                (X(i, split.feature) <= split.threshold ? left : right).push_back(i);
            }
            node.feature = split.feature;
            node.threshold = split.threshold;
            int self = static_cast<int>(nodes.size());
            nodes.push_back(node);
            nodes[self].left = grow_tree(X, y, std::move(left), depth + 1, opts, nodes);
            nodes[self].right = grow_tree(X, y, std::move(right), depth + 1, opts, nodes);
            return self;
        }
    }
    int self = static_cast<int>(nodes.size());
    nodes.push_back(node);
    return self;
}

}  // namespace

TrainedModel train_cart(const MatrixXd& X, const VectorXd& y, const CartOptions& opts) {
    if (X.rows() != y.size() || X.rows() < opts.min_leaf) {
        throw std::invalid_argument("train_cart: need at least min_leaf samples");
    }
    TrainedModel m;
    m.kind = ModelKind::CART;
    m.max_depth = opts.max_depth;
    m.min_leaf = opts.min_leaf;
    std::vector<int> idx(X.rows());
    for (int i = 0; i < static_cast<int>(X.rows()); ++i) idx[i] = i;
    grow_tree(X, y, std::move(idx), 0, opts, m.tree);
    return m;
}

// ---------------------------------------------------------------------------
// SVR: SMO over beta = alpha - alpha*, box [-C, C], sum(beta) = 0.
// ---------------------------------------------------------------------------

namespace {

// Optimal bias and primal objective for fixed beta.
std::pair<double, double> svr_primal(const VectorXd& residual, double beta_k_beta, double c,
                                     double epsilon) {
    std::vector<double> breakpoints;
    breakpoints.reserve(2 * residual.size());
    for (Eigen::Index i = 0; i < residual.size(); ++i) {
        breakpoints.push_back(residual(i) - epsilon);
        breakpoints.push_back(residual(i) + epsilon);
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    // The loss is convex piecewise-linear in b, so its minimizers form an
    // interval with breakpoint endpoints; report the midpoint.
    double best_lo = 0.0, best_hi = 0.0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (double b : breakpoints) {
        double loss = 0.0;
        for (Eigen::Index i = 0; i < residual.size(); ++i) {
            loss += std::max(0.0, std::abs(residual(i) - b) - epsilon);
        }
        if (loss < best_loss - 1e-12) {
            best_loss = loss;
            best_lo = best_hi = b;
        } else if (loss <= best_loss + 1e-12) {
            best_hi = b;
        }
    }
    return {(best_lo + best_hi) / 2.0, 0.5 * beta_k_beta + c * best_loss};
}

}  // namespace

TrainedModel train_svr(const MatrixXd& X, const VectorXd& y, const SvrOptions& opts) {
    const int n = static_cast<int>(X.rows());
    if (n != y.size() || n < 2) {
        throw std::invalid_argument("train_svr: need at least 2 samples");
    }
    TrainedModel m;
    m.kind = ModelKind::SVR;
    m.use_scaler = true;
    m.scaler = Scaler::fit(X);
    m.train_inputs = m.scaler.transform(X);
    m.kernel = opts.kernel;
    m.svr_c = opts.c;
    m.svr_epsilon = opts.epsilon;
    const double c = opts.c;
    const double eps = opts.epsilon;

    MatrixXd K = m.kernel.gram(m.train_inputs, m.train_inputs);
    VectorXd beta = VectorXd::Zero(n);
    VectorXd f = VectorXd::Zero(n);  // f = K beta

    double gap = std::numeric_limits<double>::infinity();
    double dual = 0.0;
    int iter = 0;
    const int check_interval = 64;
    for (; iter < opts.max_iter; ++iter) {
        // Maximal-violation pair.
        int up = -1, dn = -1;
        double up_gain = -std::numeric_limits<double>::infinity();
        double dn_gain = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double g = y(i) - f(i);
            if (beta(i) < c) {
                double gu = g - (beta(i) >= 0.0 ? eps : -eps);
                if (gu > up_gain) {
                    up_gain = gu;
                    up = i;
                }
            }
            if (beta(i) > -c) {
                double gd = -g - (beta(i) <= 0.0 ? eps : -eps);
                if (gd > dn_gain) {
                    dn_gain = gd;
                    dn = i;
                }
            }
        }
        bool kkt_done = up < 0 || dn < 0 || up == dn || up_gain + dn_gain <= 1e-14;
        if (kkt_done || iter % check_interval == 0) {
            double beta_k_beta = beta.dot(f);
            dual = -0.5 * beta_k_beta + y.dot(beta) - eps * beta.lpNorm<1>();
            auto [bias, primal] = svr_primal(y - f, beta_k_beta, c, eps);
            m.svr_bias = bias;
            gap = primal - dual;
            if (gap <= opts.gap_tol || kkt_done) break;
        }

        int i = up, j = dn;
        double d0 = up_gain + dn_gain;
        double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
        // Step bounded by the box and by the nearest |beta| kink; signs are
        // re-read next iteration if a kink is hit.
        double limit = std::min(c - beta(i), beta(j) + c);
        if (beta(i) < 0.0) limit = std::min(limit, -beta(i));
        if (beta(j) > 0.0) limit = std::min(limit, beta(j));
        double t = eta > 1e-14 ? std::min(d0 / eta, limit) : limit;
        if (t <= 0.0) break;
        beta(i) += t;
        beta(j) -= t;
        f += t * (K.col(i) - K.col(j));
    }
    if (gap > opts.gap_tol * 10.0 + 1e-9 && gap > 1e-6) {
        // Final recheck before declaring failure.
        double beta_k_beta = beta.dot(f);
        dual = -0.5 * beta_k_beta + y.dot(beta) - eps * beta.lpNorm<1>();
        auto [bias, primal] = svr_primal(y - f, beta_k_beta, c, eps);
        m.svr_bias = bias;
        gap = primal - dual;
        if (gap > opts.gap_tol * 10.0 && gap > 1e-4) {
            throw non_convergence_error("train_svr: duality gap " + std::to_string(gap) +
                                        " after " + std::to_string(iter) + " iterations");
        }
    }
    m.svr_beta = beta;
    m.svr_dual_objective = dual;
    m.svr_gap = gap;
    return m;
}

namespace {

double tree_predict(const std::vector<TreeNode>& tree, const VectorXd& x) {
    int node = 0;
    while (tree[node].feature >= 0) {
        node = x(tree[node].feature) <= tree[node].threshold ? tree[node].left : tree[node].right;
    }
    return tree[node].value;
}

}  // namespace

VectorXd predict(const TrainedModel& model, const MatrixXd& X, const PredictOptions& opts) {
    MatrixXd Z = model.use_scaler ? model.scaler.transform(X) : X;
    VectorXd out(Z.rows());
    switch (model.kind) {
        case ModelKind::LR: {
            if (Z.cols() != model.weights.size()) {
                throw std::invalid_argument("predict: feature count mismatch");
            }
            out = Z * model.weights;
            out.array() += model.intercept;
            break;
        }
        case ModelKind::GPR: {
            if (Z.cols() != model.train_inputs.cols()) {
                throw std::invalid_argument("predict: feature count mismatch");
            }
            MatrixXd Kx = model.kernel.gram(Z, model.train_inputs);
            out = Kx * model.gpr_alpha;
            break;
        }
        case ModelKind::CART: {
            for (Eigen::Index i = 0; i < Z.rows(); ++i) {
                out(i) = tree_predict(model.tree, Z.row(i).transpose());
            }
            break;
        }
        case ModelKind::SVR: {
            if (Z.cols() != model.train_inputs.cols()) {
                throw std::invalid_argument("predict: feature count mismatch");
            }
            MatrixXd Kx = model.kernel.gram(Z, model.train_inputs);
            out = Kx * model.svr_beta;
            out.array() += model.svr_bias;
            break;
        }
    }
    if (opts.clamp_nonnegative) {
        out = out.cwiseMax(0.0);
    }
    return out;
}

double r_squared(const VectorXd& y_pred, const VectorXd& y_true, R2Variant variant) {
    if (y_pred.size() != y_true.size() || y_pred.size() < 2) {
        throw std::invalid_argument("r_squared: need equal lengths >= 2");
    }
    double mean_true = y_true.mean();
    double ss_tot = (y_true.array() - mean_true).square().sum();
    if (ss_tot <= 0.0) {
        throw undefined_metric_error("r_squared: zero variance in y_true");
    }
    if (variant == R2Variant::PAPER) {
        double ss_reg = (y_pred.array() - mean_true).square().sum();
        return ss_reg / ss_tot;
    }
    double ss_res = (y_true - y_pred).squaredNorm();
    return 1.0 - ss_res / ss_tot;
}

double pearson(const VectorXd& a, const VectorXd& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("pearson: need equal lengths >= 2");
    }
    Eigen::ArrayXd da = a.array() - a.mean();
    Eigen::ArrayXd db = b.array() - b.mean();
    double va = (da * da).sum();
    double vb = (db * db).sum();
    if (va <= 0.0 || vb <= 0.0) {
        throw undefined_metric_error("pearson: zero variance input");
    }
    double rho = (da * db).sum() / std::sqrt(va * vb);
    return std::clamp(rho, -1.0, 1.0);
}

Metrics evaluate(const VectorXd& y_pred, const VectorXd& y_true) {
    Metrics m;
    m.n = y_true.size();
    m.r2_paper = r_squared(y_pred, y_true, R2Variant::PAPER);
    m.r2_standard = r_squared(y_pred, y_true, R2Variant::STANDARD);
    m.rho = pearson(y_pred, y_true);
    return m;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'E', 'C', 'M', 'D'};
constexpr std::uint32_t kVersion = 1;

void put_vec(std::ostream& os, const VectorXd& v) {
    std::int64_t n = v.size();
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(n * sizeof(double)));
}

void put_mat(std::ostream& os, const MatrixXd& m) {
    std::int64_t r = m.rows(), c = m.cols();
    os.write(reinterpret_cast<const char*>(&r), sizeof(r));
    os.write(reinterpret_cast<const char*>(&c), sizeof(c));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(r * c * sizeof(double)));
}

VectorXd get_vec(std::istream& is) {
    std::int64_t n = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    VectorXd v(n);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    return v;
}

MatrixXd get_mat(std::istream& is) {
    std::int64_t r = 0, c = 0;
    is.read(reinterpret_cast<char*>(&r), sizeof(r));
    is.read(reinterpret_cast<char*>(&c), sizeof(c));
    MatrixXd m(r, c);
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(r * c * sizeof(double)));
    return m;
}

}  // namespace

void save_model(const TrainedModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw parse_error("cannot open for write: " + path);
    auto put = [&os](const auto& v) { os.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    os.write(kMagic, 4);
    put(kVersion);
    std::uint8_t kind = static_cast<std::uint8_t>(m.kind);
    put(kind);
    std::uint8_t use_scaler = m.use_scaler ? 1 : 0;
    put(use_scaler);
    put(m.seed);
    put_vec(os, m.scaler.mean);
    put_vec(os, m.scaler.stddev);
    put_vec(os, m.weights);
    put(m.intercept);
    put_mat(os, m.train_inputs);
    put_vec(os, m.gpr_alpha);
    std::uint8_t kt = static_cast<std::uint8_t>(m.kernel.type);
    put(kt);
    put(m.kernel.length_scale);
    put(m.sigma);
    std::int64_t nt = static_cast<std::int64_t>(m.tree.size());
    put(nt);
    for (const auto& t : m.tree) {
        put(t.feature);
        put(t.threshold);
        put(t.value);
        put(t.left);
        put(t.right);
    }
    put(m.max_depth);
    put(m.min_leaf);
    put_vec(os, m.svr_beta);
    put(m.svr_bias);
    put(m.svr_c);
    put(m.svr_epsilon);
    put(m.svr_dual_objective);
    put(m.svr_gap);
    if (!os) throw parse_error("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw parse_error("cannot open model: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4)) {
        throw parse_error("bad model magic: " + path);
    }
    auto get = [&is](auto& v) { is.read(reinterpret_cast<char*>(&v), sizeof(v)); };
    std::uint32_t version = 0;
    get(version);
    if (version != kVersion) throw parse_error("unsupported model version");
    TrainedModel m;
    std::uint8_t kind = 0, use_scaler = 0, kt = 0;
    get(kind);
    m.kind = static_cast<ModelKind>(kind);
    get(use_scaler);
    m.use_scaler = use_scaler != 0;
    get(m.seed);
    m.scaler.mean = get_vec(is);
    m.scaler.stddev = get_vec(is);
    m.weights = get_vec(is);
    get(m.intercept);
    m.train_inputs = get_mat(is);
    m.gpr_alpha = get_vec(is);
    get(kt);
    m.kernel.type = static_cast<KernelType>(kt);
    get(m.kernel.length_scale);
    get(m.sigma);
    std::int64_t nt = 0;
    get(nt);
    m.tree.resize(nt);
    for (auto& t : m.tree) {
        get(t.feature);
        get(t.threshold);
        get(t.value);
        get(t.left);
        get(t.right);
    }
    get(m.max_depth);
    get(m.min_leaf);
    m.svr_beta = get_vec(is);
    get(m.svr_bias);
    get(m.svr_c);
    get(m.svr_epsilon);
    get(m.svr_dual_objective);
    get(m.svr_gap);
    if (!is) throw parse_error("truncated model: " + path);
    return m;
}

}  // namespace citeimpact::models
