#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "../matrix.hpp"

namespace attrikit {

// Hyperparameter defaults mirror the reference experiment's settings.
struct LogisticRegressionSpec {
    double l2_c = 1.0;
    double tol = 1e-6;
    size_t max_iter = 1000;
};

struct KnnSpec {
    size_t k = 10;
    size_t leaf_size = 50; // spatial index leaf capacity; results match brute force exactly
};

struct SvmSpec {
    double c = 200.0;
    double gamma = 0.0; // 0 means 'scale': 1/(d * element variance of the training matrix)
    double tol = 0.1;
    size_t max_iter = 500000;
};

struct DecisionTreeSpec {
    size_t max_depth = 5;
};

struct RandomForestSpec {
    size_t n_trees = 200;
    size_t max_depth = 5;
    bool bootstrap = true;
    bool sqrt_features = true; // per-split subsample of ceil(sqrt(d)) features
};

struct AdaBoostSpec {
    size_t n_estimators = 150;
    double learning_rate = 0.01;
};

struct GradientBoostSpec {
    double learning_rate = 0.01;
    size_t n_estimators = 350;
    size_t max_depth = 3;
    double lambda = 1.0;
    bool sqrt_features = true; // per-tree column subsample of ceil(sqrt(d))
};

using LearnerSpec = std::variant<LogisticRegressionSpec, KnnSpec, SvmSpec, DecisionTreeSpec,
                                 RandomForestSpec, AdaBoostSpec, GradientBoostSpec>;

// ---- decision trees ------------------------------------------------------

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;        // leaf payload: class label, or additive weight for boosting
    double counts[2] = {0, 0}; // weighted class counts at the node (classification trees)
};

struct SplitChoice {
    bool found = false;
    size_t feature = 0;
    double threshold = 0;
    double gain = 0;
};

// Exhaustive search over midpoints of consecutive sorted unique values.
// Maximizes weighted Gini decrease; ties go to the lowest feature index,
// then the smallest threshold. found=false when every candidate is degenerate.
SplitChoice best_split(const Matrix& x, const std::vector<int>& y,
                       const std::vector<double>& weights, const std::vector<size_t>& samples,
                       const std::vector<size_t>& features);

using FeatureSampler = std::function<std::vector<size_t>()>;

// Recursive weighted Gini tree. sampler, when given, picks the candidate
// feature set per split; leaves store the majority class (ties -> class 0).
std::vector<TreeNode> grow_classification_tree(const Matrix& x, const std::vector<int>& y,
                                               const std::vector<double>& weights,
                                               const std::vector<size_t>& samples,
                                               size_t max_depth,
                                               const FeatureSampler& sampler = nullptr);

double tree_leaf_value(const std::vector<TreeNode>& nodes, std::span<const double> row);
size_t tree_depth(const std::vector<TreeNode>& nodes);

// ---- boosting primitives -------------------------------------------------

struct BoostRound {
    double alpha = 0;
    std::vector<double> weights;
};

// Binary SAMME reweighting: alpha = lr * ln((1-err)/err), misclassified rows
// upweighted by exp(alpha), then renormalized. err is clamped away from 0.
BoostRound adaboost_round(const std::vector<double>& weights,
                          const std::vector<char>& misclassified, double stump_error,
                          double learning_rate);

// Second-order regression tree on (g, h): split gain
// [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)] / 2, leaf weight -G/(H+l).
std::vector<TreeNode> gbt_round(const Matrix& x, const std::vector<double>& grad,
                                const std::vector<double>& hess,
                                const std::vector<size_t>& features, size_t max_depth,
                                double lambda);

// ---- logistic regression primitive ---------------------------------------

struct LossGrad {
    double loss = 0;
    std::vector<double> grad_w;
    double grad_b = 0;
};

// loss = 0.5*||w||^2 + C * sum log(1 + exp(-y_pm * f(x))), bias unpenalized.
LossGrad logistic_loss_grad(const std::vector<double>& w, double b, const Matrix& x,
                            const std::vector<int>& y, double c);

// ---- SVM primitives -------------------------------------------------------

struct SmoResult {
    std::vector<double> alphas;
    double bias = 0;
    bool converged = false;
    size_t iterations = 0;
};

// Maximal-violating-pair SMO on a precomputed kernel matrix; y in {-1,+1}.
// Stops when the duality-gap proxy m - M drops to tol.
SmoResult smo_solve(const Matrix& kernel, const std::vector<int>& y_pm, double c, double tol,
                    size_t max_iter);

double rbf_gamma_scale(const Matrix& x);

// ---- nearest-neighbour index ----------------------------------------------

struct KdTree {
    struct Node {
        int axis = -1; // -1 marks a leaf holding order[begin, end)
        double split = 0;
        int left = -1;
        int right = -1;
        size_t begin = 0;
        size_t end = 0;
    };
    std::vector<Node> nodes;
    std::vector<size_t> order;

    static KdTree build(const Matrix& points, size_t leaf_size);
};

// k nearest rows by Euclidean distance; ties broken by ascending row index.
std::vector<std::pair<size_t, double>> knn_query(const Matrix& points, const KdTree& index,
                                                 std::span<const double> x, size_t k);
std::vector<std::pair<size_t, double>> knn_query_brute(const Matrix& points,
                                                       std::span<const double> x, size_t k);

// ---- uniform model contract ------------------------------------------------

class Model {
  public:
    virtual ~Model() = default;
    virtual std::string variant() const = 0;
    virtual std::vector<double> decision_scores(const Matrix& x) const = 0;
    virtual nlohmann::json hyperparameters_json() const = 0;
    virtual nlohmann::json parameters_json() const = 0;

    // Scores are probabilities (predict 1 when score > 0.5, even vote splits
    // fall to class 0) unless margin_scored(), where the threshold is >= 0.
    virtual bool margin_scored() const { return false; }
    std::vector<int> predict(const Matrix& x) const;

    size_t n_features() const { return n_features_; }
    bool converged() const { return converged_; }
    uint64_t seed() const { return seed_; }

    size_t n_features_ = 0;
    bool converged_ = true;
    uint64_t seed_ = 0;
};

class LogisticModel : public Model {
  public:
    LogisticRegressionSpec spec;
    std::vector<double> w;
    double b = 0;
    std::string variant() const override { return "logistic_regression"; }
    std::vector<double> decision_scores(const Matrix& x) const override;
    nlohmann::json hyperparameters_json() const override;
    nlohmann::json parameters_json() const override;
};

class KnnModel : public Model {
  public:
    KnnSpec spec;
    Matrix train_x;
    std::vector<int> train_y;
    KdTree index;
    std::string variant() const override { return "knn"; }
    std::vector<double> decision_scores(const Matrix& x) const override;
    nlohmann::json hyperparameters_json() const override;
    nlohmann::json parameters_json() const override;
};

class SvmModel : public Model {
  public:
    SvmSpec spec;
    double gamma = 0; // resolved numeric value
    Matrix support_vectors;
    std::vector<double> dual_coef; // alpha_i * y_i
    double bias = 0;
    bool margin_scored() const override { return true; }
    std::string variant() const override { return "svm"; }
    std::vector<double> decision_scores(const Matrix& x) const override;
    nlohmann::json hyperparameters_json() const override;
    nlohmann::json parameters_json() const override;
};

class DecisionTreeModel : public Model {
  public:
    DecisionTreeSpec spec;
    std::vector<TreeNode> nodes;
    std::string variant() const override { return "decision_tree"; }
    std::vector<double> decision_scores(const Matrix& x) const override;
    nlohmann::json hyperparameters_json() const override;
    nlohmann::json parameters_json() const override;
};

class RandomForestModel : public Model {
  public:
    RandomForestSpec spec;
    std::vector<std::vector<TreeNode>> trees;
    std::string variant() const override { return "random_forest"; }
    std::vector<double> decision_scores(const Matrix& x) const override; // vote fraction
    nlohmann::json hyperparameters_json() const override;
    nlohmann::json parameters_json() const override;
};

class AdaBoostModel : public Model {
  public:
    AdaBoostSpec spec;
    std::vector<std::vector<TreeNode>> stumps;
    std::vector<double> alphas;
    double fallback_score = 0.5; // class-1 train fraction, used when no round survives
    std::string variant() const override { return "adaboost"; }
    std::vector<double> decision_scores(const Matrix& x) const override; // weighted vote fraction
    nlohmann::json hyperparameters_json() const override;
    nlohmann::json parameters_json() const override;
};

class GradientBoostModel : public Model {
  public:
    GradientBoostSpec spec;
    double f0 = 0;
    std::vector<std::vector<TreeNode>> trees;
    std::vector<double> loss_history; // mean train log-loss after each round
    std::string variant() const override { return "gradient_boost"; }
    std::vector<double> decision_scores(const Matrix& x) const override; // sigmoid of raw score
    nlohmann::json hyperparameters_json() const override;
    nlohmann::json parameters_json() const override;
};

// Dispatch on the spec variant; validates shapes and that both classes appear.
std::unique_ptr<Model> fit(const LearnerSpec& spec, const Matrix& x, const std::vector<int>& y,
                           uint64_t seed);

std::string save_model(const Model& model);
std::unique_ptr<Model> load_model(const std::string& text);

double sigmoid(double z);

} // namespace attrikit
