#include <algorithm>
#include <cmath>

#include "../errors.hpp"
#include "../rng.hpp"
#include "internal.hpp"
#include "learner.hpp"

namespace attrikit {

namespace {

double log1pexp(double t) {
    return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double mean_logloss(const std::vector<double>& raw, const std::vector<int>& y) {
    double total = 0;
    for (size_t i = 0; i < raw.size(); ++i)
        total += log1pexp(raw[i]) - static_cast<double>(y[i]) * raw[i];
    return total / static_cast<double>(raw.size());
}

} // namespace

std::vector<double> GradientBoostModel::decision_scores(const Matrix& x) const {
    detail::check_width(*this, x);
    std::vector<double> scores(x.rows);
    for (size_t i = 0; i < x.rows; ++i) {
        double raw = f0;
        for (const auto& tree : trees) raw += spec.learning_rate * tree_leaf_value(tree, x.row(i));
        scores[i] = sigmoid(raw);
    }
    return scores;
}

nlohmann::json GradientBoostModel::hyperparameters_json() const {
    return {{"objective", "binary-logistic"},
            {"learning_rate", spec.learning_rate},
            {"n_estimators", spec.n_estimators},
            {"max_depth", spec.max_depth},
            {"lambda", spec.lambda},
            {"col_subsample", spec.sqrt_features ? "sqrt" : "all"}};
}

nlohmann::json GradientBoostModel::parameters_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& tree : trees) arr.push_back(tree_nodes_to_json(tree));
    return {{"f0", f0}, {"trees", arr}, {"loss_history", loss_history}};
}

std::unique_ptr<Model> fit_gradient_boost(const GradientBoostSpec& spec, const Matrix& x,
                                          const std::vector<int>& y, uint64_t seed) {
    detail::require_count(spec.n_estimators, "n_estimators");
    detail::require_count(spec.max_depth, "max_depth");
    detail::require_rate(spec.learning_rate, "learning_rate");
    detail::require_positive(spec.lambda, "lambda");

    auto model = std::make_unique<GradientBoostModel>();
    model->spec = spec;

    const size_t n = x.rows;
    double positives = 0;
    for (int label : y) positives += label == 1;
    double base_rate = positives / static_cast<double>(n);
    model->f0 = std::log(base_rate / (1.0 - base_rate));

    std::vector<double> raw(n, model->f0);
    // history[0] is the base-rate loss; entry m is the loss after round m.
    model->loss_history.push_back(mean_logloss(raw, y));

    size_t m = static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols))));
    std::vector<size_t> all_features(x.cols);
    for (size_t f = 0; f < x.cols; ++f) all_features[f] = f;

    std::vector<double> grad(n), hess(n);
    for (size_t round = 0; round < spec.n_estimators; ++round) {
        for (size_t i = 0; i < n; ++i) {
            double p = sigmoid(raw[i]);
            grad[i] = p - static_cast<double>(y[i]);
            hess[i] = p * (1.0 - p);
        }

        std::vector<size_t> features = all_features;
        if (spec.sqrt_features && m < x.cols) {
            Rng rng(derive_seed(seed, "tree", round));
            features = rng.sample_without_replacement(x.cols, m);
            std::sort(features.begin(), features.end());
        }

        std::vector<TreeNode> tree = gbt_round(x, grad, hess, features, spec.max_depth, spec.lambda);
        for (size_t i = 0; i < n; ++i)
            raw[i] += spec.learning_rate * tree_leaf_value(tree, x.row(i));
        model->trees.push_back(std::move(tree));
        model->loss_history.push_back(mean_logloss(raw, y));
    }
    return model;
}

} // namespace attrikit
