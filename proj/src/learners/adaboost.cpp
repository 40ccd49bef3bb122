#include <algorithm>
#include <cmath>

#include "../errors.hpp"
#include "internal.hpp"
#include "learner.hpp"

namespace attrikit {

BoostRound adaboost_round(const std::vector<double>& weights,
                          const std::vector<char>& misclassified, double stump_error,
                          double learning_rate) {
    if (weights.size() != misclassified.size())
        raise(Errc::LengthMismatch, "weights and misclassification mask differ in length");

    const double eps = 1e-12;
    double err = std::clamp(stump_error, eps, 1.0 - eps);
    BoostRound round;
    round.alpha = learning_rate * std::log((1.0 - err) / err);
    round.weights = weights;

    double total = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (misclassified[i]) round.weights[i] *= std::exp(round.alpha);
        total += round.weights[i];
    }
    for (double& w : round.weights) w /= total;
    return round;
}

std::vector<double> AdaBoostModel::decision_scores(const Matrix& x) const {
    detail::check_width(*this, x);
    double alpha_total = 0;
    for (double a : alphas) alpha_total += a;

    std::vector<double> scores(x.rows, fallback_score);
    if (alpha_total <= 0) return scores;
    for (size_t i = 0; i < x.rows; ++i) {
        double vote = 0;
        for (size_t m = 0; m < stumps.size(); ++m)
            if (tree_leaf_value(stumps[m], x.row(i)) >= 0.5) vote += alphas[m];
        scores[i] = vote / alpha_total;
    }
    return scores;
}

nlohmann::json AdaBoostModel::hyperparameters_json() const {
    return {{"n_estimators", spec.n_estimators},
            {"learning_rate", spec.learning_rate},
            {"algorithm", "SAMME"},
            {"base", "stump"}};
}

nlohmann::json AdaBoostModel::parameters_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& stump : stumps) arr.push_back(tree_nodes_to_json(stump));
    return {{"stumps", arr}, {"alphas", alphas}, {"fallback_score", fallback_score}};
}

std::unique_ptr<Model> fit_adaboost(const AdaBoostSpec& spec, const Matrix& x,
                                    const std::vector<int>& y, uint64_t) {
    detail::require_count(spec.n_estimators, "n_estimators");
    detail::require_rate(spec.learning_rate, "learning_rate");

    auto model = std::make_unique<AdaBoostModel>();
    model->spec = spec;
    size_t positives = 0;
    for (int label : y) positives += label == 1;
    model->fallback_score = static_cast<double>(positives) / static_cast<double>(y.size());

    const size_t n = x.rows;
    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    std::vector<size_t> samples(n);
    for (size_t i = 0; i < n; ++i) samples[i] = i;

    for (size_t round = 0; round < spec.n_estimators; ++round) {
        std::vector<TreeNode> stump = grow_classification_tree(x, y, weights, samples, 1);
        std::vector<char> misclassified(n);
        double err = 0;
        for (size_t i = 0; i < n; ++i) {
            int predicted = tree_leaf_value(stump, x.row(i)) >= 0.5 ? 1 : 0;
            misclassified[i] = predicted != y[i];
            if (misclassified[i]) err += weights[i];
        }
        if (err >= 0.5) break; // stump no better than chance, boosting stalls

        BoostRound step = adaboost_round(weights, misclassified, err, spec.learning_rate);
        model->stumps.push_back(std::move(stump));
        model->alphas.push_back(step.alpha);
        weights = std::move(step.weights);
        if (err == 0.0) break; // perfect stump, nothing left to reweight
    }
    return model;
}

} // namespace attrikit
