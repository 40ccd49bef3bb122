#include "learner.hpp"

#include <cmath>

#include "../errors.hpp"

namespace attrikit {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<int> Model::predict(const Matrix& x) const {
    std::vector<double> scores = decision_scores(x);
    std::vector<int> labels(scores.size());
    // Probability votes tied at exactly 0.5 (even vote splits) go to class 0;
    // margins keep the conventional sign rule with 0 on the positive side.
    for (size_t i = 0; i < scores.size(); ++i)
        labels[i] = (margin_scored() ? scores[i] >= 0.0 : scores[i] > 0.5) ? 1 : 0;
    return labels;
}

namespace detail {

void check_fit_inputs(const Matrix& x, const std::vector<int>& y) {
    if (x.rows != y.size()) raise(Errc::LengthMismatch, "row count and label count differ");
    if (x.rows < 2) raise(Errc::SingleClass, "training needs at least 2 rows");
    bool seen[2] = {false, false};
    for (int label : y) {
        if (label != 0 && label != 1) raise(Errc::NonBinaryLabel, "labels must be 0 or 1");
        seen[label] = true;
    }
    if (!seen[0] || !seen[1]) raise(Errc::SingleClass, "training needs both classes present");
}

void check_width(const Model& m, const Matrix& x) {
    if (x.cols != m.n_features())
        raise(Errc::DimensionMismatch, "expected " + std::to_string(m.n_features()) +
                                           " features, got " + std::to_string(x.cols));
}

void require_positive(double v, const char* what) {
    if (!(v > 0)) raise(Errc::ConfigMissingRequired, std::string(what) + " must be positive");
}

void require_count(size_t v, const char* what) {
    if (v == 0) raise(Errc::ConfigMissingRequired, std::string(what) + " must be positive");
}

void require_rate(double v, const char* what) {
    if (!(v > 0 && v <= 1.0))
        raise(Errc::ConfigMissingRequired, std::string(what) + " must be in (0, 1]");
}

} // namespace detail

std::unique_ptr<Model> fit_logistic(const LogisticRegressionSpec&, const Matrix&,
                                    const std::vector<int>&, uint64_t);
std::unique_ptr<Model> fit_knn(const KnnSpec&, const Matrix&, const std::vector<int>&, uint64_t);
std::unique_ptr<Model> fit_svm(const SvmSpec&, const Matrix&, const std::vector<int>&, uint64_t);
std::unique_ptr<Model> fit_decision_tree(const DecisionTreeSpec&, const Matrix&,
                                         const std::vector<int>&, uint64_t);
std::unique_ptr<Model> fit_random_forest(const RandomForestSpec&, const Matrix&,
                                         const std::vector<int>&, uint64_t);
std::unique_ptr<Model> fit_adaboost(const AdaBoostSpec&, const Matrix&, const std::vector<int>&,
                                    uint64_t);
std::unique_ptr<Model> fit_gradient_boost(const GradientBoostSpec&, const Matrix&,
                                          const std::vector<int>&, uint64_t);

std::unique_ptr<Model> fit(const LearnerSpec& spec, const Matrix& x, const std::vector<int>& y,
                           uint64_t seed) {
    detail::check_fit_inputs(x, y);
    auto model = std::visit(
        [&](const auto& s) -> std::unique_ptr<Model> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, LogisticRegressionSpec>)
                return fit_logistic(s, x, y, seed);
            else if constexpr (std::is_same_v<S, KnnSpec>)
                return fit_knn(s, x, y, seed);
            else if constexpr (std::is_same_v<S, SvmSpec>)
                return fit_svm(s, x, y, seed);
            else if constexpr (std::is_same_v<S, DecisionTreeSpec>)
                return fit_decision_tree(s, x, y, seed);
            else if constexpr (std::is_same_v<S, RandomForestSpec>)
                return fit_random_forest(s, x, y, seed);
            else if constexpr (std::is_same_v<S, AdaBoostSpec>)
                return fit_adaboost(s, x, y, seed);
            else
                return fit_gradient_boost(s, x, y, seed);
        },
        spec);
    model->n_features_ = x.cols;
    model->seed_ = seed;
    return model;
}

} // namespace attrikit
