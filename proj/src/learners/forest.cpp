#include <algorithm>
#include <cmath>

#include "../errors.hpp"
#include "../rng.hpp"
#include "internal.hpp"
#include "learner.hpp"

namespace attrikit {

namespace {

nlohmann::json nodes_json(const std::vector<TreeNode>& nodes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TreeNode& n : nodes)
        arr.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.counts[0], n.counts[1]});
    return arr;
}

} // namespace

nlohmann::json tree_nodes_to_json(const std::vector<TreeNode>& nodes) { return nodes_json(nodes); }

std::vector<TreeNode> tree_nodes_from_json(const nlohmann::json& arr) {
    std::vector<TreeNode> nodes;
    for (const auto& e : arr) {
        TreeNode n;
        n.feature = e.at(0).get<int>();
        n.threshold = e.at(1).get<double>();
        n.left = e.at(2).get<int>();
        n.right = e.at(3).get<int>();
        n.value = e.at(4).get<double>();
        n.counts[0] = e.at(5).get<double>();
        n.counts[1] = e.at(6).get<double>();
        nodes.push_back(n);
    }
    return nodes;
}

// ---- single tree -----------------------------------------------------------

std::vector<double> DecisionTreeModel::decision_scores(const Matrix& x) const {
    detail::check_width(*this, x);
    std::vector<double> scores(x.rows);
    for (size_t i = 0; i < x.rows; ++i) scores[i] = tree_leaf_value(nodes, x.row(i));
    return scores;
}

nlohmann::json DecisionTreeModel::hyperparameters_json() const {
    return {{"max_depth", spec.max_depth}, {"criterion", "gini"}};
}

nlohmann::json DecisionTreeModel::parameters_json() const { return {{"nodes", nodes_json(nodes)}}; }

std::unique_ptr<Model> fit_decision_tree(const DecisionTreeSpec& spec, const Matrix& x,
                                         const std::vector<int>& y, uint64_t) {
    detail::require_count(spec.max_depth, "max_depth");
    auto model = std::make_unique<DecisionTreeModel>();
    model->spec = spec;
    std::vector<double> weights(x.rows, 1.0);
    std::vector<size_t> samples(x.rows);
    for (size_t i = 0; i < x.rows; ++i) samples[i] = i;
    model->nodes = grow_classification_tree(x, y, weights, samples, spec.max_depth);
    return model;
}

// ---- forest ----------------------------------------------------------------

std::vector<double> RandomForestModel::decision_scores(const Matrix& x) const {
    detail::check_width(*this, x);
    std::vector<double> scores(x.rows, 0.0);
    for (size_t i = 0; i < x.rows; ++i) {
        size_t votes = 0;
        for (const auto& tree : trees) votes += tree_leaf_value(tree, x.row(i)) >= 0.5;
        scores[i] = static_cast<double>(votes) / static_cast<double>(trees.size());
    }
    return scores;
}

nlohmann::json RandomForestModel::hyperparameters_json() const {
    return {{"n_trees", spec.n_trees},
            {"max_depth", spec.max_depth},
            {"bootstrap", spec.bootstrap},
            {"max_features", spec.sqrt_features ? "sqrt" : "all"}};
}

nlohmann::json RandomForestModel::parameters_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& tree : trees) arr.push_back(nodes_json(tree));
    return {{"trees", arr}};
}

std::unique_ptr<Model> fit_random_forest(const RandomForestSpec& spec, const Matrix& x,
                                         const std::vector<int>& y, uint64_t seed) {
    detail::require_count(spec.n_trees, "n_trees");
    detail::require_count(spec.max_depth, "max_depth");

    auto model = std::make_unique<RandomForestModel>();
    model->spec = spec;
    std::vector<double> weights(x.rows, 1.0);
    size_t m = static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols))));

    for (size_t t = 0; t < spec.n_trees; ++t) {
        Rng rng(derive_seed(seed, "tree", t));
        std::vector<size_t> samples(x.rows);
        if (spec.bootstrap)
            for (size_t i = 0; i < x.rows; ++i) samples[i] = static_cast<size_t>(rng.below(x.rows));
        else
            for (size_t i = 0; i < x.rows; ++i) samples[i] = i;

        FeatureSampler sampler;
        if (spec.sqrt_features && m < x.cols)
            sampler = [&rng, &x, m] {
                auto f = rng.sample_without_replacement(x.cols, m);
                std::sort(f.begin(), f.end());
                return f;
            };
        model->trees.push_back(
            grow_classification_tree(x, y, weights, samples, spec.max_depth, sampler));
    }
    return model;
}

} // namespace attrikit
