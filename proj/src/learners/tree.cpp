#include <algorithm>
#include <cmath>

#include "../errors.hpp"
#include "learner.hpp"

namespace attrikit {

namespace {

double gini(double c0, double c1) {
    double s = c0 + c1;
    if (s <= 0) return 0;
    double p0 = c0 / s, p1 = c1 / s;
    return 1.0 - p0 * p0 - p1 * p1;
}

} // namespace

SplitChoice best_split(const Matrix& x, const std::vector<int>& y,
                       const std::vector<double>& weights, const std::vector<size_t>& samples,
                       const std::vector<size_t>& features) {
    double total[2] = {0, 0};
    for (size_t s : samples) total[y[s]] += weights[s];
    double total_w = total[0] + total[1];
    double parent = gini(total[0], total[1]);

    SplitChoice best;
    std::vector<std::pair<double, size_t>> ordered;
    for (size_t f : features) {
        ordered.clear();
        for (size_t s : samples) ordered.push_back({x.at(s, f), s});
        std::sort(ordered.begin(), ordered.end());

        double left[2] = {0, 0};
        for (size_t i = 0; i + 1 < ordered.size(); ++i) {
            left[y[ordered[i].second]] += weights[ordered[i].second];
            if (ordered[i + 1].first == ordered[i].first) continue;
            double lw = left[0] + left[1];
            double rw = total_w - lw;
            if (lw <= 0 || rw <= 0) continue;
            double threshold = (ordered[i].first + ordered[i + 1].first) / 2.0;
            double gain = parent - (lw / total_w) * gini(left[0], left[1]) -
                          (rw / total_w) * gini(total[0] - left[0], total[1] - left[1]);
            if (gain > best.gain || !best.found) {
                if (!best.found && gain <= 0) continue;
                best = {true, f, threshold, gain};
            }
        }
    }
    return best;
}

namespace {

int append_node(std::vector<TreeNode>& nodes) {
    nodes.push_back(TreeNode{});
    return static_cast<int>(nodes.size() - 1);
}

void grow_gini(std::vector<TreeNode>& nodes, int node, const Matrix& x,
               const std::vector<int>& y, const std::vector<double>& weights,
               const std::vector<size_t>& samples, size_t depth, size_t max_depth,
               const FeatureSampler& sampler, const std::vector<size_t>& all_features) {
    double counts[2] = {0, 0};
    for (size_t s : samples) counts[y[s]] += weights[s];
    nodes[node].counts[0] = counts[0];
    nodes[node].counts[1] = counts[1];

    auto leaf = [&] { nodes[node].value = counts[1] > counts[0] ? 1.0 : 0.0; };
    if (depth >= max_depth || samples.size() < 2 || counts[0] <= 0 || counts[1] <= 0) {
        leaf();
        return;
    }

    SplitChoice choice = sampler ? best_split(x, y, weights, samples, sampler())
                                 : best_split(x, y, weights, samples, all_features);
    if (!choice.found) {
        leaf();
        return;
    }

    std::vector<size_t> left, right;
    for (size_t s : samples)
        (x.at(s, choice.feature) <= choice.threshold ? left : right).push_back(s);
    if (left.empty() || right.empty()) {
        leaf();
        return;
    }

    nodes[node].feature = static_cast<int>(choice.feature);
    nodes[node].threshold = choice.threshold;
    int l = append_node(nodes);
    nodes[node].left = l;
    grow_gini(nodes, l, x, y, weights, left, depth + 1, max_depth, sampler, all_features);
    int r = append_node(nodes);
    nodes[node].right = r;
    grow_gini(nodes, r, x, y, weights, right, depth + 1, max_depth, sampler, all_features);
}

} // namespace

std::vector<TreeNode> grow_classification_tree(const Matrix& x, const std::vector<int>& y,
                                               const std::vector<double>& weights,
                                               const std::vector<size_t>& samples,
                                               size_t max_depth, const FeatureSampler& sampler) {
    std::vector<size_t> all_features(x.cols);
    for (size_t f = 0; f < x.cols; ++f) all_features[f] = f;
    std::vector<TreeNode> nodes;
    int root = append_node(nodes);
    grow_gini(nodes, root, x, y, weights, samples, 0, max_depth, sampler, all_features);
    return nodes;
}

double tree_leaf_value(const std::vector<TreeNode>& nodes, std::span<const double> row) {
    int node = 0;
    while (nodes[static_cast<size_t>(node)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<size_t>(node)];
        node = row[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<size_t>(node)].value;
}

size_t tree_depth(const std::vector<TreeNode>& nodes) {
    std::vector<std::pair<int, size_t>> stack{{0, 0}};
    size_t deepest = 0;
    while (!stack.empty()) {
        auto [node, depth] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, depth);
        const TreeNode& n = nodes[static_cast<size_t>(node)];
        if (n.feature >= 0) {
            stack.push_back({n.left, depth + 1});
            stack.push_back({n.right, depth + 1});
        }
    }
    return deepest;
}

// ---- gradient-boosting tree -----------------------------------------------

namespace {

struct GbtSplit {
    bool found = false;
    size_t feature = 0;
    double threshold = 0;
    double gain = 0;
};

double leaf_objective(double g, double h, double lambda) { return g * g / (h + lambda); }

GbtSplit gbt_best_split(const Matrix& x, const std::vector<double>& grad,
                        const std::vector<double>& hess, const std::vector<size_t>& samples,
                        const std::vector<size_t>& features, double lambda) {
    double total_g = 0, total_h = 0;
    for (size_t s : samples) {
        total_g += grad[s];
        total_h += hess[s];
    }
    double parent = leaf_objective(total_g, total_h, lambda);

    GbtSplit best;
    std::vector<std::pair<double, size_t>> ordered;
    for (size_t f : features) {
        ordered.clear();
        for (size_t s : samples) ordered.push_back({x.at(s, f), s});
        std::sort(ordered.begin(), ordered.end());

        double lg = 0, lh = 0;
        for (size_t i = 0; i + 1 < ordered.size(); ++i) {
            lg += grad[ordered[i].second];
            lh += hess[ordered[i].second];
            if (ordered[i + 1].first == ordered[i].first) continue;
            double gain = (leaf_objective(lg, lh, lambda) +
                           leaf_objective(total_g - lg, total_h - lh, lambda) - parent) /
                          2.0;
            if (gain > best.gain) best = {true, f, (ordered[i].first + ordered[i + 1].first) / 2.0, gain};
        }
    }
    return best;
}

void grow_gbt(std::vector<TreeNode>& nodes, int node, const Matrix& x,
              const std::vector<double>& grad, const std::vector<double>& hess,
              const std::vector<size_t>& samples, size_t depth, size_t max_depth,
              const std::vector<size_t>& features, double lambda) {
    double g = 0, h = 0;
    for (size_t s : samples) {
        g += grad[s];
        h += hess[s];
    }
    auto leaf = [&] { nodes[node].value = -g / (h + lambda); };

    if (depth >= max_depth || samples.size() < 2) {
        leaf();
        return;
    }
    GbtSplit choice = gbt_best_split(x, grad, hess, samples, features, lambda);
    if (!choice.found || choice.gain <= 0) {
        leaf();
        return;
    }

    std::vector<size_t> left, right;
    for (size_t s : samples)
        (x.at(s, choice.feature) <= choice.threshold ? left : right).push_back(s);
    if (left.empty() || right.empty()) {
        leaf();
        return;
    }

    nodes[node].feature = static_cast<int>(choice.feature);
    nodes[node].threshold = choice.threshold;
    int l = append_node(nodes);
    nodes[node].left = l;
    grow_gbt(nodes, l, x, grad, hess, left, depth + 1, max_depth, features, lambda);
    int r = append_node(nodes);
    nodes[node].right = r;
    grow_gbt(nodes, r, x, grad, hess, right, depth + 1, max_depth, features, lambda);
}

} // namespace

std::vector<TreeNode> gbt_round(const Matrix& x, const std::vector<double>& grad,
                                const std::vector<double>& hess,
                                const std::vector<size_t>& features, size_t max_depth,
                                double lambda) {
    if (grad.size() != x.rows || hess.size() != x.rows)
        raise(Errc::LengthMismatch, "gradient/hessian length must match row count");
    std::vector<size_t> samples(x.rows);
    for (size_t i = 0; i < x.rows; ++i) samples[i] = i;
    std::vector<TreeNode> nodes;
    int root = append_node(nodes);
    grow_gbt(nodes, root, x, grad, hess, samples, 0, max_depth, features, lambda);
    return nodes;
}

} // namespace attrikit
