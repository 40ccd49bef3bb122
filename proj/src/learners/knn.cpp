#include <algorithm>
#include <cmath>

#include "../errors.hpp"
#include "internal.hpp"
#include "learner.hpp"

namespace attrikit {

namespace {

// (squared distance, row index); smaller compares first, so the worst
// neighbour kept is the lexicographic maximum.
using Cand = std::pair<double, size_t>;

void heap_offer(std::vector<Cand>& heap, size_t k, Cand c) {
    if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end());
    } else if (c < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end());
    }
}

std::vector<std::pair<size_t, double>> finish(std::vector<Cand> heap) {
    std::sort(heap.begin(), heap.end());
    std::vector<std::pair<size_t, double>> out;
    out.reserve(heap.size());
    for (const auto& [d2, idx] : heap) out.push_back({idx, std::sqrt(d2)});
    return out;
}

} // namespace

KdTree KdTree::build(const Matrix& points, size_t leaf_size) {
    if (leaf_size == 0) leaf_size = 1;
    KdTree tree;
    tree.order.resize(points.rows);
    for (size_t i = 0; i < points.rows; ++i) tree.order[i] = i;
    if (points.rows == 0) return tree;

    struct Frame {
        int node;
        size_t begin, end;
    };
    tree.nodes.push_back({});
    std::vector<Frame> stack{{0, 0, points.rows}};
    while (!stack.empty()) {
        auto [node, begin, end] = stack.back();
        stack.pop_back();
        Node& n = tree.nodes[static_cast<size_t>(node)];
        n.begin = begin;
        n.end = end;
        if (end - begin <= leaf_size) {
            n.axis = -1;
            std::sort(tree.order.begin() + static_cast<ptrdiff_t>(begin),
                      tree.order.begin() + static_cast<ptrdiff_t>(end));
            continue;
        }

        // Split along the axis with the widest spread; ties take the lowest axis.
        size_t axis = 0;
        double best_spread = -1;
        for (size_t a = 0; a < points.cols; ++a) {
            double lo = points.at(tree.order[begin], a), hi = lo;
            for (size_t i = begin + 1; i < end; ++i) {
                double v = points.at(tree.order[i], a);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_spread) {
                best_spread = hi - lo;
                axis = a;
            }
        }

        size_t mid = (begin + end) / 2;
        std::nth_element(tree.order.begin() + static_cast<ptrdiff_t>(begin),
                         tree.order.begin() + static_cast<ptrdiff_t>(mid),
                         tree.order.begin() + static_cast<ptrdiff_t>(end),
                         [&](size_t a, size_t b) {
                             double va = points.at(a, axis), vb = points.at(b, axis);
                             return va < vb || (va == vb && a < b);
                         });
        double split = points.at(tree.order[mid], axis);

        int left = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        int right = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        Node& parent = tree.nodes[static_cast<size_t>(node)]; // re-fetch, vector may move
        parent.axis = static_cast<int>(axis);
        parent.split = split;
        parent.left = left;
        parent.right = right;
        stack.push_back({left, begin, mid});
        stack.push_back({right, mid, end});
    }
    return tree;
}

namespace {

void kd_search(const Matrix& points, const KdTree& tree, int node, std::span<const double> x,
               size_t k, std::vector<Cand>& heap) {
    const KdTree::Node& n = tree.nodes[static_cast<size_t>(node)];
    if (n.axis < 0) {
        for (size_t i = n.begin; i < n.end; ++i) {
            size_t row = tree.order[i];
            heap_offer(heap, k, {squared_distance(x, points.row(row)), row});
        }
        return;
    }
    double diff = x[static_cast<size_t>(n.axis)] - n.split;
    int near = diff <= 0 ? n.left : n.right;
    int far = diff <= 0 ? n.right : n.left;
    kd_search(points, tree, near, x, k, heap);
    if (heap.size() < k || diff * diff <= heap.front().first)
        kd_search(points, tree, far, x, k, heap);
}

} // namespace

std::vector<std::pair<size_t, double>> knn_query(const Matrix& points, const KdTree& index,
                                                 std::span<const double> x, size_t k) {
    if (k > points.rows)
        raise(Errc::KTooLarge, "k=" + std::to_string(k) + " exceeds " +
                                   std::to_string(points.rows) + " stored rows");
    std::vector<Cand> heap;
    heap.reserve(k);
    kd_search(points, index, 0, x, k, heap);
    return finish(std::move(heap));
}

std::vector<std::pair<size_t, double>> knn_query_brute(const Matrix& points,
                                                       std::span<const double> x, size_t k) {
    if (k > points.rows)
        raise(Errc::KTooLarge, "k=" + std::to_string(k) + " exceeds " +
                                   std::to_string(points.rows) + " stored rows");
    std::vector<Cand> heap;
    heap.reserve(k);
    for (size_t i = 0; i < points.rows; ++i)
        heap_offer(heap, k, {squared_distance(x, points.row(i)), i});
    return finish(std::move(heap));
}

std::vector<double> KnnModel::decision_scores(const Matrix& x) const {
    detail::check_width(*this, x);
    std::vector<double> scores(x.rows);
    for (size_t i = 0; i < x.rows; ++i) {
        auto neighbours = knn_query(train_x, index, x.row(i), spec.k);
        size_t positive = 0;
        for (const auto& [row, dist] : neighbours) positive += train_y[row] == 1;
        scores[i] = static_cast<double>(positive) / static_cast<double>(spec.k);
    }
    return scores;
}

nlohmann::json KnnModel::hyperparameters_json() const {
    return {{"k", spec.k}, {"weights", "uniform"}, {"p", 2}, {"leaf_size", spec.leaf_size}};
}

nlohmann::json KnnModel::parameters_json() const {
    return {{"train_x", {{"rows", train_x.rows}, {"cols", train_x.cols}, {"data", train_x.data}}},
            {"train_y", train_y}};
}

std::unique_ptr<Model> fit_knn(const KnnSpec& spec, const Matrix& x, const std::vector<int>& y,
                               uint64_t) {
    detail::require_count(spec.k, "k");
    if (spec.k > x.rows)
        raise(Errc::KTooLarge, "k=" + std::to_string(spec.k) + " exceeds " +
                                   std::to_string(x.rows) + " training rows");
    auto model = std::make_unique<KnnModel>();
    model->spec = spec;
    model->train_x = x;
    model->train_y = y;
    model->index = KdTree::build(model->train_x, spec.leaf_size);
    return model;
}

} // namespace attrikit
