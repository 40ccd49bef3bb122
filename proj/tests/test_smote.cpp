#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smote.hpp"
#include "test_helpers.hpp"

using namespace attrikit;

namespace {

struct Problem {
    Matrix x;
    std::vector<int> y;
};

Problem imbalanced(std::mt19937& gen, size_t n_major, size_t n_minor, size_t dims) {
    Problem p;
    p.x = testutil::random_matrix(gen, n_major + n_minor, dims);
    p.y.assign(n_major, 0);
    p.y.insert(p.y.end(), n_minor, 1);
    return p;
}

// Indices of the k nearest minority rows to minority row `base`, recomputed
// from scratch; ties broken by ascending index, base excluded.
std::vector<size_t> brute_minority_neighbors(const Matrix& x, const std::vector<size_t>& minority,
                                             size_t base, size_t k) {
    std::vector<std::pair<double, size_t>> d;
    for (size_t idx : minority) {
        if (idx == base) continue;
        d.emplace_back(squared_distance(x.row(base), x.row(idx)), idx);
    }
    std::sort(d.begin(), d.end());
    std::vector<size_t> out;
    for (size_t i = 0; i < k && i < d.size(); ++i) out.push_back(d[i].second);
    return out;
}

} // namespace

TEST_SUITE("smote") {

TEST_CASE("oversampling balances the classes exactly") {
    std::mt19937 gen(1);
    Problem p = imbalanced(gen, 20, 6, 3);
    ResampledData r = smote_oversample(p.x, p.y, {5, 1.0, 7});
    CHECK(r.x.rows == 40);
    CHECK(r.synthetic_count == 14);
    size_t ones = 0;
    for (int label : r.y) ones += static_cast<size_t>(label);
    CHECK(ones == 20);
    CHECK(r.y.size() == 40);
}

TEST_CASE("original rows survive verbatim, synthetic rows are appended") {
    std::mt19937 gen(2);
    Problem p = imbalanced(gen, 15, 7, 4);
    ResampledData r = smote_oversample(p.x, p.y, {5, 1.0, 3});
    for (size_t i = 0; i < p.x.rows; ++i)
        for (size_t c = 0; c < p.x.cols; ++c) CHECK(r.x.at(i, c) == p.x.at(i, c));
    for (size_t i = 0; i < p.x.rows; ++i) CHECK(r.y[i] == p.y[i]);
    for (size_t i = p.x.rows; i < r.x.rows; ++i) CHECK(r.y[i] == 1);
}

TEST_CASE("every synthetic row lies on a base-to-true-neighbor segment") {
    std::mt19937 gen(3);
    const size_t k = 4;
    Problem p = imbalanced(gen, 25, 8, 3);
    std::vector<size_t> minority;
    for (size_t i = 0; i < p.y.size(); ++i)
        if (p.y[i] == 1) minority.push_back(i);

    ResampledData r = smote_oversample(p.x, p.y, {k, 1.0, 11});
    REQUIRE(r.synthetic_count == 17);

    for (size_t s = p.x.rows; s < r.x.rows; ++s) {
        auto row = r.x.row(s);
        bool explained = false;
        for (size_t base : minority) {
            for (size_t nb : brute_minority_neighbors(p.x, minority, base, k)) {
                // Solve for u on the first axis where base and neighbor differ,
                // then demand consistency everywhere.
                double u = -1;
                bool ok = true;
                for (size_t c = 0; c < p.x.cols && ok; ++c) {
                    double span = p.x.at(nb, c) - p.x.at(base, c);
                    double offset = row[c] - p.x.at(base, c);
                    if (std::abs(span) < 1e-12) {
                        ok = std::abs(offset) < 1e-9;
                    } else if (u < 0) {
                        u = offset / span;
                        ok = u >= -1e-12 && u <= 1.0 + 1e-12;
                    } else {
                        ok = std::abs(offset / span - u) < 1e-9;
                    }
                }
                if (ok) {
                    explained = true;
                    break;
                }
            }
            if (explained) break;
        }
        CHECK_MESSAGE(explained, "synthetic row " << s << " not on any valid segment");
    }
}

TEST_CASE("resampling is reproducible per seed") {
    std::mt19937 gen(4);
    Problem p = imbalanced(gen, 18, 6, 2);
    ResampledData a = smote_oversample(p.x, p.y, {5, 1.0, 9});
    ResampledData b = smote_oversample(p.x, p.y, {5, 1.0, 9});
    ResampledData c = smote_oversample(p.x, p.y, {5, 1.0, 10});
    CHECK(a.x.data == b.x.data);
    CHECK(a.y == b.y);
    CHECK(a.x.data != c.x.data);
}

TEST_CASE("a target ratio at or below the current balance is a no-op") {
    std::mt19937 gen(5);
    Problem p = imbalanced(gen, 12, 10, 2);
    ResampledData r = smote_oversample(p.x, p.y, {5, 0.5, 1}); // target 6 < 10 minority
    CHECK(r.synthetic_count == 0);
    CHECK(r.x.rows == 22);
    CHECK(r.x.data == p.x.data);
}

TEST_CASE("minority class must exceed the neighbor count") {
    std::mt19937 gen(6);
    Problem bad = imbalanced(gen, 20, 5, 2);
    CHECK_RAISES_CODE(smote_oversample(bad.x, bad.y, {5, 1.0, 1}), Errc::TooFewMinoritySamples);
    Problem edge = imbalanced(gen, 20, 6, 2);
    ResampledData ok = smote_oversample(edge.x, edge.y, {5, 1.0, 1});
    CHECK(ok.x.rows == 40);
}

TEST_CASE("label vector validation") {
    std::mt19937 gen(7);
    Matrix x = testutil::random_matrix(gen, 6, 2);
    CHECK_RAISES_CODE(smote_oversample(x, {0, 0, 0}, {5, 1.0, 1}), Errc::LengthMismatch);
    CHECK_RAISES_CODE(smote_oversample(x, {0, 0, 0, 0, 0, 0}, {5, 1.0, 1}), Errc::SingleClass);
    CHECK_RAISES_CODE(smote_oversample(x, {0, 0, 1, 1, 2, 2}, {5, 1.0, 1}), Errc::NonBinaryLabel);
}

TEST_CASE("interpolation parameters stay inside the unit interval") {
    std::mt19937 gen(8);
    Problem p = imbalanced(gen, 30, 10, 2);
    std::vector<size_t> minority;
    for (size_t i = 0; i < p.y.size(); ++i)
        if (p.y[i] == 1) minority.push_back(i);
    double lo[2] = {1e30, 1e30}, hi[2] = {-1e30, -1e30};
    for (size_t idx : minority)
        for (size_t c = 0; c < 2; ++c) {
            lo[c] = std::min(lo[c], p.x.at(idx, c));
            hi[c] = std::max(hi[c], p.x.at(idx, c));
        }
    ResampledData r = smote_oversample(p.x, p.y, {3, 1.0, 2});
    for (size_t s = p.x.rows; s < r.x.rows; ++s)
        for (size_t c = 0; c < 2; ++c) {
            CHECK(r.x.at(s, c) >= lo[c] - 1e-12);
            CHECK(r.x.at(s, c) <= hi[c] + 1e-12);
        }
}

} // TEST_SUITE
