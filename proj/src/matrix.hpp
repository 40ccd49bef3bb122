#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace attrikit {

// Dense row-major matrix of doubles; the substrate every learner consumes.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }

    std::span<const double> row(size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<double> row(size_t r) { return {data.data() + r * cols, cols}; }

    void push_row(std::span<const double> values) {
        if (cols == 0) cols = values.size();
        if (values.size() != cols) raise(Errc::DimensionMismatch, "row width mismatch");
        data.insert(data.end(), values.begin(), values.end());
        ++rows;
    }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

} // namespace attrikit
