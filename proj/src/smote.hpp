#pragma once

#include <cstdint>
#include <vector>

#include "matrix.hpp"

namespace attrikit {

struct SmoteConfig {
    size_t k_neighbors = 5;
    double target_ratio = 1.0; // minority target as a fraction of the majority count
    uint64_t seed = 0;
};

struct ResampledData {
    Matrix x;
    std::vector<int> y;
    size_t synthetic_count = 0;
};

// Oversample the minority class by interpolating between each base row and one
// of its k nearest minority neighbours. Original rows are preserved verbatim
// and synthetic rows are appended; base rows are cycled in index order.
ResampledData smote_oversample(const Matrix& x, const std::vector<int>& y,
                               const SmoteConfig& config);

} // namespace attrikit
