#include "smote.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace attrikit {

ResampledData smote_oversample(const Matrix& x, const std::vector<int>& y,
                               const SmoteConfig& config) {
    if (x.rows != y.size()) raise(Errc::LengthMismatch, "feature rows and label count differ");
    if (config.k_neighbors < 1) raise(Errc::ConfigMissingRequired, "k_neighbors must be >= 1");
    if (!(config.target_ratio > 0.0 && config.target_ratio <= 1.0))
        raise(Errc::ConfigMissingRequired, "target_ratio must be in (0, 1]");

    std::map<int, size_t> counts;
    for (int label : y) ++counts[label];
    if (counts.size() < 2) raise(Errc::SingleClass, "oversampling needs two classes");
    if (counts.size() > 2) raise(Errc::NonBinaryLabel, "oversampling supports exactly two classes");

    auto first = counts.begin();
    auto second = std::next(first);
    int minority = first->second <= second->second ? first->first : second->first;
    size_t n_min = std::min(first->second, second->second);
    size_t n_maj = std::max(first->second, second->second);

    size_t target = static_cast<size_t>(std::llround(static_cast<double>(n_maj) * config.target_ratio));
    ResampledData out;
    out.x = x;
    out.y = y;
    if (target <= n_min) return out; // already at or past the requested balance

    if (n_min <= config.k_neighbors)
        raise(Errc::TooFewMinoritySamples,
              "minority class has " + std::to_string(n_min) + " rows, need more than k=" +
                  std::to_string(config.k_neighbors));

    std::vector<size_t> minority_rows;
    for (size_t i = 0; i < y.size(); ++i)
        if (y[i] == minority) minority_rows.push_back(i);

    // k nearest minority neighbours per minority row, ties broken by index.
    size_t k = config.k_neighbors;
    std::vector<std::vector<size_t>> neighbours(minority_rows.size());
    std::vector<std::pair<double, size_t>> dist;
    for (size_t a = 0; a < minority_rows.size(); ++a) {
        dist.clear();
        for (size_t b = 0; b < minority_rows.size(); ++b) {
            if (b == a) continue;
            dist.push_back({squared_distance(x.row(minority_rows[a]), x.row(minority_rows[b])), b});
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<ptrdiff_t>(k), dist.end());
        neighbours[a].reserve(k);
        for (size_t j = 0; j < k; ++j) neighbours[a].push_back(dist[j].second);
    }

    size_t needed = target - n_min;
    out.synthetic_count = needed;
    Rng rng(config.seed);
    for (size_t t = 0; t < needed; ++t) {
        size_t a = t % minority_rows.size();
        size_t b = neighbours[a][rng.below(k)];
        double u = rng.uniform();
        auto base = x.row(minority_rows[a]);
        auto nn = x.row(minority_rows[b]);
        std::vector<double> fresh(x.cols);
        for (size_t c = 0; c < x.cols; ++c) fresh[c] = base[c] + u * (nn[c] - base[c]);
        out.x.push_row(fresh);
        out.y.push_back(minority);
    }
    return out;
}

} // namespace attrikit
