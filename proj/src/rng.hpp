#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace attrikit {

// splitmix64; used both as a seed mixer and as the core generator. Chosen
// over std::mt19937_64 + <random> distributions because distribution output
// is implementation-defined; this keeps every sampled byte pinned down.
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic seed fan-out: one master seed plus a stage tag yields an
// independent stream per stage, so adding a learner does not perturb the
// split or any other learner.
inline uint64_t derive_seed(uint64_t master, std::string_view tag) {
    uint64_t h = 1469598103934665603ull; // FNV-1a offset basis
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    uint64_t state = master ^ h;
    return splitmix64(state);
}

inline uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t index) {
    uint64_t state = derive_seed(master, tag) ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return splitmix64(state);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1), 53-bit mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound), bound > 0. Rejection sampling keeps it
    // unbiased without relying on library distributions.
    uint64_t below(uint64_t bound) {
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct values from [0, n), ascending order not guaranteed.
    std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
        std::vector<size_t> pool(n);
        for (size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<size_t> out;
        out.reserve(k);
        for (size_t i = 0; i < k && i < n; ++i) {
            size_t j = i + static_cast<size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

private:
    uint64_t state_;
};

} // namespace attrikit
