#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "revhilbert/hilbert.hpp"

namespace revhilbert::test_support {

inline std::optional<std::uint64_t>& seed_override() {
    static std::optional<std::uint64_t> seed;
    return seed;
}

/// Seed for randomized property tests: an explicit --seed, then
/// REVHILBERT_SEED, else 0.
inline std::uint64_t property_seed() {
    if (seed_override()) {
        return *seed_override();
    }
    if (const char* env = std::getenv("REVHILBERT_SEED")) {
        return std::stoull(env);
    }
    return 0;
}

/// Random pairs with 1 <= n <= max_n and entries log-uniform in [lo, hi].
class PairCorpus {
public:
    PairCorpus(std::size_t max_n, double lo, double hi, std::uint64_t salt = 0)
        : rng_(property_seed() * 0x9E3779B97F4A7C15ULL + salt),
          size_(1, static_cast<int>(max_n)),
          log_entry_(std::log(lo), std::log(hi)) {}

    WeightVectorPair next() {
        const auto n = static_cast<std::size_t>(size_(rng_));
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = std::exp(log_entry_(rng_));
            b[i] = std::exp(log_entry_(rng_));
        }
        return WeightVectorPair(std::move(a), std::move(b));
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::uniform_int_distribution<int> size_;
    std::uniform_real_distribution<double> log_entry_;
};

inline double relative_difference(double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

} // namespace revhilbert::test_support
