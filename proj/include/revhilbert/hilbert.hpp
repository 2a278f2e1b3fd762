#pragma once

// The quantities T and S^(m) of a weight/node vector pair and the inequality
// checks built on them:
//
//   T      = sum_k a_k / b_k
//   S^(m)  = sum_k sum_l a_k a_l / (b_k + b_l)^m,   m = 1, 2, 3
//
//   T^2 <= S1 + 2 S2 + 2 S3                (Cauchy-Schwarz bound)
//   T^2 <= 2 S2 + lambda sqrt(S1 S3)       (reverse Hilbert, lambda = 2 sqrt 2)

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revhilbert/error.hpp"
#include "revhilbert/numerics.hpp"

namespace revhilbert {

inline constexpr double kTwoSqrtTwo = 2.0 * std::numbers::sqrt2;

/// Relative slack used by every inequality check.
inline constexpr double kCheckSlack = 1e-12;

/// Positive weights `a` and nodes `b` of equal length n >= 1.
class WeightVectorPair {
public:
    WeightVectorPair(std::vector<double> a, std::vector<double> b) : a_(std::move(a)), b_(std::move(b)) {
        if (a_.empty()) {
            throw InvalidInput("WeightVectorPair: vectors must be non-empty");
        }
        if (a_.size() != b_.size()) {
            throw InvalidInput("WeightVectorPair: length mismatch (" + std::to_string(a_.size()) + " weights, " +
                               std::to_string(b_.size()) + " nodes)");
        }
        for (std::size_t i = 0; i < a_.size(); ++i) {
            check_entry(a_[i], "weight", i);
            check_entry(b_[i], "node", i);
        }
    }

    [[nodiscard]] std::span<const double> a() const noexcept { return a_; }
    [[nodiscard]] std::span<const double> b() const noexcept { return b_; }
    [[nodiscard]] std::size_t size() const noexcept { return a_.size(); }

    friend bool operator==(const WeightVectorPair&, const WeightVectorPair&) = default;

private:
    static void check_entry(double v, const char* what, std::size_t i) {
        // Subnormals and zeros are rejected.
        if (!std::isfinite(v) || !(v >= std::numeric_limits<double>::min())) {
            throw InvalidInput(std::string("WeightVectorPair: ") + what + " at index " + std::to_string(i) +
                               " must be a finite positive normal number, got " + std::to_string(v));
        }
    }

    std::vector<double> a_;
    std::vector<double> b_;
};

struct HilbertQuantities {
    double T = 0.0;
    double S1 = 0.0;
    double S2 = 0.0;
    double S3 = 0.0;
    double lambda_emp = 0.0;
};

/// Outcome of an inequality check `lhs <= rhs`. `margin` is rhs - lhs without
/// slack; `holds` allows kCheckSlack relative to rhs.
struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    double margin = 0.0;
};

namespace detail {

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw InvalidInput(std::string(what) + ": result is not finite (overflow)");
    }
}

/// sqrt(S1 S3); InvalidInput when the product underflows to 0 or overflows.
inline double root_s1_s3(double s1, double s3) {
    const double product = s1 * s3;
    if (!(product > 0.0) || !std::isfinite(product)) {
        throw InvalidInput("S1 * S3 underflows or overflows; lambda is undefined");
    }
    return std::sqrt(product);
}

inline InequalityReport make_report(double lhs, double rhs) {
    return InequalityReport{lhs, rhs, lhs <= rhs + kCheckSlack * std::abs(rhs), rhs - lhs};
}

} // namespace detail

inline double compute_T(const WeightVectorPair& pair) {
    CompensatedSum acc;
    const auto a = pair.a();
    const auto b = pair.b();
    for (std::size_t k = 0; k < pair.size(); ++k) {
        acc += a[k] / b[k];
    }
    const double t = acc.value();
    detail::require_finite(t, "compute_T");
    return t;
}

/// Full n x n double sum in row-major order (k outer, l inner).
inline double compute_S(const WeightVectorPair& pair, int m) {
    if (m < 1 || m > 3) {
        throw InvalidInput("compute_S: exponent m must be 1, 2 or 3, got " + std::to_string(m));
    }
    CompensatedSum acc;
    const auto a = pair.a();
    const auto b = pair.b();
    const std::size_t n = pair.size();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            const double s = b[k] + b[l];
            double denom = s;
            if (m >= 2) denom *= s;
            if (m == 3) denom *= s;
            acc += (a[k] * a[l]) / denom;
        }
    }
    const double v = acc.value();
    detail::require_finite(v, "compute_S");
    return v;
}

/// (T^2 - 2 S2) / sqrt(S1 S3). Negative values are legal.
inline double empirical_lambda(const HilbertQuantities& q) {
    if (!(q.T > 0.0 && q.S1 > 0.0 && q.S2 > 0.0 && q.S3 > 0.0)) {
        throw InvalidInput("empirical_lambda: T, S1, S2, S3 must all be positive");
    }
    const double root = detail::root_s1_s3(q.S1, q.S3);
    const double lambda = (q.T * q.T - 2.0 * q.S2) / root;
    detail::require_finite(lambda, "empirical_lambda");
    return lambda;
}

inline HilbertQuantities compute_quantities(const WeightVectorPair& pair) {
    HilbertQuantities q;
    q.T = compute_T(pair);
    q.S1 = compute_S(pair, 1);
    q.S2 = compute_S(pair, 2);
    q.S3 = compute_S(pair, 3);
    q.lambda_emp = empirical_lambda(q);
    return q;
}

/// T^2 <= S1 + 2 S2 + 2 S3.
inline InequalityReport check_cs_bound(const WeightVectorPair& pair) {
    const double t = compute_T(pair);
    const double s1 = compute_S(pair, 1);
    const double s2 = compute_S(pair, 2);
    const double s3 = compute_S(pair, 3);
    return detail::make_report(t * t, s1 + 2.0 * s2 + 2.0 * s3);
}

/// sqrt(2 S3 / S1): the dilation that turns the Cauchy-Schwarz bound into
/// the reverse Hilbert inequality with constant 2 sqrt 2.
inline double optimal_scale(const WeightVectorPair& pair) {
    const double s1 = compute_S(pair, 1);
    const double s3 = compute_S(pair, 3);
    const double scale = std::sqrt(2.0 * s3 / s1);
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw InvalidInput("optimal_scale: S3 / S1 underflows or overflows");
    }
    return scale;
}

inline InequalityReport check_reverse_hilbert(const HilbertQuantities& q, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("check_reverse_hilbert: lambda must be finite and >= 0");
    }
    const double root = detail::root_s1_s3(q.S1, q.S3);
    return detail::make_report(q.T * q.T, 2.0 * q.S2 + lambda * root);
}

inline InequalityReport check_reverse_hilbert(const WeightVectorPair& pair, double lambda = kTwoSqrtTwo) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("check_reverse_hilbert: lambda must be finite and >= 0");
    }
    HilbertQuantities q;
    q.T = compute_T(pair);
    q.S1 = compute_S(pair, 1);
    q.S2 = compute_S(pair, 2);
    q.S3 = compute_S(pair, 3);
    return check_reverse_hilbert(q, lambda);
}

/// (lambda a, lambda b).
inline WeightVectorPair scale_pair(const WeightVectorPair& pair, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("scale_pair: lambda must be finite and > 0");
    }
    std::vector<double> a(pair.a().begin(), pair.a().end());
    std::vector<double> b(pair.b().begin(), pair.b().end());
    for (auto& v : a) v *= lambda;
    for (auto& v : b) v *= lambda;
    return WeightVectorPair(std::move(a), std::move(b));
}

} // namespace revhilbert
