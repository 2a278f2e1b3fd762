#pragma once

// Why 2 sqrt 2 cannot be lowered, checked numerically: the truncated
// exponential families (a_n(h), b_n(h))_{|n|<=nu} satisfy
//
//   g(delta(h)) <= lambda_emp(h) <= 2 sqrt 2,
//   g(delta)    = 3 sqrt 2 [(1 - 2 delta)^2 - (1 + delta)^2 / 3] / (1 + delta)^2,
//
// so lambda_emp(h) -> 2 sqrt 2 as h -> 0.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revhilbert/error.hpp"
#include "revhilbert/hilbert.hpp"
#include "revhilbert/kernel_approx.hpp"

namespace revhilbert {

inline constexpr double kMinSweepStep = 0.05;
inline constexpr double kMaxSweepStep = 2.0;

/// Slack on the upper bound lambda_emp <= 2 sqrt 2.
inline constexpr double kUpperSlack = 1e-9;

/// Absolute slack on the lower side g(delta) <= lambda_emp. Once the gap is at
/// binary64 resolution, rounding in the n^2 sums moves lambda_emp by ~1e-14.
inline constexpr double kLowerSlack = 1e-12;

/// Relative slack of the bound-chain checks.
inline constexpr double kChainSlack = 1e-10;

/// Gaps below this are at binary64 resolution.
inline constexpr double kSaturationGap = 1e-12;

/// Sweeps only assert gap monotonicity between steps whose ratio is at most this.
inline constexpr double kMonotoneStepRatio = 0.8;

/// Largest delta accepted by rigorous_lower_bound.
inline constexpr double kLowerBoundDeltaLimit = 0.2;

/// g(delta) is a genuine lower bound only while (1 - 2 delta)^2 > (1 + delta)^2 / 3,
/// i.e. delta < (sqrt 3 - 1) / (2 sqrt 3 + 1).
inline double informative_delta_limit() {
    const double r3 = std::numbers::sqrt3;
    return (r3 - 1.0) / (2.0 * r3 + 1.0);
}

struct LambdaCertificate {
    double h = 0.0;
    int nu = 0;
    double delta = 0.0;
    double T = 0.0;
    double S1 = 0.0;
    double S2 = 0.0;
    double S3 = 0.0;
    double lambda_emp = 0.0;
    double lower_bound_g = 0.0;  // -inf when delta is too large for g to bound anything
    double upper_bound = kTwoSqrtTwo;
    double gap = 0.0;  // upper_bound - lambda_emp

    [[nodiscard]] bool sandwich_holds() const noexcept {
        return lower_bound_g - kLowerSlack <= lambda_emp && lambda_emp <= upper_bound + kUpperSlack;
    }
    [[nodiscard]] bool saturated() const noexcept { return gap < kSaturationGap; }
};

struct BoundChainReport {
    bool s1_ok = false;  // S1 <= (1+delta)^2 / 3
    bool s2_ok = false;  // S2 <= (1+delta)^2 / 6
    bool s3_ok = false;  // S3 <= (1+delta)^2 / 6
    bool t_ok = false;   // T >= 1 - 2 delta

    [[nodiscard]] bool all() const noexcept { return s1_ok && s2_ok && s3_ok && t_ok; }
};

inline BoundChainReport bound_chain_check(const LambdaCertificate& cert) {
    const double up = (1.0 + cert.delta) * (1.0 + cert.delta) * (1.0 + kChainSlack);
    BoundChainReport r;
    r.s1_ok = cert.S1 <= up / 3.0;
    r.s2_ok = cert.S2 <= up / 6.0;
    r.s3_ok = cert.S3 <= up / 6.0;
    r.t_ok = cert.T >= (1.0 - 2.0 * cert.delta) * (1.0 - kChainSlack);
    return r;
}

/// g(delta). Equals 2 sqrt 2 at delta = 0 and decreases on [0, 0.2).
inline double rigorous_lower_bound(double delta) {
    if (!(delta >= 0.0) || !(delta < kLowerBoundDeltaLimit)) {
        throw InvalidInput("rigorous_lower_bound: delta must lie in [0, 0.2), got " + std::to_string(delta));
    }
    const double up = (1.0 + delta) * (1.0 + delta);
    const double lo = (1.0 - 2.0 * delta) * (1.0 - 2.0 * delta);
    return std::numbers::sqrt2 * (3.0 * lo / up - 1.0);
}

/// Terms of `approx` as a WeightVectorPair. Terms whose weight or rate is
/// below the smallest normal (exp underflow) are dropped.
inline WeightVectorPair to_pair(const ExpSumApproximation& approx) {
    std::vector<double> a;
    std::vector<double> b;
    a.reserve(approx.terms.size());
    b.reserve(approx.terms.size());
    for (const auto& term : approx.terms) {
        if (term.weight >= std::numeric_limits<double>::min() && term.rate >= std::numeric_limits<double>::min()) {
            a.push_back(term.weight);
            b.push_back(term.rate);
        }
    }
    return WeightVectorPair(std::move(a), std::move(b));
}

/// Certificate for an already built family (which need not meet the
/// truncation criterion).
inline LambdaCertificate certify(const ExpSumApproximation& approx) {
    const auto q = compute_quantities(to_pair(approx));
    LambdaCertificate cert;
    cert.h = approx.h;
    cert.nu = approx.nu;
    cert.delta = approx.delta;
    cert.T = q.T;
    cert.S1 = q.S1;
    cert.S2 = q.S2;
    cert.S3 = q.S3;
    cert.lambda_emp = q.lambda_emp;
    cert.lower_bound_g = approx.delta < informative_delta_limit() ? rigorous_lower_bound(approx.delta)
                                                                  : -std::numeric_limits<double>::infinity();
    cert.gap = cert.upper_bound - cert.lambda_emp;
    return cert;
}

inline void require_sweep_step(double h) {
    if (!(h >= kMinSweepStep && h <= kMaxSweepStep)) {
        throw InvalidInput("step h must lie in [0.05, 2], got " + std::to_string(h));
    }
}

inline LambdaCertificate run_certificate(double h) {
    require_sweep_step(h);
    return certify(generate_terms(h, choose_truncation(h)));
}

/// Thrown when a certificate cannot be built mid-sweep; carries the
/// certificates completed before the failure.
class SweepAborted : public Error {
public:
    SweepAborted(const std::string& what, std::vector<LambdaCertificate> partial)
        : Error(what), partial_(std::move(partial)) {}

    [[nodiscard]] const std::vector<LambdaCertificate>& partial() const noexcept { return partial_; }

private:
    std::vector<LambdaCertificate> partial_;
};

struct SweepResult {
    std::vector<LambdaCertificate> certificates;
    bool gap_monotone = true;
    bool all_sandwiched = true;

    [[nodiscard]] bool pass() const noexcept { return gap_monotone && all_sandwiched; }
};

/// One certificate per h (strictly decreasing, each in [0.05, 2]). Gap
/// monotonicity is asserted between neighbours with ratio <= 0.8 unless both
/// are saturated.
inline SweepResult sweep(std::span<const double> h_values) {
    if (h_values.empty()) {
        throw InvalidInput("sweep: need at least one step");
    }
    for (std::size_t i = 0; i < h_values.size(); ++i) {
        require_sweep_step(h_values[i]);
        if (i > 0 && !(h_values[i] < h_values[i - 1])) {
            throw InvalidInput("sweep: steps must be strictly decreasing");
        }
    }
    SweepResult result;
    for (const double h : h_values) {
        try {
            result.certificates.push_back(run_certificate(h));
        } catch (const Error& e) {
            throw SweepAborted("sweep aborted at h = " + std::to_string(h) + ": " + e.what(),
                               std::move(result.certificates));
        }
        const auto& cert = result.certificates.back();
        result.all_sandwiched = result.all_sandwiched && cert.sandwich_holds();
    }
    for (std::size_t i = 1; i < result.certificates.size(); ++i) {
        const auto& prev = result.certificates[i - 1];
        const auto& cur = result.certificates[i];
        if (cur.h / prev.h > kMonotoneStepRatio || (prev.saturated() && cur.saturated())) {
            continue;
        }
        if (cur.gap > prev.gap) {
            result.gap_monotone = false;
        }
    }
    return result;
}

} // namespace revhilbert
