#pragma once

// Exponential-sum approximation of the kernel 1/(1+t)^2.
//
// The kernel is the integral over the real line of the density
//
//   f_t(x) = exp(2x - (1+t) e^x),
//
// whose Fourier transform has modulus
//
//   |f_t^(w)| = (1+t)^-2 sqrt(pi w (1+w^2) / sinh(pi w)) <= (1+t)^-2 / cosh(lambda0 w),
//   lambda0   = sqrt(pi^2/6 - 1).
//
// The trapezoidal rule with step h applied to that integral gives the
// positive exponential sum
//
//   sum_n a_n e^{-b_n t},   a_n = h exp(2nh - e^{nh}),   b_n = e^{nh},
//
// and Poisson summation bounds its relative error uniformly in t >= 0 by
//
//   delta(h) = 4 / (exp(2 pi lambda0 / h) - 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "revhilbert/error.hpp"
#include "revhilbert/numerics.hpp"

namespace revhilbert {

/// Largest lambda with pi x (1+x^2) / sinh(pi x) <= 1 / cosh^2(lambda x) for all x.
inline double lambda0() {
    return std::sqrt(std::numbers::pi * std::numbers::pi / 6.0 - 1.0);
}

inline double target_kernel(double t) {
    if (!(t >= 0.0)) {
        throw InvalidInput("target_kernel: t must be >= 0");
    }
    const double s = 1.0 + t;
    return 1.0 / (s * s);
}

/// exp(2x - (1+t) e^x). Underflows to 0 for large |x|.
inline double ft_density(double x, double t) {
    if (!(t >= 0.0)) {
        throw InvalidInput("ft_density: t must be >= 0");
    }
    return std::exp(2.0 * x - (1.0 + t) * std::exp(x));
}

namespace detail {

/// pi w / sinh(pi w), even in w, equal to 1 at w = 0.
inline double pi_w_over_sinh(double w) {
    const double z = std::numbers::pi * std::abs(w);
    if (z < 1e-4 * std::numbers::pi) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 + 7.0 * z2 * z2 / 360.0;
    }
    if (z < 40.0) {
        return z / std::sinh(z);
    }
    // log sinh z = z - log 2 + log(1 - e^{-2z})
    return std::exp(std::log(z) - (z - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * z))));
}

} // namespace detail

/// (1+t)^-2 sqrt(pi w (1+w^2) / sinh(pi w)).
inline double ft_hat_magnitude(double w, double t) {
    if (!(t >= 0.0)) {
        throw InvalidInput("ft_hat_magnitude: t must be >= 0");
    }
    const double aw = std::abs(w);
    double root = 0.0;
    if (aw < 50.0) {
        root = std::sqrt((1.0 + aw * aw) * detail::pi_w_over_sinh(aw));
    } else {
        const double z = std::numbers::pi * aw;
        const double log_sinh = z - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * z));
        root = std::exp(0.5 * (std::log(z) + std::log1p(aw * aw) - log_sinh));
    }
    return root * target_kernel(t);
}

struct Lm0Coefficient {
    int n = 2;
    double value = 0.0;
};

/// Coefficient a_n of the series
///   sinh(pi x)/(pi x) - (1+x^2) cosh^2(lambda0 x) = sum_{n>=2} (1 - a_n) (pi x)^{2n} / (2n+1)!,
///   a_n = (2n+1) (2 lambda0/pi)^{2n-2} (1/3 + (2n^2 - n - 2)/pi^2).
inline Lm0Coefficient lm0_coefficient(int n) {
    if (n < 2) {
        throw InvalidInput("lm0_coefficient: n must be >= 2, got " + std::to_string(n));
    }
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double q = 2.0 * lambda0() / std::numbers::pi;
    const double nn = static_cast<double>(n);
    const double value = (2.0 * nn + 1.0) * std::pow(q, 2.0 * nn - 2.0) * (1.0 / 3.0 + (2.0 * nn * nn - nn - 2.0) / pi2);
    return Lm0Coefficient{n, value};
}

/// a_{n+1} / a_n in closed form:
///   (2/3 - 4/pi^2) (1 + 2/(2n+1)) (1 + (12n+3)/(6n^2 - 3n + pi^2 - 6)).
inline double lm0_ratio(int n) {
    if (n < 2) {
        throw InvalidInput("lm0_ratio: n must be >= 2, got " + std::to_string(n));
    }
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double nn = static_cast<double>(n);
    return (2.0 / 3.0 - 4.0 / pi2) * (1.0 + 2.0 / (2.0 * nn + 1.0)) *
           (1.0 + (12.0 * nn + 3.0) / (6.0 * nn * nn - 3.0 * nn + pi2 - 6.0));
}

/// sinh(pi x)/(pi x) - (1+x^2) cosh^2(lambda0 x), evaluated directly.
inline double lm0_gap(double x) {
    const double z = std::numbers::pi * x;
    const double sinhc = (std::abs(z) < 1e-8) ? 1.0 + z * z / 6.0 : std::sinh(z) / z;
    const double c = std::cosh(lambda0() * x);
    return sinhc - (1.0 + x * x) * c * c;
}

/// Partial sum sum_{n=2}^{last} (1 - a_n) (pi x)^{2n} / (2n+1)!.
inline double lm0_gap_series(double x, int last) {
    const double z2 = std::numbers::pi * std::numbers::pi * x * x;
    // (pi x)^4 / 5!
    double power_over_factorial = z2 * z2 / 120.0;
    CompensatedSum acc;
    for (int n = 2; n <= last; ++n) {
        acc += (1.0 - lm0_coefficient(n).value) * power_over_factorial;
        const double next = 2.0 * n + 2.0;
        power_over_factorial *= z2 / (next * (next + 1.0));
    }
    return acc.value();
}

struct MajorantReport {
    double max_violation = 0.0;
    double argmax_x = 0.0;
    bool holds = true;
};

/// pi x (1+x^2) / sinh(pi x), with the removable singularity at 0 filled in.
inline double lm0_lhs(double x) {
    return (1.0 + x * x) * detail::pi_w_over_sinh(x);
}

/// 1 / cosh^2(lambda x).
inline double lm0_rhs(double x, double lambda) {
    const double c = std::cosh(lambda * x);
    return 1.0 / (c * c);
}

/// Checks lm0_lhs(x) <= lm0_rhs(x, lambda) + 1e-12 over the grid.
inline MajorantReport lm0_majorant_check(std::span<const double> x_grid, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidInput("lm0_majorant_check: lambda must be finite and > 0");
    }
    MajorantReport report;
    for (const double x : x_grid) {
        const double violation = lm0_lhs(x) - lm0_rhs(x, lambda);
        if (violation > report.max_violation) {
            report.max_violation = violation;
            report.argmax_x = x;
        }
    }
    report.holds = report.max_violation <= 1e-12;
    return report;
}

/// delta(h) = 4 / (exp(2 pi lambda0 / h) - 1). Underflows to 0 for h below ~0.0047.
inline double delta_bound(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidInput("delta_bound: h must be finite and > 0");
    }
    return 4.0 / std::expm1(2.0 * std::numbers::pi * lambda0() / h);
}

/// Floor on any mass or tail budget; below it binary64 rounding in the sums
/// dominates.
inline constexpr double kRoundingFloor = 64.0 * std::numeric_limits<double>::epsilon();

/// Grid certificates allow this multiple of delta(h) for truncation on top of delta(h).
inline constexpr double kTailAllowanceFactor = 10.0;

/// Fraction of delta(h) that the stricter grid truncation policy spends on the tail.
inline constexpr double kGridTailFraction = 0.1;

/// Safety cap on the truncation radius.
inline constexpr int kMaxTruncation = 100'000;

struct ExpSumTerm {
    int n = 0;
    double weight = 0.0;  // a_n(h)
    double rate = 0.0;    // b_n(h)
};

struct ExpSumApproximation {
    double h = 0.0;
    int nu = 0;
    std::vector<ExpSumTerm> terms;  // n = -nu..nu, rates increasing
    double delta = 0.0;
    double tail_tol = 0.0;
    double mass = 0.0;  // sum a_n / b_n
    bool criterion_met = false;  // mass >= 1 - 2 delta
};

/// a_n(h) = h exp(2nh - e^{nh}).
inline double term_weight(int n, double h) {
    const double x = n * h;
    return h * std::exp(2.0 * x - std::exp(x));
}

/// b_n(h) = e^{nh}.
inline double term_rate(int n, double h) {
    return std::exp(n * h);
}

namespace detail {

inline void require_step(double h, const char* where) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidInput(std::string(where) + ": h must be finite and > 0");
    }
}

inline void require_radius(int nu, const char* where) {
    if (nu < 0 || nu > kMaxTruncation) {
        throw InvalidInput(std::string(where) + ": nu must lie in [0, " + std::to_string(kMaxTruncation) + "]");
    }
}

/// a_n / b_n = h exp(nh - e^{nh}).
inline double term_mass(int n, double h) {
    const double x = n * h;
    return h * std::exp(x - std::exp(x));
}

} // namespace detail

/// Lower end of the truncation criterion: 1 - 2 delta(h), less the rounding floor.
inline double mass_threshold(double h) {
    return 1.0 - 2.0 * delta_bound(h) - kRoundingFloor;
}

/// sum_{|n| <= nu} a_n / b_n.
inline double partial_mass(double h, int nu) {
    detail::require_step(h, "partial_mass");
    detail::require_radius(nu, "partial_mass");
    CompensatedSum acc;
    for (int n = -nu; n <= nu; ++n) {
        acc += detail::term_mass(n, h);
    }
    return acc.value();
}

/// Smallest nu with sum_{|n|<=nu} a_n/b_n >= 1 - 2 delta(h).
inline int choose_truncation(double h) {
    detail::require_step(h, "choose_truncation");
    const double threshold = mass_threshold(h);
    CompensatedSum acc;
    acc += detail::term_mass(0, h);
    for (int nu = 0;; ++nu) {
        if (nu > 0) {
            acc += detail::term_mass(-nu, h);
            acc += detail::term_mass(nu, h);
        }
        if (acc.value() >= threshold) {
            return nu;
        }
        if (nu == kMaxTruncation) {
            throw BudgetExceeded("choose_truncation: no nu <= " + std::to_string(kMaxTruncation) +
                                     " reaches mass " + std::to_string(threshold) + " for h = " + std::to_string(h),
                                 acc.value());
        }
    }
}

/// Upper bound on h * sum_{|n| > nu} f_t(nh), the truncated part of the
/// trapezoidal sum at a single t.
inline double truncation_tail(double h, int nu, double t) {
    detail::require_step(h, "truncation_tail");
    detail::require_radius(nu, "truncation_tail");
    if (!(t >= 0.0)) {
        throw InvalidInput("truncation_tail: t must be >= 0");
    }
    // n < -nu: f_t(nh) <= e^{2nh}, a geometric series.
    const double negative = h * std::exp(-2.0 * (nu + 1) * h) / -std::expm1(-2.0 * h);
    // n > nu: summed until the terms vanish past the peak at e^x = 2/(1+t).
    const double peak = std::log(2.0 / (1.0 + t));
    CompensatedSum positive;
    for (int n = nu + 1;; ++n) {
        const double term = h * ft_density(n * h, t);
        positive += term;
        if (n * h > peak && term < std::numeric_limits<double>::min()) {
            break;
        }
    }
    return negative + positive.value();
}

/// Upper bound on max_{0 <= t <= t_max} (1+t)^2 h sum_{|n| > nu} f_t(nh).
inline double grid_tail_bound(double h, int nu, double t_max) {
    detail::require_step(h, "grid_tail_bound");
    detail::require_radius(nu, "grid_tail_bound");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw InvalidInput("grid_tail_bound: t_max must be finite and > 0");
    }
    const double s_max = 1.0 + t_max;
    const double negative = s_max * s_max * h * std::exp(-2.0 * (nu + 1) * h) / -std::expm1(-2.0 * h);
    // For rate c, s^2 exp(-s c) on [1, s_max] peaks at s = clamp(2/c, 1, s_max).
    CompensatedSum positive;
    for (int n = nu + 1;; ++n) {
        const double c = std::exp(n * h);
        const double s = std::clamp(2.0 / c, 1.0, s_max);
        const double term = h * std::exp(2.0 * n * h - s * c) * s * s;
        positive += term;
        if (2.0 / c < 1.0 && term < std::numeric_limits<double>::min()) {
            break;
        }
    }
    return negative + positive.value();
}

/// Tail budget of the grid policy: kGridTailFraction * delta(h), floored at
/// the rounding floor.
inline double grid_tail_budget(double h) {
    return std::max(kGridTailFraction * delta_bound(h), kRoundingFloor);
}

/// Smallest nu that meets the mass criterion and whose truncated tail stays
/// below grid_tail_budget(h) relative to the kernel on [0, t_max].
inline int choose_grid_truncation(double h, double t_max) {
    detail::require_step(h, "choose_grid_truncation");
    const double budget = grid_tail_budget(h);
    // Mass tails decay like e^{nh} and kernel tails like e^{2nh}, so for small
    // h the mass criterion is the binding one.
    const double s_max = 1.0 + t_max;
    const double lead = s_max * s_max * h / -std::expm1(-2.0 * h);
    int nu = std::max(choose_truncation(h),
                      static_cast<int>(std::floor(std::log(lead / budget) / (2.0 * h))) - 2);
    for (; nu <= kMaxTruncation; ++nu) {
        const double tail = grid_tail_bound(h, nu, t_max);
        if (tail <= budget) {
            return nu;
        }
    }
    throw BudgetExceeded("choose_grid_truncation: no nu <= " + std::to_string(kMaxTruncation) +
                             " meets the tail budget for h = " + std::to_string(h),
                         grid_tail_bound(h, kMaxTruncation, t_max));
}

enum class TruncationPolicy {
    require_criterion,  // throw InsufficientTruncation when mass < 1 - 2 delta
    allow_partial,      // build anyway; criterion_met reports the outcome
};

/// Terms n = -nu..nu of the exponential sum with step h. `tail_tol` defaults
/// to the criterion budget 2 delta(h).
inline ExpSumApproximation generate_terms(double h, int nu,
                                          TruncationPolicy policy = TruncationPolicy::require_criterion,
                                          double tail_tol = std::numeric_limits<double>::quiet_NaN()) {
    detail::require_step(h, "generate_terms");
    detail::require_radius(nu, "generate_terms");
    ExpSumApproximation approx;
    approx.h = h;
    approx.nu = nu;
    approx.delta = delta_bound(h);
    approx.tail_tol = std::isnan(tail_tol) ? 2.0 * approx.delta : tail_tol;
    approx.terms.reserve(2 * static_cast<std::size_t>(nu) + 1);
    CompensatedSum mass;
    for (int n = -nu; n <= nu; ++n) {
        const ExpSumTerm term{n, term_weight(n, h), term_rate(n, h)};
        mass += term.weight / term.rate;
        approx.terms.push_back(term);
    }
    approx.mass = mass.value();
    approx.criterion_met = approx.mass >= mass_threshold(h);
    if (policy == TruncationPolicy::require_criterion && !approx.criterion_met) {
        throw InsufficientTruncation("generate_terms: nu = " + std::to_string(nu) + " gives mass " +
                                         std::to_string(approx.mass) + " below 1 - 2 delta(h) = " +
                                         std::to_string(1.0 - 2.0 * approx.delta),
                                     approx.mass);
    }
    return approx;
}

/// Family truncated by the stricter grid policy on [0, t_max].
inline ExpSumApproximation make_grid_approximation(double h, double t_max) {
    const int nu = choose_grid_truncation(h, t_max);
    return generate_terms(h, nu, TruncationPolicy::require_criterion, grid_tail_budget(h));
}

inline double evaluate_expsum(const ExpSumApproximation& approx, double t) {
    if (!(t >= 0.0)) {
        throw InvalidInput("evaluate_expsum: t must be >= 0");
    }
    CompensatedSum acc;
    for (const auto& term : approx.terms) {
        acc += term.weight * std::exp(-term.rate * t);
    }
    return acc.value();
}

/// n points with log(1+t) equally spaced on [0, log(1+t_max)].
inline std::vector<double> log_spaced_grid(double t_max, std::size_t n) {
    if (!(t_max > 0.0) || !std::isfinite(t_max) || n < 2) {
        throw InvalidInput("log_spaced_grid: need t_max > 0 and at least 2 points");
    }
    std::vector<double> grid(n);
    const double top = std::log1p(t_max);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = std::expm1(top * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    grid.front() = 0.0;
    grid.back() = t_max;
    return grid;
}

struct ErrorScanReport {
    double max_relative_error = 0.0;
    double argmax_t = 0.0;
    double bound = 0.0;  // delta + max(tail_tol, kTailAllowanceFactor * delta)
    bool holds = false;
};

/// max over the grid of (1+t)^2 |1/(1+t)^2 - sum_n a_n e^{-b_n t}|.
inline ErrorScanReport approx_error_scan(const ExpSumApproximation& approx, std::span<const double> t_grid) {
    if (t_grid.empty()) {
        throw InvalidInput("approx_error_scan: empty grid");
    }
    ErrorScanReport report;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        if (!(t >= 0.0)) {
            throw InvalidInput("approx_error_scan: grid values must be >= 0");
        }
        const double s = 1.0 + t;
        const double err = std::abs(1.0 - s * s * evaluate_expsum(approx, t));
        if (i == 0 || err > report.max_relative_error) {
            report.max_relative_error = err;
            report.argmax_t = t;
        }
    }
    report.bound = approx.delta + std::max(approx.tail_tol, kTailAllowanceFactor * approx.delta);
    report.holds = report.max_relative_error <= report.bound;
    return report;
}

struct PoissonReport {
    double lhs = 0.0;    // h sum_{|n|<=nu} f_t(nh)
    double rhs = 0.0;    // 1/(1+t)^2
    double bound = 0.0;  // delta(h)/(1+t)^2 + truncation tail + rounding floor
    bool holds = false;
};

/// Trapezoidal sum of f_t against the kernel it integrates to.
inline PoissonReport poisson_identity_check(double h, double t, int nu) {
    detail::require_step(h, "poisson_identity_check");
    detail::require_radius(nu, "poisson_identity_check");
    if (!(t >= 0.0)) {
        throw InvalidInput("poisson_identity_check: t must be >= 0");
    }
    CompensatedSum acc;
    for (int n = -nu; n <= nu; ++n) {
        acc += ft_density(n * h, t);
    }
    PoissonReport report;
    report.lhs = h * acc.value();
    report.rhs = target_kernel(t);
    report.bound = delta_bound(h) * report.rhs + truncation_tail(h, nu, t) + kRoundingFloor * report.rhs;
    report.holds = std::abs(report.lhs - report.rhs) <= report.bound;
    return report;
}

} // namespace revhilbert
