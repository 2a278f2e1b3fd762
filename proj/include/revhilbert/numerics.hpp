#pragma once

// Accuracy-critical building blocks: Neumaier-compensated summation and an
// adaptive Gauss-Kronrod quadrature used as an independent oracle.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "revhilbert/error.hpp"

namespace revhilbert {

/// Running Neumaier (improved Kahan-Babuska) sum.
class CompensatedSum {
public:
    constexpr void add(double term) noexcept {
        const double t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term)) {
            compensation_ += (sum_ - t) + term;
        } else {
            compensation_ += (term - t) + sum_;
        }
        sum_ = t;
    }

    constexpr CompensatedSum& operator+=(double term) noexcept {
        add(term);
        return *this;
    }

    [[nodiscard]] constexpr double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/// Sum of `terms` with Neumaier compensation. Throws InvalidInput on a
/// non-finite term.
inline double compensated_sum(std::span<const double> terms) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!std::isfinite(terms[i])) {
            throw InvalidInput("compensated_sum: non-finite term at index " + std::to_string(i));
        }
        acc.add(terms[i]);
    }
    return acc.value();
}

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  // absolute
    std::size_t evaluations = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_evaluations = 1'000'000;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(const Panel& other) const noexcept { return error < other.error; }
};

template <typename F>
double checked_eval(F& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
        throw InvalidInput("quadrature: integrand is not finite at x = " + std::to_string(x));
    }
    return y;
}

template <typename F>
Panel gauss_kronrod_15(F& f, double lo, double hi) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();

    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    std::array<double, 15> values{};
    const double f_centre = checked_eval(f, centre);
    values[7] = f_centre;
    double kronrod = f_centre * kKronrodWeights[7];
    double gauss = f_centre * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);

    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double f_lo = checked_eval(f, centre - dx);
        const double f_hi = checked_eval(f, centre + dx);
        values[j] = f_lo;
        values[14 - j] = f_hi;
        kronrod += kKronrodWeights[j] * (f_lo + f_hi);
        abs_sum += kKronrodWeights[j] * (std::abs(f_lo) + std::abs(f_hi));
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * (f_lo + f_hi);
        }
    }

    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(f_centre - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        asc += kKronrodWeights[j] * (std::abs(values[j] - mean) + std::abs(values[14 - j] - mean));
    }

    const double result = kronrod * half;
    const double abs_result = abs_sum * std::abs(half);
    const double asc_result = asc * std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    if (asc_result != 0.0 && error != 0.0) {
        error = asc_result * std::min(1.0, std::pow(200.0 * error / asc_result, 1.5));
    }
    if (abs_result > tiny / (50.0 * eps)) {
        error = std::max(50.0 * eps * abs_result, error);
    }
    return Panel{lo, hi, result, error};
}

template <typename F>
QuadratureResult adaptive(F&& f, std::span<const double> breakpoints, const QuadratureOptions& opts) {
    if (!(opts.abs_tol > 0.0) && !(opts.rel_tol > 0.0)) {
        throw InvalidInput("quadrature: at least one of abs_tol, rel_tol must be positive");
    }
    std::priority_queue<Panel> panels;
    std::size_t evaluations = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        panels.push(gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]));
        evaluations += 15;
    }

    auto totals = [&panels] {
        // Copy of the heap contents; panel counts stay in the low thousands.
        auto copy = panels;
        CompensatedSum value;
        CompensatedSum error;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            copy.pop();
        }
        return std::pair{value.value(), error.value()};
    };

    double value = 0.0;
    double error = 0.0;
    // Running totals are kept incrementally and refreshed from scratch
    // periodically to stop drift.
    std::tie(value, error) = totals();
    std::size_t since_refresh = 0;

    while (true) {
        const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
        if (error <= target) {
            std::tie(value, error) = totals();
            if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
                break;
            }
        }
        if (evaluations + 30 > opts.max_evaluations) {
            std::tie(value, error) = totals();
            throw BudgetExceeded("quadrature: evaluation budget of " + std::to_string(opts.max_evaluations) +
                                     " exhausted (estimate " + std::to_string(value) + ", error " +
                                     std::to_string(error) + ")",
                                 value);
        }
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(worst.lo < mid && mid < worst.hi)) {
            // Panel cannot be split further in binary64; accept what we have.
            std::tie(value, error) = totals();
            break;
        }
        panels.pop();
        const Panel left = gauss_kronrod_15(f, worst.lo, mid);
        const Panel right = gauss_kronrod_15(f, mid, worst.hi);
        evaluations += 30;
        value += (left.value + right.value) - worst.value;
        error += (left.error + right.error) - worst.error;
        panels.push(left);
        panels.push(right);
        if (++since_refresh == 64) {
            std::tie(value, error) = totals();
            since_refresh = 0;
        }
    }
    return QuadratureResult{value, std::max(error, 0.0), evaluations};
}

} // namespace detail

/// Adaptive G7-K15 quadrature of `f` over the finite interval [lo, hi].
template <typename F>
QuadratureResult integrate_interval(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw InvalidInput("integrate_interval: need finite lo < hi");
    }
    const std::array<double, 2> bp{lo, hi};
    return detail::adaptive(f, bp, opts);
}

/// Integral of `f` over [0, inf) through t = u / (1 - u).
template <typename F>
QuadratureResult integrate_semiline(F&& f, const QuadratureOptions& opts) {
    auto mapped = [&f](double u) {
        const double w = 1.0 - u;
        if (!(w > 0.0)) {
            return 0.0;
        }
        const double y = f(u / w);
        return y == 0.0 ? 0.0 : y / (w * w);
    };
    const std::array<double, 2> bp{0.0, 1.0};
    return detail::adaptive(mapped, bp, opts);
}

template <typename F>
QuadratureResult integrate_semiline(F&& f, double tol) {
    if (!(tol > 0.0)) {
        throw InvalidInput("integrate_semiline: tol must be positive");
    }
    return integrate_semiline(f, QuadratureOptions{.abs_tol = tol});
}

/// Integral of `f` over the real line through x = u / (1 - u^2). The first
/// split is at x = 0.
template <typename F>
QuadratureResult integrate_line(F&& f, const QuadratureOptions& opts) {
    auto mapped = [&f](double u) {
        const double w = 1.0 - u * u;
        if (!(w > 0.0)) {
            return 0.0;
        }
        const double y = f(u / w);
        return y == 0.0 ? 0.0 : y * ((1.0 + u * u) / (w * w));
    };
    const std::array<double, 3> bp{-1.0, 0.0, 1.0};
    return detail::adaptive(mapped, bp, opts);
}

template <typename F>
QuadratureResult integrate_line(F&& f, double tol) {
    if (!(tol > 0.0)) {
        throw InvalidInput("integrate_line: tol must be positive");
    }
    return integrate_line(f, QuadratureOptions{.abs_tol = tol});
}

} // namespace revhilbert
