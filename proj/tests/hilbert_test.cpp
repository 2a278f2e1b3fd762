#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "revhilbert/hilbert.hpp"
#include "revhilbert/numerics.hpp"
#include "test_support.hpp"

namespace {

using namespace revhilbert;
using revhilbert::test_support::PairCorpus;
using revhilbert::test_support::relative_difference;

using Rational = boost::multiprecision::cpp_rational;

// Exact oracle for integer-valued pairs.
Rational exact_T(const std::vector<long long>& a, const std::vector<long long>& b) {
    Rational sum = 0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += Rational(a[k]) / b[k];
    return sum;
}

Rational exact_S(const std::vector<long long>& a, const std::vector<long long>& b, int m) {
    Rational sum = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t l = 0; l < a.size(); ++l) {
            long long d = 1;
            for (int i = 0; i < m; ++i) d *= b[k] + b[l];
            sum += Rational(a[k] * a[l]) / d;
        }
    }
    return sum;
}

double to_double(const Rational& r) {
    return r.convert_to<double>();
}

WeightVectorPair pair_of(std::vector<double> a, std::vector<double> b) {
    return WeightVectorPair(std::move(a), std::move(b));
}

TEST(WeightVectorPair, RejectsInvalid) {
    EXPECT_THROW(pair_of({}, {}), InvalidInput);
    EXPECT_THROW(pair_of({1.0}, {1.0, 2.0}), InvalidInput);
    EXPECT_THROW(pair_of({0.0}, {1.0}), InvalidInput);
    EXPECT_THROW(pair_of({1.0}, {-1.0}), InvalidInput);
    EXPECT_THROW(pair_of({std::numeric_limits<double>::denorm_min()}, {1.0}), InvalidInput);
    EXPECT_THROW(pair_of({std::numeric_limits<double>::infinity()}, {1.0}), InvalidInput);
    EXPECT_NO_THROW(pair_of({std::numeric_limits<double>::min()}, {1.0}));
}

TEST(ComputeT, Examples) {
    EXPECT_EQ(compute_T(pair_of({1}, {1})), 1.0);
    EXPECT_EQ(compute_T(pair_of({1, 2}, {2, 4})), 1.0);
    EXPECT_EQ(compute_T(pair_of({1, 1}, {1, 2})), to_double(exact_T({1, 1}, {1, 2})));
    EXPECT_EQ(to_double(exact_T({1, 1}, {1, 2})), 1.5);
}

TEST(ComputeS, Examples) {
    EXPECT_EQ(compute_S(pair_of({1}, {1}), 1), 0.5);
    EXPECT_EQ(compute_S(pair_of({1}, {1}), 3), 0.125);
    EXPECT_EQ(exact_S({1, 1}, {1, 2}, 1), Rational(17) / 12);
    EXPECT_NEAR(compute_S(pair_of({1, 1}, {1, 2}), 1), 17.0 / 12.0, 1e-15);
}

TEST(ComputeS, RejectsExponent) {
    const auto p = pair_of({1}, {1});
    EXPECT_THROW(compute_S(p, 0), InvalidInput);
    EXPECT_THROW(compute_S(p, 4), InvalidInput);
}

TEST(ComputeS, MatchesRationalOracleOnIntegerPairs) {
    std::mt19937_64 rng(revhilbert::test_support::property_seed() + 11);
    std::uniform_int_distribution<long long> entry(1, 9);
    std::uniform_int_distribution<int> size(1, 5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size(rng);
        std::vector<long long> a(n), b(n);
        for (auto& v : a) v = entry(rng);
        for (auto& v : b) v = entry(rng);
        const auto p = pair_of(std::vector<double>(a.begin(), a.end()), std::vector<double>(b.begin(), b.end()));
        EXPECT_NEAR(compute_T(p), to_double(exact_T(a, b)), 1e-15 * to_double(exact_T(a, b)));
        for (int m = 1; m <= 3; ++m) {
            const double exact = to_double(exact_S(a, b, m));
            EXPECT_NEAR(compute_S(p, m), exact, 1e-15 * exact) << "m=" << m;
        }
    }
}

TEST(EmpiricalLambda, SingleTermIsTwo) {
    const auto q = compute_quantities(pair_of({1}, {1}));
    EXPECT_EQ(q.T, 1.0);
    EXPECT_EQ(q.S1, 0.5);
    EXPECT_EQ(q.S2, 0.25);
    EXPECT_EQ(q.S3, 0.125);
    EXPECT_EQ(q.lambda_emp, 2.0);
    EXPECT_EQ(empirical_lambda(q), 2.0);
}

TEST(EmpiricalLambda, ScaleInvariant) {
    PairCorpus corpus(8, 1e-2, 1e2, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = corpus.next();
        const double base = compute_quantities(p).lambda_emp;
        for (double s : {0.5, 2.0, 10.0}) {
            EXPECT_LE(std::abs(compute_quantities(scale_pair(p, s)).lambda_emp - base), 1e-12 * std::max(1.0, std::abs(base)));
        }
    }
}

TEST(EmpiricalLambda, RejectsUnderflow) {
    HilbertQuantities q{1.0, 1e-200, 1.0, 1e-200, 0.0};
    EXPECT_THROW(empirical_lambda(q), InvalidInput);
    EXPECT_THROW(check_reverse_hilbert(q, 1.0), InvalidInput);
    EXPECT_THROW(empirical_lambda(HilbertQuantities{1.0, 0.0, 1.0, 1.0, 0.0}), InvalidInput);
}

TEST(CheckCsBound, Examples) {
    auto r = check_cs_bound(pair_of({1}, {1}));
    EXPECT_EQ(r.lhs, 1.0);
    EXPECT_EQ(r.rhs, 1.25);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.margin, 0.25);

    r = check_cs_bound(pair_of({1, 1}, {1, 1}));
    EXPECT_EQ(r.lhs, 4.0);
    EXPECT_EQ(r.rhs, 5.0);
    EXPECT_TRUE(r.holds);

    const double eps = 1e-8;
    r = check_cs_bound(pair_of({eps}, {1}));
    EXPECT_NEAR(r.lhs, eps * eps, 1e-30);
    EXPECT_NEAR(r.rhs, 1.25 * eps * eps, 1e-30);
    EXPECT_TRUE(r.holds);
}

TEST(OptimalScale, Examples) {
    EXPECT_NEAR(optimal_scale(pair_of({1}, {1})), std::sqrt(0.5), 1e-16);

    // Exact S3 = 1/8 + 2/27 + 1/64 = 371/1728, S1 = 17/12.
    EXPECT_EQ(exact_S({1, 1}, {1, 2}, 3), Rational(371) / 1728);
    const Rational ratio = Rational(2) * exact_S({1, 1}, {1, 2}, 3) / exact_S({1, 1}, {1, 2}, 1);
    EXPECT_NEAR(optimal_scale(pair_of({1, 1}, {1, 2})), std::sqrt(to_double(ratio)), 1e-15);
    EXPECT_NEAR(optimal_scale(pair_of({1, 1}, {1, 2})), 0.55054933944506617, 1e-15);
}

TEST(OptimalScale, FixedPointWhenS3IsHalfS1) {
    // Single term: S3 / S1 = 1 / (2b)^2, which is 1/2 at b = 1/sqrt 2.
    const double b = std::sqrt(2.0) / 2.0;
    const auto p = pair_of({3.0}, {b});
    EXPECT_NEAR(compute_S(p, 3) / compute_S(p, 1), 0.5, 1e-15);
    EXPECT_NEAR(optimal_scale(p), 1.0, 1e-15);
}

TEST(OptimalScale, ReproducesReverseHilbertRhs) {
    PairCorpus corpus(8, 1e-3, 1e3, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = corpus.next();
        const auto q = compute_quantities(p);
        const auto scaled = check_cs_bound(scale_pair(p, optimal_scale(p)));
        const double expected = 2.0 * q.S2 + kTwoSqrtTwo * std::sqrt(q.S1 * q.S3);
        EXPECT_LE(relative_difference(scaled.rhs, expected), 1e-12);
    }
}

TEST(CheckReverseHilbert, Examples) {
    const auto p = pair_of({1}, {1});
    auto r = check_reverse_hilbert(p, kTwoSqrtTwo);
    EXPECT_EQ(r.lhs, 1.0);
    EXPECT_NEAR(r.rhs, 0.5 + kTwoSqrtTwo / 4.0, 1e-15);
    EXPECT_TRUE(r.holds);

    r = check_reverse_hilbert(p, 2.0);
    EXPECT_EQ(r.rhs, 1.0);
    EXPECT_EQ(r.margin, 0.0);
    EXPECT_TRUE(r.holds);

    r = check_reverse_hilbert(p, 1.9);
    EXPECT_NEAR(r.rhs, 0.975, 1e-15);
    EXPECT_FALSE(r.holds);

    EXPECT_THROW(check_reverse_hilbert(p, -0.1), InvalidInput);
}

TEST(ScalePair, Examples) {
    const auto p = pair_of({1, 2}, {3, 4});
    EXPECT_EQ(scale_pair(p, 1.0), p);
    EXPECT_EQ(scale_pair(p, 2.0), pair_of({2, 4}, {6, 8}));
    EXPECT_THROW(scale_pair(p, 0.0), InvalidInput);
    EXPECT_THROW(scale_pair(p, -1.0), InvalidInput);

    PairCorpus corpus(16, 1e-3, 1e3, 7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto q = corpus.next();
        EXPECT_EQ(scale_pair(scale_pair(q, 0.5), 2.0), q);
    }
}

TEST(Properties, ScalingLaws) {
    PairCorpus corpus(16, 1e-3, 1e3, 13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = corpus.next();
        for (double s : {0.5, 2.0, 10.0}) {
            const auto sp = scale_pair(p, s);
            EXPECT_LE(relative_difference(compute_T(sp), compute_T(p)), 1e-13);
            for (int m = 1; m <= 3; ++m) {
                EXPECT_LE(relative_difference(compute_S(sp, m), std::pow(s, 2 - m) * compute_S(p, m)), 1e-12);
            }
        }
    }
}

TEST(Properties, PermutationInvariance) {
    PairCorpus corpus(16, 1e-3, 1e3, 17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = corpus.next();
        std::vector<std::size_t> idx(p.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), corpus.rng());
        std::vector<double> a, b;
        for (auto i : idx) {
            a.push_back(p.a()[i]);
            b.push_back(p.b()[i]);
        }
        const auto permuted = pair_of(a, b);
        EXPECT_LE(relative_difference(compute_T(permuted), compute_T(p)), 1e-13);
        for (int m = 1; m <= 3; ++m) {
            EXPECT_LE(relative_difference(compute_S(permuted, m), compute_S(p, m)), 1e-13);
        }
    }
}

TEST(Properties, ReverseHilbertAndCauchySchwarz) {
    PairCorpus corpus(8, 1e-3, 1e3, 19);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto p = corpus.next();
        EXPECT_LE(compute_quantities(p).lambda_emp, kTwoSqrtTwo + 1e-9);
        EXPECT_TRUE(check_cs_bound(p).holds);
        EXPECT_TRUE(check_reverse_hilbert(p).holds);
    }
}

TEST(Properties, IntegralSumIdentity) {
    // int_0^inf t^m f(t)^2 dt = m! S^(m+1), f(t) = sum_j a_j e^{-b_j t}
    PairCorpus corpus(4, 1e-3, 1e3, 23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = corpus.next();
        auto f = [&p](double t) {
            CompensatedSum acc;
            for (std::size_t j = 0; j < p.size(); ++j) acc += p.a()[j] * std::exp(-p.b()[j] * t);
            return acc.value();
        };
        double factorial = 1.0;
        for (int m = 0; m <= 2; ++m) {
            if (m > 0) factorial *= m;
            const auto r = integrate_semiline([&](double t) { const double v = f(t); return std::pow(t, m) * v * v; },
                                              QuadratureOptions{.abs_tol = 0.0, .rel_tol = 1e-11});
            EXPECT_LE(relative_difference(r.value, factorial * compute_S(p, m + 1)), 1e-8) << "m=" << m;
        }
    }
}

} // namespace
