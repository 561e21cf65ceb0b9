#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "quadtrace/quadform.hpp"

using namespace quadtrace;
using quadtrace::testing::as_span;
using quadtrace::testing::rel_err;

namespace {

const double kDiag23[] = {2.0, 3.0};
const double kDiagHalf[] = {0.5, -0.5};

PolynomialCoefficients standard(std::vector<double> c) { return {Basis::Standard, std::move(c)}; }
PolynomialCoefficients cheb(std::vector<double> c) { return {Basis::Chebyshev, std::move(c)}; }

// Spectrum of a library-generated matrix scaled onto [-1, 1] with Eigen.
DenseSymmetric scaled_to_unit(const DenseSymmetric& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix(), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    Eigen::MatrixXd s = (2.0 / (hi - lo)) * a.matrix();
    s.diagonal().array() -= (lo + hi) / (hi - lo);
    return DenseSymmetric(0.5 * (s + s.transpose()));
}

Vector rademacher_vec(std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto z = quadtrace::testing::rademacher_vector(static_cast<Eigen::Index>(d), rng);
    return Vector(z.data(), z.data() + z.size());
}

Eigen::VectorXd to_eigen(const Vector& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// one_sided_standard

TEST(OneSidedStandard, DiagonalSquare) {
    const auto a = DenseSymmetric::diagonal(kDiag23);
    const auto r = one_sided_standard(a, Vector{1, 1}, standard({0, 0, 1}));
    EXPECT_DOUBLE_EQ(r.value, 13.0);
    EXPECT_EQ(r.matvecs, 2u);
    EXPECT_FALSE(r.terms.has_value());
}

TEST(OneSidedStandard, Constant) {
    const auto a = random_symmetric(5, 1);
    const Vector z{1, -2, 3, 0.5, 1};
    const auto r = one_sided_standard(a, z, standard({2.5}));
    EXPECT_DOUBLE_EQ(r.value, 2.5 * dot(z, z));
    EXPECT_EQ(r.matvecs, 0u);
}

TEST(OneSidedStandard, DensePowerOracle) {
    const auto a = random_symmetric(20, 1);
    const Vector z(20, 1.0);
    const auto r = one_sided_standard(a, z, standard({1, 1, 1, 1}));
    const double alpha[] = {1, 1, 1, 1};
    EXPECT_LE(rel_err(r.value, quadtrace::testing::dense_power_quadform(a.matrix(), to_eigen(z), alpha)), 1e-12);
    EXPECT_EQ(r.matvecs, 3u);
}

// ---------------------------------------------------------------------------
// two_sided_standard

TEST(TwoSidedStandard, DiagonalExamples) {
    const auto a = DenseSymmetric::diagonal(kDiag23);
    const auto r2 = two_sided_standard(a, Vector{1, 1}, standard({0, 0, 1}));
    EXPECT_DOUBLE_EQ(r2.value, 13.0);
    EXPECT_EQ(r2.matvecs, 1u);
    const auto r1 = two_sided_standard(a, Vector{1, 1}, standard({0, 1}));
    EXPECT_DOUBLE_EQ(r1.value, 5.0);
    EXPECT_EQ(r1.matvecs, 1u);
}

TEST(TwoSidedStandard, MatchesOneSidedDegree20) {
    const auto a = random_symmetric(100, 2);
    const auto z = rademacher_vec(100, 2);
    std::vector<double> alpha(21);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (auto& c : alpha) c = u(rng);
    const auto p = standard(alpha);
    const auto two = two_sided_standard(a, z, p);
    const auto one = one_sided_standard(a, z, p);
    EXPECT_LE(rel_err(two.value, one.value), 1e-12);
    EXPECT_EQ(two.matvecs, 10u);
    EXPECT_EQ(one.matvecs, 20u);
}

TEST(TwoSidedStandard, DensePowerOracle) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = 1 + rng() % 50;
        const std::size_t n = rng() % 11;
        const DenseSymmetric a(quadtrace::testing::scaled_random_symmetric(static_cast<Eigen::Index>(d), rng()));
        const auto z = rademacher_vec(d, rng());
        std::vector<double> alpha(n + 1);
        for (auto& c : alpha) c = u(rng);
        const auto r = two_sided_standard(a, z, standard(alpha));
        const double ref = quadtrace::testing::dense_power_quadform(a.matrix(), to_eigen(z), alpha);
        double scale = 0.0;
        for (double c : alpha) scale += std::abs(c);
        EXPECT_LE(std::abs(r.value - ref), 1e-12 * std::max(std::abs(ref), 1e-3 * scale * dot(z, z)))
            << "d=" << d << " n=" << n;
    }
}

// ---------------------------------------------------------------------------
// one_sided_chebyshev

TEST(OneSidedChebyshev, DiagonalT2) {
    const auto a = DenseSymmetric::diagonal(kDiagHalf);
    const auto r = one_sided_chebyshev(a, Vector{1, 1}, cheb({0, 0, 1}));
    EXPECT_DOUBLE_EQ(r.value, -1.0);
    EXPECT_EQ(r.matvecs, 2u);
}

TEST(OneSidedChebyshev, Constant) {
    const auto a = random_symmetric(4, 9);
    const Vector z{1, 2, 3, 4};
    const auto r = one_sided_chebyshev(a, z, cheb({-3.0}));
    EXPECT_DOUBLE_EQ(r.value, -3.0 * 30.0);
    EXPECT_EQ(r.matvecs, 0u);
}

TEST(OneSidedChebyshev, DenseRecurrenceOracle) {
    const auto a = scaled_to_unit(random_symmetric(50, 3));
    const auto z = rademacher_vec(50, 3);
    const auto p = interpolate([](double x) { return std::exp(x); }, 8);
    const auto r = one_sided_chebyshev(a, z, p);
    const double ref = quadtrace::testing::dense_chebyshev_quadform(a.matrix(), to_eigen(z), p.coeffs());
    EXPECT_LE(rel_err(r.value, ref), 1e-12);
    EXPECT_EQ(r.matvecs, 8u);
}

// ---------------------------------------------------------------------------
// two_sided_chebyshev

TEST(TwoSidedChebyshev, DiagonalT2) {
    const auto a = DenseSymmetric::diagonal(kDiagHalf);
    const auto r = two_sided_chebyshev(a, Vector{1, 1}, cheb({0, 0, 1}));
    EXPECT_DOUBLE_EQ(r.value, -1.0);
    EXPECT_EQ(r.matvecs, 1u);
}

TEST(TwoSidedChebyshev, DegenerateDegrees) {
    const auto a = random_symmetric(6, 4);
    const Vector z{1, -1, 1, 1, -1, 1};
    const auto az = a.matvec(z);
    // n = 0: no matvec.
    auto r = two_sided_chebyshev(a, z, cheb({4.0}));
    EXPECT_DOUBLE_EQ(r.value, 24.0);
    EXPECT_EQ(r.matvecs, 0u);
    // n = 1: one matvec, alpha_0 zeta_0 + alpha_1 zeta_1.
    r = two_sided_chebyshev(a, z, cheb({2.0, 3.0}));
    EXPECT_DOUBLE_EQ(r.value, 2.0 * 6.0 + 3.0 * dot(z, az));
    EXPECT_EQ(r.matvecs, 1u);
    // n = 2: one matvec, full initialization.
    r = two_sided_chebyshev(a, z, cheb({1.0, 0.0, 1.0}));
    EXPECT_DOUBLE_EQ(r.value, 6.0 + (2.0 * dot(az, az) - 6.0));
    EXPECT_EQ(r.matvecs, 1u);
    // Only alpha_0 nonzero at higher degree: value unchanged, count follows the degree.
    r = two_sided_chebyshev(a, z, cheb({4, 0, 0, 0, 0, 0}));
    EXPECT_DOUBLE_EQ(r.value, 24.0);
    EXPECT_EQ(r.matvecs, 3u);
}

TEST(TwoSidedChebyshev, MatchesOneSidedExp10Degree20) {
    const auto a = scaled_to_unit(random_symmetric(100, 4));
    const auto z = rademacher_vec(100, 4);
    const auto p = interpolate([](double x) { return std::exp(10.0 * x); }, 20);
    const auto two = two_sided_chebyshev(a, z, p);
    const auto one = one_sided_chebyshev(a, z, p);
    EXPECT_LE(rel_err(two.value, one.value), 1e-12);
    EXPECT_EQ(two.matvecs, 10u);
    EXPECT_EQ(one.matvecs, 20u);
}

// ---------------------------------------------------------------------------
// Errors

TEST(Quadform, BasisAndDimensionErrors) {
    const auto a = DenseSymmetric::identity(2);
    EXPECT_THROW(one_sided_standard(a, Vector{1, 1}, cheb({1})), BasisMismatch);
    EXPECT_THROW(two_sided_standard(a, Vector{1, 1}, cheb({1})), BasisMismatch);
    EXPECT_THROW(one_sided_chebyshev(a, Vector{1, 1}, standard({1})), BasisMismatch);
    EXPECT_THROW(two_sided_chebyshev(a, Vector{1, 1}, standard({1})), BasisMismatch);
    for (auto e : kAllEvaluators) {
        const auto p = basis_of(e) == Basis::Standard ? standard({1, 2}) : cheb({1, 2});
        EXPECT_THROW(evaluate(e, a, Vector{1, 1, 1}, p), DimensionError) << to_string(e);
    }
}

TEST(Quadform, EvaluatorNames) {
    for (auto e : kAllEvaluators) EXPECT_EQ(parse_evaluator(to_string(e)), e);
    EXPECT_FALSE(parse_evaluator("three_sided").has_value());
    EXPECT_EQ(matvec_count(Evaluator::TwoSidedChebyshev, 0), 0u);
    EXPECT_EQ(matvec_count(Evaluator::TwoSidedChebyshev, 1), 1u);
    EXPECT_EQ(matvec_count(Evaluator::TwoSidedStandard, 20), 10u);
    EXPECT_EQ(matvec_count(Evaluator::TwoSidedStandard, 21), 11u);
    EXPECT_EQ(matvec_count(Evaluator::OneSidedChebyshev, 21), 21u);
}

// ---------------------------------------------------------------------------
// Properties

TEST(QuadformProperty, MatvecCountsMatchFormula) {
    const auto a = scaled_to_unit(random_symmetric(30, 10));
    const auto z = rademacher_vec(30, 10);
    for (std::size_t n = 0; n <= 25; ++n) {
        std::vector<double> alpha(n + 1, 0.5);
        for (auto e : kAllEvaluators) {
            CountingOperator counter(a);
            const auto r = evaluate(e, counter, z, PolynomialCoefficients(basis_of(e), alpha));
            const std::uint64_t expect = is_two_sided(e) ? (n + 1) / 2 : n;
            EXPECT_EQ(counter.count(), expect) << to_string(e) << " n=" << n;
            EXPECT_EQ(r.matvecs, expect);
        }
    }
}

TEST(QuadformProperty, TermsSumToValue) {
    const auto a = scaled_to_unit(random_symmetric(40, 12));
    const auto z = rademacher_vec(40, 12);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t n = 0; n <= 15; ++n) {
        std::vector<double> alpha(n + 1);
        for (auto& c : alpha) c = u(rng);
        for (auto e : kAllEvaluators) {
            const auto r = evaluate(e, a, z, PolynomialCoefficients(basis_of(e), alpha), EvalOptions{true});
            ASSERT_TRUE(r.terms.has_value());
            ASSERT_EQ(r.terms->size(), n + 1);
            EXPECT_LE(rel_err(sum(*r.terms), r.value), 1e-14);
            const auto plain = evaluate(e, a, z, PolynomialCoefficients(basis_of(e), alpha));
            EXPECT_EQ(plain.value, r.value);
        }
    }
}

TEST(QuadformProperty, CrossMethodAndPerTermAgreement) {
    std::mt19937_64 rng(31337);
    const std::function<double(double)> fns[] = {
        [](double x) { return std::exp(10 * x); },
        [](double x) { return std::exp(x); },
        [](double x) { return std::log(x + 1.01); },
        [](double x) { return 1.0 / (x + 1.01); },
        [](double x) { return std::sqrt(x + 1.0); },
    };
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = static_cast<Eigen::Index>(2 + rng() % 199);
        const DenseSymmetric a(quadtrace::testing::scaled_random_symmetric(d, rng()));
        const auto z = rademacher_vec(static_cast<std::size_t>(d), rng());
        const std::size_t n = 1 + rng() % 25;
        const auto p = interpolate(fns[trial % 5], n);
        const auto one = one_sided_chebyshev(a, z, p, EvalOptions{true});
        const auto two = two_sided_chebyshev(a, z, p, EvalOptions{true});
        EXPECT_LE(rel_err(two.value, one.value), 1e-10) << "trial " << trial;

        double largest = 0.0;
        for (double t : *one.terms) largest = std::max(largest, std::abs(t));
        for (std::size_t j = 0; j <= n; ++j) {
            const double ref = (*one.terms)[j];
            const double diff = std::abs((*two.terms)[j] - ref);
            if (std::abs(ref) > 1e-8 * largest) {
                EXPECT_LE(diff / std::abs(ref), 1e-9) << "trial " << trial << " term " << j;
            } else {
                EXPECT_LE(diff, 1e-9 * largest) << "trial " << trial << " term " << j;
            }
        }

        // Standard basis on the same well-scaled operator.
        std::vector<double> alpha(n + 1);
        std::uniform_real_distribution<double> u(-1, 1);
        for (auto& c : alpha) c = u(rng);
        const auto s1 = one_sided_standard(a, z, standard(alpha));
        const auto s2 = two_sided_standard(a, z, standard(alpha));
        double scale = 0.0;
        for (double c : alpha) scale += std::abs(c);
        EXPECT_LE(std::abs(s2.value - s1.value), 1e-10 * (std::abs(s1.value) + scale * dot(z, z)));
    }
}

TEST(QuadformProperty, ScalarConsistency) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const double lambda = u(rng);
        const double zval = 0.5 + std::abs(u(rng)) * 3.0;
        const double entry[] = {lambda};
        const auto a = DenseSymmetric::diagonal(entry);
        const std::size_t n = rng() % 20;
        std::vector<double> alpha(n + 1);
        for (auto& c : alpha) c = u(rng);
        for (auto e : kAllEvaluators) {
            const PolynomialCoefficients p(basis_of(e), alpha);
            const double expect = zval * zval * eval_scalar(p, lambda);
            const auto r = evaluate(e, a, Vector{zval}, p);
            double scale = 0.0;
            for (double c : alpha) scale += std::abs(c);
            EXPECT_LE(std::abs(r.value - expect), 1e-13 * std::max(std::abs(expect), zval * zval * scale * 1e-2))
                << to_string(e) << " n=" << n;
        }
    }
}

TEST(QuadformProperty, ChebyshevAndStandardBasesAgree) {
    const auto a = scaled_to_unit(random_symmetric(25, 21));
    const auto z = rademacher_vec(25, 21);
    const auto c = cheb({0, 0, 1});
    const auto s = chebyshev_to_standard(c);
    ASSERT_EQ(std::vector<double>(s.coeffs().begin(), s.coeffs().end()), (std::vector<double>{-1, 0, 2}));
    const double ref = one_sided_chebyshev(a, z, c).value;
    EXPECT_LE(rel_err(two_sided_chebyshev(a, z, c).value, ref), 1e-13);
    EXPECT_LE(rel_err(one_sided_standard(a, z, s).value, ref), 1e-13);
    EXPECT_LE(rel_err(two_sided_standard(a, z, s).value, ref), 1e-13);
}
