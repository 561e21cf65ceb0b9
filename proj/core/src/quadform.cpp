#include "quadtrace/quadform.hpp"

#include <string>
#include <utility>

namespace quadtrace {

namespace {

void check_inputs(const SymmetricOperator& op, std::span<const double> z,
                  const PolynomialCoefficients& coeffs, Basis expected, std::string_view who) {
    if (coeffs.basis() != expected) {
        throw BasisMismatch(std::string(who) + " expects " + std::string(to_string(expected)) +
                            "-basis coefficients, got " + std::string(to_string(coeffs.basis())));
    }
    if (z.size() != op.dim()) throw DimensionError(op.dim(), z.size());
}

// Adds terms in index order so that `value` is exactly the ordered sum of `terms`.
class TermSum {
public:
    TermSum(std::size_t degree, bool record) {
        if (record) terms_.emplace(degree + 1, 0.0);
    }

    void add(std::size_t j, double term) {
        value_ += term;
        if (terms_) (*terms_)[j] = term;
    }

    EvalReport finish(std::uint64_t matvecs) && {
        return EvalReport{value_, matvecs, std::move(terms_)};
    }

private:
    double value_ = 0.0;
    std::optional<std::vector<double>> terms_;
};

// prev <- 2 * a_cur - prev, i.e. the Chebyshev three-term step written in place.
void chebyshev_step(std::span<const double> a_cur, std::span<double> prev) {
    for (std::size_t i = 0; i < prev.size(); ++i) prev[i] = 2.0 * a_cur[i] - prev[i];
}

}  // namespace

EvalReport one_sided_standard(const SymmetricOperator& op, std::span<const double> z,
                              const PolynomialCoefficients& coeffs, EvalOptions options) {
    check_inputs(op, z, coeffs, Basis::Standard, "one_sided_standard");
    const std::size_t n = coeffs.degree();
    TermSum sum(n, options.record_terms);
    sum.add(0, coeffs[0] * dot(z, z));

    Vector cur(z.begin(), z.end());
    Vector next(z.size());
    for (std::size_t j = 1; j <= n; ++j) {
        op.apply(cur, next);
        sum.add(j, coeffs[j] * dot(z, next));
        std::swap(cur, next);
    }
    return std::move(sum).finish(n);
}

EvalReport two_sided_standard(const SymmetricOperator& op, std::span<const double> z,
                              const PolynomialCoefficients& coeffs, EvalOptions options) {
    check_inputs(op, z, coeffs, Basis::Standard, "two_sided_standard");
    const std::size_t n = coeffs.degree();
    const std::size_t half = (n + 1) / 2;
    TermSum sum(n, options.record_terms);
    sum.add(0, coeffs[0] * dot(z, z));

    // prev = A^{j-1} z, cur = A^j z.
    Vector prev(z.begin(), z.end());
    Vector cur(z.size());
    for (std::size_t j = 1; j <= half; ++j) {
        op.apply(prev, cur);
        sum.add(2 * j - 1, coeffs[2 * j - 1] * dot(prev, cur));
        if (n == 2 * j - 1) break;
        sum.add(2 * j, coeffs[2 * j] * dot(cur, cur));
        std::swap(prev, cur);
    }
    return std::move(sum).finish(half);
}

EvalReport one_sided_chebyshev(const SymmetricOperator& op, std::span<const double> z,
                               const PolynomialCoefficients& coeffs, EvalOptions options) {
    check_inputs(op, z, coeffs, Basis::Chebyshev, "one_sided_chebyshev");
    const std::size_t n = coeffs.degree();
    TermSum sum(n, options.record_terms);
    sum.add(0, coeffs[0] * dot(z, z));
    if (n == 0) return std::move(sum).finish(0);

    // prev = T_{j-1}(A) z, cur = T_j(A) z.
    Vector prev(z.begin(), z.end());
    Vector cur(z.size());
    Vector work(z.size());
    op.apply(prev, cur);
    sum.add(1, coeffs[1] * dot(z, cur));
    for (std::size_t j = 2; j <= n; ++j) {
        op.apply(cur, work);
        chebyshev_step(work, prev);
        std::swap(prev, cur);
        sum.add(j, coeffs[j] * dot(z, cur));
    }
    return std::move(sum).finish(n);
}

EvalReport two_sided_chebyshev(const SymmetricOperator& op, std::span<const double> z,
                               const PolynomialCoefficients& coeffs, EvalOptions options) {
    check_inputs(op, z, coeffs, Basis::Chebyshev, "two_sided_chebyshev");
    const std::size_t n = coeffs.degree();
    const std::size_t half = (n + 1) / 2;
    TermSum sum(n, options.record_terms);

    const double zeta0 = dot(z, z);
    sum.add(0, coeffs[0] * zeta0);
    if (n == 0) return std::move(sum).finish(0);

    Vector prev(z.begin(), z.end());
    Vector cur(z.size());
    Vector work(z.size());
    op.apply(prev, cur);
    const double zeta1 = dot(z, cur);
    sum.add(1, coeffs[1] * zeta1);
    if (n >= 2) sum.add(2, coeffs[2] * (2.0 * dot(cur, cur) - zeta0));

    for (std::size_t j = 2; j <= half; ++j) {
        op.apply(cur, work);
        chebyshev_step(work, prev);
        std::swap(prev, cur);  // prev = T_{j-1}(A) z, cur = T_j(A) z
        sum.add(2 * j - 1, coeffs[2 * j - 1] * (2.0 * dot(prev, cur) - zeta1));
        if (n == 2 * j - 1) break;
        sum.add(2 * j, coeffs[2 * j] * (2.0 * dot(cur, cur) - zeta0));
    }
    return std::move(sum).finish(half);
}

std::string_view to_string(Evaluator e) noexcept {
    switch (e) {
        case Evaluator::OneSidedStandard: return "one_sided_standard";
        case Evaluator::TwoSidedStandard: return "two_sided_standard";
        case Evaluator::OneSidedChebyshev: return "one_sided_chebyshev";
        case Evaluator::TwoSidedChebyshev: return "two_sided_chebyshev";
    }
    return "unknown";
}

std::optional<Evaluator> parse_evaluator(std::string_view name) noexcept {
    for (auto e : kAllEvaluators) {
        if (to_string(e) == name) return e;
    }
    return std::nullopt;
}

Basis basis_of(Evaluator e) noexcept {
    return (e == Evaluator::OneSidedStandard || e == Evaluator::TwoSidedStandard) ? Basis::Standard
                                                                                  : Basis::Chebyshev;
}

bool is_two_sided(Evaluator e) noexcept {
    return e == Evaluator::TwoSidedStandard || e == Evaluator::TwoSidedChebyshev;
}

std::uint64_t matvec_count(Evaluator e, std::size_t degree) noexcept {
    return is_two_sided(e) ? (degree + 1) / 2 : degree;
}

EvalReport evaluate(Evaluator e, const SymmetricOperator& op, std::span<const double> z,
                    const PolynomialCoefficients& coeffs, EvalOptions options) {
    switch (e) {
        case Evaluator::OneSidedStandard: return one_sided_standard(op, z, coeffs, options);
        case Evaluator::TwoSidedStandard: return two_sided_standard(op, z, coeffs, options);
        case Evaluator::OneSidedChebyshev: return one_sided_chebyshev(op, z, coeffs, options);
        case Evaluator::TwoSidedChebyshev: return two_sided_chebyshev(op, z, coeffs, options);
    }
    throw std::invalid_argument("unknown evaluator");
}

}  // namespace quadtrace
