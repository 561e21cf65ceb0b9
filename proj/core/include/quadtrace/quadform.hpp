#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "quadtrace/chebyshev.hpp"
#include "quadtrace/operator.hpp"

namespace quadtrace {

/// Thrown when an evaluator receives coefficients in the wrong basis.
class BasisMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Result of one evaluation of s = z^T p(A) z.
struct EvalReport {
    double value = 0.0;
    std::uint64_t matvecs = 0;
    /// terms[j] = alpha_j * z^T B_j(A) z, where B_j is the j-th basis polynomial.
    /// Present only when requested; `value` is their sum in index order.
    std::optional<std::vector<double>> terms;
};

struct EvalOptions {
    bool record_terms = false;
};

/**
 Quadratic-form evaluators for s = z^T p_n(A) z.

 One-sided variants build z_j = B_j(A) z for j = 1..n and dot each with z,
 costing n matvecs. Two-sided variants use the symmetry of A to pair
 iterates, costing ceil(n/2) matvecs:

   standard:   z^T A^{2j-1} z = z_{j-1} . z_j,      z^T A^{2j} z = z_j . z_j
   Chebyshev:  z^T T_{2j-1}(A) z = 2 z_{j-1} . z_j - z^T A z
               z^T T_{2j}(A) z   = 2 z_j . z_j     - z^T z

 Only the two most recent iterates are kept. The operator is used as given;
 for the Chebyshev basis its spectrum should already lie in [-1, 1].
 */
EvalReport one_sided_standard(const SymmetricOperator& op, std::span<const double> z,
                              const PolynomialCoefficients& coeffs, EvalOptions options = {});
EvalReport two_sided_standard(const SymmetricOperator& op, std::span<const double> z,
                              const PolynomialCoefficients& coeffs, EvalOptions options = {});
EvalReport one_sided_chebyshev(const SymmetricOperator& op, std::span<const double> z,
                               const PolynomialCoefficients& coeffs, EvalOptions options = {});
EvalReport two_sided_chebyshev(const SymmetricOperator& op, std::span<const double> z,
                               const PolynomialCoefficients& coeffs, EvalOptions options = {});

enum class Evaluator {
    OneSidedStandard,
    TwoSidedStandard,
    OneSidedChebyshev,
    TwoSidedChebyshev,
};

inline constexpr Evaluator kAllEvaluators[] = {
    Evaluator::OneSidedStandard,
    Evaluator::TwoSidedStandard,
    Evaluator::OneSidedChebyshev,
    Evaluator::TwoSidedChebyshev,
};

std::string_view to_string(Evaluator e) noexcept;
/// Accepts the names produced by to_string(); std::nullopt otherwise.
std::optional<Evaluator> parse_evaluator(std::string_view name) noexcept;

Basis basis_of(Evaluator e) noexcept;
bool is_two_sided(Evaluator e) noexcept;

/// Matvecs one evaluation of a degree-n polynomial costs: n one-sided, ceil(n/2) two-sided.
std::uint64_t matvec_count(Evaluator e, std::size_t degree) noexcept;

EvalReport evaluate(Evaluator e, const SymmetricOperator& op, std::span<const double> z,
                    const PolynomialCoefficients& coeffs, EvalOptions options = {});

}  // namespace quadtrace
