#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace quadtrace {

/// Closed interval [lo, hi] with lo < hi.
class Interval {
public:
    constexpr Interval() noexcept = default;
    /// Throws std::invalid_argument unless lo < hi and both are finite.
    Interval(double lo, double hi);

    static constexpr Interval canonical() noexcept { return Interval(); }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    bool is_canonical() const noexcept { return lo_ == -1.0 && hi_ == 1.0; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_ = -1.0;
    double hi_ = 1.0;
};

/// Maps [lo, hi] affinely onto [-1, 1]: lo -> -1, hi -> 1.
double affine_to_canonical(const Interval& interval, double x) noexcept;

/// Inverse of affine_to_canonical.
double affine_from_canonical(const Interval& interval, double t) noexcept;

enum class Basis { Standard, Chebyshev };

std::string_view to_string(Basis basis) noexcept;

/**
 Coefficients alpha_0..alpha_n of a degree-n polynomial in either the monomial
 or the Chebyshev basis.

 The polynomial is a function of the canonical variable t = affine_to_canonical(interval, x),
 so for the default interval [-1, 1] it is a polynomial in x itself. Matrix
 evaluators never apply the affine map: they expect an operator already
 scaled into the canonical variable.
 */
class PolynomialCoefficients {
public:
    /// Throws std::invalid_argument on an empty list or a non-finite coefficient.
    PolynomialCoefficients(Basis basis, std::vector<double> coeffs, Interval interval = Interval::canonical());

    Basis basis() const noexcept { return basis_; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double operator[](std::size_t j) const { return coeffs_[j]; }
    const Interval& interval() const noexcept { return interval_; }
    std::size_t degree() const noexcept { return coeffs_.size() - 1; }

    friend bool operator==(const PolynomialCoefficients&, const PolynomialCoefficients&) = default;

private:
    Basis basis_;
    std::vector<double> coeffs_;
    Interval interval_;
};

/// Chebyshev extreme points cos(j*pi/n), j = 0..n, strictly decreasing from 1 to -1.
/// Computed through a sine so the set is exactly symmetric about 0.
std::vector<double> chebyshev_nodes(std::size_t n);

/// Degree-n Chebyshev interpolant of f on `interval`, sampled at the mapped
/// extreme points and converted with a direct type-I cosine sum.
/// Throws std::invalid_argument for n == 0 and std::domain_error naming the
/// node if f is not finite there.
PolynomialCoefficients interpolate(const std::function<double(double)>& f, std::size_t n,
                                   const Interval& interval = Interval::canonical());

/// p(x) via Clenshaw (Chebyshev) or Horner (standard), after mapping x into
/// the canonical variable. Points outside the interval are extrapolated.
double eval_scalar(const PolynomialCoefficients& p, double x);

/// Re-expresses a Chebyshev series in the monomial basis of the same
/// canonical variable. Ill-conditioned for large degree (coefficients grow
/// like 2^n); intended for moderate n and cross-checks.
PolynomialCoefficients chebyshev_to_standard(const PolynomialCoefficients& p);

}  // namespace quadtrace
