#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "quadtrace/chebyshev.hpp"
#include "quadtrace/operator.hpp"

namespace quadtrace {

/// Enclosure estimate [lo, hi] for the spectrum of a symmetric operator.
struct SpectralInterval {
    double lo = -1.0;
    double hi = 1.0;
    /// Relative outward margin already applied to [lo, hi].
    double margin = 0.0;
    /// False when power iteration hit its iteration limit before meeting the tolerance.
    bool converged = true;
    /// Matvecs spent producing the estimate (0 for exact intervals).
    std::uint64_t matvecs = 0;

    Interval as_interval() const { return Interval(lo, hi); }
};

/// The operator looks like a multiple of the identity: its spectrum has no width.
class DegenerateSpectrum : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultSpectralMargin = 0.01;

/// Widens [lo, hi] about its midpoint so the half-width grows by (1 + margin).
SpectralInterval widen(SpectralInterval interval, double margin);

/**
 Estimates [lambda_min, lambda_max] by power iteration.

 A first pass estimates the spectral radius rho from ||A v||; passes on
 A + rho I and A - rho I then converge to lambda_max and lambda_min via
 Rayleigh quotients. Each pass runs at most `iters` steps and stops early
 when successive estimates differ by less than tol relative. The result is
 widened by `margin`. Hitting the step limit clears `converged` rather than
 throwing. Throws DegenerateSpectrum when hi - lo < 1e-14 max(|lo|, |hi|, 1).
 */
SpectralInterval estimate_interval(const SymmetricOperator& op, std::size_t iters, double tol,
                                   std::uint64_t seed, double margin = kDefaultSpectralMargin);

/// Extremal eigenvalues from a dense eigendecomposition, no margin.
SpectralInterval exact_interval(const DenseSymmetric& a);

/// x -> (2 A x - (lo + hi) x) / (hi - lo). Maps [lo, hi] onto [-1, 1] at the
/// cost of exactly one inner matvec per apply. Non-owning.
class ScaledOperator final : public SymmetricOperator {
public:
    ScaledOperator(const SymmetricOperator& inner, const SpectralInterval& interval);

    std::size_t dim() const noexcept override { return inner_.dim(); }
    const SpectralInterval& interval() const noexcept { return interval_; }

protected:
    void apply_unchecked(std::span<const double> in, std::span<double> out) const override;

private:
    const SymmetricOperator& inner_;
    SpectralInterval interval_;
    double scale_;
    double shift_;
};

inline ScaledOperator scale_operator(const SymmetricOperator& op, const SpectralInterval& interval) {
    return ScaledOperator(op, interval);
}

}  // namespace quadtrace
