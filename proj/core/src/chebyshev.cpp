#include "quadtrace/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace quadtrace {

namespace {

// cos(m*pi/n) with the argument reduced to [0, pi] and evaluated as a sine of
// an angle in [-pi/2, pi/2], so cos(pi/2) is exactly 0 and values are
// symmetric in m -> n - m.
double cos_pi_ratio(std::size_t m, std::size_t n) {
    m %= 2 * n;
    if (m > n) m = 2 * n - m;
    const double num = static_cast<double>(n) - 2.0 * static_cast<double>(m);
    return std::sin(std::numbers::pi * num / (2.0 * static_cast<double>(n)));
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        std::ostringstream os;
        os << "invalid interval [" << lo << ", " << hi << "]: endpoints must be finite with lo < hi";
        throw std::invalid_argument(os.str());
    }
}

double affine_to_canonical(const Interval& interval, double x) noexcept {
    return (2.0 * x - interval.lo() - interval.hi()) / (interval.hi() - interval.lo());
}

double affine_from_canonical(const Interval& interval, double t) noexcept {
    return 0.5 * (interval.hi() - interval.lo()) * t + 0.5 * (interval.lo() + interval.hi());
}

std::string_view to_string(Basis basis) noexcept {
    return basis == Basis::Standard ? "standard" : "chebyshev";
}

PolynomialCoefficients::PolynomialCoefficients(Basis basis, std::vector<double> coeffs, Interval interval)
    : basis_(basis), coeffs_(std::move(coeffs)), interval_(interval) {
    if (coeffs_.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        if (!std::isfinite(coeffs_[j])) {
            throw std::invalid_argument("coefficient " + std::to_string(j) + " is not finite");
        }
    }
}

std::vector<double> chebyshev_nodes(std::size_t n) {
    if (n == 0) throw std::invalid_argument("chebyshev_nodes requires n >= 1");
    std::vector<double> nodes(n + 1);
    for (std::size_t j = 0; j <= n; ++j) nodes[j] = cos_pi_ratio(j, n);
    return nodes;
}

PolynomialCoefficients interpolate(const std::function<double(double)>& f, std::size_t n,
                                   const Interval& interval) {
    const auto nodes = chebyshev_nodes(n);
    std::vector<double> values(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double x = affine_from_canonical(interval, nodes[j]);
        values[j] = f(x);
        if (!std::isfinite(values[j])) {
            std::ostringstream os;
            os.precision(17);
            os << "function is not finite at interpolation node " << j << " (x = " << x << ")";
            throw std::domain_error(os.str());
        }
    }

    std::vector<double> alpha(n + 1);
    const double scale = 2.0 / static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) {
        double s = 0.5 * (values[0] + values[n] * cos_pi_ratio(n * k, n));
        for (std::size_t j = 1; j < n; ++j) s += values[j] * cos_pi_ratio(j * k, n);
        alpha[k] = scale * s;
    }
    alpha[0] *= 0.5;
    alpha[n] *= 0.5;
    return PolynomialCoefficients(Basis::Chebyshev, std::move(alpha), interval);
}

double eval_scalar(const PolynomialCoefficients& p, double x) {
    const double t = p.interval().is_canonical() ? x : affine_to_canonical(p.interval(), x);
    const auto c = p.coeffs();
    const std::size_t n = p.degree();
    if (p.basis() == Basis::Standard) {
        double s = c[n];
        for (std::size_t j = n; j-- > 0;) s = s * t + c[j];
        return s;
    }
    // Clenshaw: b_k = c_k + 2t b_{k+1} - b_{k+2}; p = c_0 + t b_1 - b_2.
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = n; k >= 1; --k) {
        const double b0 = c[k] + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + t * b1 - b2;
}

PolynomialCoefficients chebyshev_to_standard(const PolynomialCoefficients& p) {
    if (p.basis() == Basis::Standard) return p;
    const std::size_t n = p.degree();
    std::vector<double> out(n + 1, 0.0);
    // Monomial coefficients of T_{j-1} and T_j.
    std::vector<double> prev(n + 1, 0.0);
    std::vector<double> cur(n + 1, 0.0);
    prev[0] = 1.0;
    out[0] += p[0];
    if (n >= 1) {
        cur[1] = 1.0;
        out[1] += p[1];
    }
    for (std::size_t j = 1; j < n; ++j) {
        std::vector<double> next(n + 1, 0.0);
        for (std::size_t i = 0; i <= j; ++i) next[i + 1] += 2.0 * cur[i];
        for (std::size_t i = 0; i < j; ++i) next[i] -= prev[i];
        for (std::size_t i = 0; i <= j + 1; ++i) out[i] += p[j + 1] * next[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return PolynomialCoefficients(Basis::Standard, std::move(out), p.interval());
}

}  // namespace quadtrace
