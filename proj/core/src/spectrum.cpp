#include "quadtrace/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace quadtrace {

namespace {

struct PassResult {
    double value = 0.0;
    bool converged = false;
    std::uint64_t matvecs = 0;
};

Vector random_unit(std::size_t d, std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Vector v(d);
    for (auto& x : v) x = normal(rng);
    const double nrm = std::sqrt(dot(v, v));
    for (auto& x : v) x /= nrm;
    return v;
}

// Power iteration for ||A v||, which converges to the spectral radius even
// when +rho and -rho are both present.
PassResult radius_pass(const SymmetricOperator& op, std::size_t iters, double tol, std::uint64_t seed) {
    Vector v = random_unit(op.dim(), seed, 0);
    Vector w(op.dim());
    PassResult r;
    double prev = 0.0;
    for (std::size_t k = 0; k < iters; ++k) {
        op.apply(v, w);
        ++r.matvecs;
        const double nrm = std::sqrt(dot(w, w));
        r.value = nrm;
        if (nrm == 0.0) {
            r.converged = true;
            break;
        }
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nrm;
        if (k > 0 && std::abs(nrm - prev) <= tol * nrm) {
            r.converged = true;
            break;
        }
        prev = nrm;
    }
    return r;
}

// Rayleigh-quotient power iteration on A + shift I; returns the estimate of
// the dominant eigenvalue of A + shift I, minus shift.
PassResult shifted_pass(const SymmetricOperator& op, double shift, std::size_t iters, double tol,
                        std::uint64_t seed, std::uint64_t stream) {
    Vector v = random_unit(op.dim(), seed, stream);
    Vector w(op.dim());
    PassResult r;
    double prev = 0.0;
    for (std::size_t k = 0; k < iters; ++k) {
        op.apply(v, w);
        ++r.matvecs;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += shift * v[i];
        const double rq = dot(v, w);
        r.value = rq;
        const double nrm = std::sqrt(dot(w, w));
        if (nrm == 0.0) {
            r.converged = true;
            break;
        }
        if (k > 0 && std::abs(rq - prev) <= tol * std::abs(rq)) {
            r.converged = true;
            break;
        }
        prev = rq;
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nrm;
    }
    r.value -= shift;
    return r;
}

void check_width(double lo, double hi) {
    const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
    if (!(hi - lo >= 1e-14 * scale)) {
        std::ostringstream os;
        os.precision(17);
        os << "degenerate spectral interval [" << lo << ", " << hi
           << "]: operator is (nearly) a multiple of the identity";
        throw DegenerateSpectrum(os.str());
    }
}

}  // namespace

SpectralInterval widen(SpectralInterval interval, double margin) {
    if (!(margin >= 0.0)) throw std::invalid_argument("spectral margin must be >= 0");
    const double mid = 0.5 * (interval.lo + interval.hi);
    const double half = 0.5 * (interval.hi - interval.lo) * (1.0 + margin);
    interval.lo = mid - half;
    interval.hi = mid + half;
    interval.margin = margin;
    return interval;
}

SpectralInterval estimate_interval(const SymmetricOperator& op, std::size_t iters, double tol,
                                   std::uint64_t seed, double margin) {
    if (iters == 0) throw std::invalid_argument("power iteration needs iters >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("power iteration needs tol > 0");

    const auto radius = radius_pass(op, iters, tol, seed);
    const double rho = radius.value;
    if (rho == 0.0) throw DegenerateSpectrum("operator is zero: spectral interval is degenerate");

    const auto top = shifted_pass(op, rho, iters, tol, seed, 1);
    const auto bottom = shifted_pass(op, -rho, iters, tol, seed, 2);

    SpectralInterval out;
    out.lo = std::min(bottom.value, top.value);
    out.hi = std::max(bottom.value, top.value);
    check_width(out.lo, out.hi);
    out.converged = radius.converged && top.converged && bottom.converged;
    out.matvecs = radius.matvecs + top.matvecs + bottom.matvecs;
    return widen(out, margin);
}

SpectralInterval exact_interval(const DenseSymmetric& a) {
    const auto ev = symmetric_eigenvalues(a);
    SpectralInterval out;
    out.lo = ev.front();
    out.hi = ev.back();
    check_width(out.lo, out.hi);
    return out;
}

ScaledOperator::ScaledOperator(const SymmetricOperator& inner, const SpectralInterval& interval)
    : inner_(inner), interval_(interval) {
    if (!(interval.lo < interval.hi) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi)) {
        throw std::invalid_argument("scaled operator needs a finite interval with lo < hi");
    }
    scale_ = 2.0 / (interval.hi - interval.lo);
    shift_ = (interval.lo + interval.hi) / (interval.hi - interval.lo);
}

void ScaledOperator::apply_unchecked(std::span<const double> in, std::span<double> out) const {
    inner_.apply(in, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale_ * out[i] - shift_ * in[i];
}

}  // namespace quadtrace
