#include "quadtrace/hutchinson.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>

namespace quadtrace {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t word) noexcept {
    for (int b = 0; b < 8; ++b) {
        h ^= (word >> (8 * b)) & 0xffu;
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace

void ProbeSequence::fill(std::uint64_t index, std::span<double> out) const {
    if (out.size() != dim_) throw DimensionError(dim_, out.size());
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
        if (i % 64 == 0) bits = rng();
        out[i] = (bits & 1u) ? 1.0 : -1.0;
        bits >>= 1;
    }
}

Vector rademacher(const ProbeSequence& seq, std::uint64_t index) {
    Vector z(seq.dim());
    seq.fill(index, z);
    return z;
}

std::uint64_t probe_checksum(std::span<const double> z) noexcept {
    std::uint64_t h = fnv_mix(kFnvOffset, z.size());
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] > 0.0) word |= std::uint64_t{1} << (i % 64);
        if (i % 64 == 63 || i + 1 == z.size()) {
            h = fnv_mix(h, word);
            word = 0;
        }
    }
    return h;
}

std::vector<ProbeRun> run_probes(const SymmetricOperator& op, const PolynomialCoefficients& coeffs,
                                 Evaluator evaluator, std::size_t m, std::uint64_t seed,
                                 EstimateOptions options) {
    if (m == 0) throw std::invalid_argument("number of probes must be >= 1");
    if (coeffs.basis() != basis_of(evaluator)) {
        throw BasisMismatch(std::string(to_string(evaluator)) + " cannot evaluate " +
                            std::string(to_string(coeffs.basis())) + "-basis coefficients");
    }
    const ProbeSequence probes(seed, op.dim());
    const EvalOptions eval_options{options.record_terms};
    std::vector<ProbeRun> runs(m);

    auto work = [&](std::size_t first, std::size_t stride) {
        Vector z(op.dim());
        for (std::size_t i = first; i < m; i += stride) {
            probes.fill(i, z);
            runs[i].report = evaluate(evaluator, op, z, coeffs, eval_options);
            runs[i].checksum = probe_checksum(z);
        }
    };

    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : options.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, m));
    if (threads <= 1) {
        work(0, 1);
        return runs;
    }

    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    work(t, threads);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return runs;
}

TraceEstimate summarize(std::span<const ProbeRun> runs) {
    if (runs.empty()) throw std::invalid_argument("cannot summarize zero probes");
    TraceEstimate est;
    est.probes = runs.size();
    est.probe_values.reserve(runs.size());
    est.probe_digest = kFnvOffset;
    double sum = 0.0;
    for (const auto& r : runs) {
        est.probe_values.push_back(r.report.value);
        est.total_matvecs += r.report.matvecs;
        est.probe_digest = fnv_mix(est.probe_digest, r.checksum);
        sum += r.report.value;
    }
    const double m = static_cast<double>(runs.size());
    est.mean = sum / m;
    if (runs.size() > 1) {
        double ss = 0.0;
        for (double v : est.probe_values) ss += (v - est.mean) * (v - est.mean);
        est.sample_stddev = std::sqrt(ss / (m - 1.0));
    }
    return est;
}

TraceEstimate estimate_trace(const SymmetricOperator& op, const PolynomialCoefficients& coeffs,
                             Evaluator evaluator, std::size_t m, std::uint64_t seed,
                             EstimateOptions options) {
    const auto runs = run_probes(op, coeffs, evaluator, m, seed, options);
    return summarize(runs);
}

double exact_trace_f(const DenseSymmetric& a, const std::function<double(double)>& f) {
    double s = 0.0;
    for (double lambda : symmetric_eigenvalues(a)) s += f(lambda);
    return s;
}

}  // namespace quadtrace
