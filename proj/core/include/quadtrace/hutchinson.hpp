#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "quadtrace/quadform.hpp"

namespace quadtrace {

/**
 Index-addressable Rademacher probes. Probe i is a pure function of
 (seed, i): each probe seeds its own generator, so results do not depend on
 the order or thread in which probes are drawn.
 */
class ProbeSequence {
public:
    ProbeSequence(std::uint64_t seed, std::size_t dim) noexcept : seed_(seed), dim_(dim) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t dim() const noexcept { return dim_; }

    void fill(std::uint64_t index, std::span<double> out) const;

private:
    std::uint64_t seed_;
    std::size_t dim_;
};

/// Probe `index` of `seq`: entries in {-1, +1}.
Vector rademacher(const ProbeSequence& seq, std::uint64_t index);

/// 64-bit FNV-1a digest of a probe's sign pattern. Two evaluators that saw the
/// same probes report the same digests.
std::uint64_t probe_checksum(std::span<const double> z) noexcept;

struct ProbeRun {
    EvalReport report;
    std::uint64_t checksum = 0;
};

struct TraceEstimate {
    double mean = 0.0;
    /// Sample standard deviation (m - 1 denominator); absent for m == 1.
    std::optional<double> sample_stddev;
    std::size_t probes = 0;
    std::uint64_t total_matvecs = 0;
    std::vector<double> probe_values;
    /// Ordered combination of the per-probe checksums.
    std::uint64_t probe_digest = 0;
};

struct EstimateOptions {
    /// Worker threads for probe evaluation; 0 selects hardware concurrency.
    unsigned threads = 1;
    bool record_terms = false;
};

/// Evaluates probes 0..m-1 of ProbeSequence(seed, op.dim()). The returned
/// vector is in probe order whatever the thread count.
std::vector<ProbeRun> run_probes(const SymmetricOperator& op, const PolynomialCoefficients& coeffs,
                                 Evaluator evaluator, std::size_t m, std::uint64_t seed,
                                 EstimateOptions options = {});

/// Aggregates probe runs in index order.
TraceEstimate summarize(std::span<const ProbeRun> runs);

/// Hutchinson estimate of trace p(A) = mean over probes of z^T p(A) z.
TraceEstimate estimate_trace(const SymmetricOperator& op, const PolynomialCoefficients& coeffs,
                             Evaluator evaluator, std::size_t m, std::uint64_t seed,
                             EstimateOptions options = {});

/// sum_i f(lambda_i) from a full dense eigendecomposition. Verification oracle only.
double exact_trace_f(const DenseSymmetric& a, const std::function<double(double)>& f);

}  // namespace quadtrace
