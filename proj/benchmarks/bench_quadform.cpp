// One- vs two-sided evaluation of z^T p(A) z, dense and sparse operators.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "quadtrace/chebyshev.hpp"
#include "quadtrace/hutchinson.hpp"
#include "quadtrace/operator.hpp"
#include "quadtrace/quadform.hpp"
#include "quadtrace/spectrum.hpp"

using namespace quadtrace;

namespace {

// Banded random symmetric matrix with `band` off-diagonals on each side.
SparseSymmetric banded(std::size_t d, std::size_t band, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d; ++i) {
        t.push_back({i, i, normal(rng)});
        for (std::size_t k = 1; k <= band && i + k < d; ++k) {
            const double v = normal(rng);
            t.push_back({i, i + k, v});
            t.push_back({i + k, i, v});
        }
    }
    return SparseSymmetric::from_triplets(d, t);
}

template <class Op>
void run(benchmark::State& state, const Op& op, Evaluator e, std::size_t degree) {
    const auto iv = estimate_interval(op, 500, 1e-8, 1);
    const ScaledOperator scaled(op, iv);
    auto p = interpolate([](double x) { return std::exp(10.0 * x); }, degree);
    if (basis_of(e) == Basis::Standard) p = chebyshev_to_standard(p);
    const auto z = rademacher(ProbeSequence(0, op.dim()), 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(e, scaled, z, p).value);
    }
    state.counters["matvecs"] = static_cast<double>(matvec_count(e, degree));
}

void BM_Dense(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto a = random_symmetric(d, 1);
    run(state, a, static_cast<Evaluator>(state.range(1)), static_cast<std::size_t>(state.range(2)));
}

void BM_Sparse(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto a = banded(d, 8, 2);
    run(state, a, static_cast<Evaluator>(state.range(1)), static_cast<std::size_t>(state.range(2)));
}

void chebyshev_pairs(benchmark::internal::Benchmark* b, std::initializer_list<long> dims) {
    for (long d : dims)
        for (auto e : {Evaluator::OneSidedChebyshev, Evaluator::TwoSidedChebyshev})
            b->Args({d, static_cast<long>(e), 20});
    b->ArgNames({"d", "evaluator", "n"});
}

}  // namespace

BENCHMARK(BM_Dense)->Apply([](auto* b) { chebyshev_pairs(b, {500, 2000}); })->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Sparse)->Apply([](auto* b) { chebyshev_pairs(b, {10000, 100000}); })->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Dense)
    ->Args({500, static_cast<long>(Evaluator::OneSidedStandard), 10})
    ->Args({500, static_cast<long>(Evaluator::TwoSidedStandard), 10})
    ->ArgNames({"d", "evaluator", "n"})
    ->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
