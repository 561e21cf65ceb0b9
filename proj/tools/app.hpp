#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quadtrace/chebyshev.hpp"
#include "quadtrace/hutchinson.hpp"
#include "quadtrace/quadform.hpp"

namespace quadtrace::app {

inline constexpr const char* kResultSchema = "quadtrace.result/1";

/// Bad command-line input; maps to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NamedFunction {
    std::string spec;  // canonical "name:params" form
    std::function<double(double)> fn;
};

/**
 Function registry. Accepted specs:
   identity, exp_scaled[:c], power:p, inverse_shifted[:eps], log_shifted[:eps]
 exp_scaled:c is exp(c x); the shifted variants are 1/(x + 1 + eps) and
 log(x + 1 + eps) with eps defaulting to 1e-2. Throws UsageError.
 */
NamedFunction parse_function(const std::string& spec);

enum class IntervalSource { Exact, Power, User };

struct IntervalChoice {
    IntervalSource source = IntervalSource::Exact;
    double lo = -1.0;
    double hi = 1.0;
};

/// "exact" | "power" | "lo,hi". Throws UsageError.
IntervalChoice parse_interval(const std::string& text);

/// Comma-separated evaluator names, or "all". Throws UsageError.
std::vector<Evaluator> parse_evaluators(const std::string& text);

struct BenchConfig {
    std::optional<std::filesystem::path> matrix_path;
    std::size_t synthetic_dim = 0;
    std::uint64_t matrix_seed = 1;

    std::optional<std::string> function;                  // registry spec
    std::optional<std::filesystem::path> coefficients;    // user polynomial
    std::size_t degree = 20;

    std::size_t probes = 100;
    std::uint64_t seed = 0;
    std::vector<Evaluator> evaluators{Evaluator::OneSidedChebyshev, Evaluator::TwoSidedChebyshev};

    IntervalChoice interval;
    std::size_t power_iters = 1000;
    double power_tol = 1e-10;
    double power_margin = 0.01;

    bool terms = false;
    unsigned threads = 1;
};

/// Pairwise comparison of two evaluators run over the same probes.
struct Comparison {
    Evaluator reference = Evaluator::OneSidedChebyshev;
    Evaluator other = Evaluator::TwoSidedChebyshev;
    double aggregate_rel_diff = 0.0;
    double max_per_probe_rel_diff = 0.0;
    std::optional<double> max_term_rel_diff;             // over every term pair
    std::optional<double> max_significant_term_rel_diff; // terms above 1e-8 of the largest
    std::optional<double> max_small_term_abs_diff;       // scaled by the largest term
};

/// Per-term rule: a term whose one-sided magnitude exceeds this fraction of
/// the largest term in its probe is compared relatively; smaller ones absolutely.
inline constexpr double kSignificantTermFraction = 1e-8;

Comparison compare_runs(Evaluator reference, std::span<const ProbeRun> ref_runs,
                        Evaluator other, std::span<const ProbeRun> other_runs);

struct EvaluatorRun {
    Evaluator evaluator = Evaluator::OneSidedChebyshev;
    std::vector<ProbeRun> runs;
    TraceEstimate estimate;
    std::uint64_t counted_matvecs = 0;
    double wall_seconds = 0.0;
};

/// Runs every evaluator over probes 0..m-1 of the same sequence, on `op` as given.
std::vector<EvaluatorRun> run_evaluators(const SymmetricOperator& op, const PolynomialCoefficients& coeffs,
                                         std::span<const Evaluator> evaluators, std::size_t m,
                                         std::uint64_t seed, bool terms, unsigned threads);

/// `estimate`: builds the operator, interval and polynomial from `config`
/// and returns the result document. Timing lives under "timing" only.
nlohmann::json run_estimate(const BenchConfig& config);

struct ReproduceConfig {
    std::size_t dim = 200;
    std::uint64_t matrix_seed = 1;
    std::uint64_t seed = 0;
    std::size_t probes = 100;
    std::size_t degree = 20;
    double exp_scale = 10.0;
    unsigned threads = 1;
};

/// `reproduce`: random symmetric matrix scaled exactly onto [-1, 1], exp(c x)
/// interpolated at the given degree, paired one-/two-sided Chebyshev runs.
nlohmann::json run_reproduce(const ReproduceConfig& config);

/// `interpolate`: coefficients plus residual diagnostics on a 1000-point grid.
struct InterpolationResult {
    PolynomialCoefficients coeffs;
    double max_abs_residual = 0.0;
    double max_rel_residual = 0.0;
};
InterpolationResult run_interpolate(const std::string& function, std::size_t degree, const Interval& interval);

/// Per-probe table: probe index, checksum, then one value column per evaluator.
std::string probe_csv(const nlohmann::json& result);

/// Human-readable summary of an estimate or reproduce document.
std::string summary_text(const nlohmann::json& result);

/// Copy of `result` without its "timing" member.
nlohmann::json strip_timing(nlohmann::json result);

}  // namespace quadtrace::app
