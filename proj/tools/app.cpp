#include "app.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <variant>

#include "quadtrace/coefficient_io.hpp"
#include "quadtrace/matrix_market.hpp"
#include "quadtrace/spectrum.hpp"

namespace quadtrace::app {

using nlohmann::json;

namespace {

// Largest dimension for which dense eigendecompositions (exact interval,
// exact trace) are attempted.
constexpr std::size_t kDenseOracleLimit = 5000;

double parse_param(const std::string& text, const std::string& what) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw UsageError("invalid " + what + " '" + text + "'");
    }
    return v;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

double rel_diff(double value, double reference) {
    const double diff = std::abs(value - reference);
    return reference == 0.0 ? diff : diff / std::abs(reference);
}

json interval_json(double lo, double hi) { return json{{"lo", lo}, {"hi", hi}}; }

std::string_view source_name(IntervalSource s) {
    switch (s) {
        case IntervalSource::Exact: return "exact";
        case IntervalSource::Power: return "power";
        case IntervalSource::User: return "user";
    }
    return "unknown";
}

json coefficients_json(const PolynomialCoefficients& p) {
    return json{{"basis", to_string(p.basis())},
                {"interval", interval_json(p.interval().lo(), p.interval().hi())},
                {"degree", p.degree()},
                {"values", std::vector<double>(p.coeffs().begin(), p.coeffs().end())}};
}

json evaluator_json(const EvaluatorRun& r, std::size_t degree, bool terms) {
    json j{{"name", to_string(r.evaluator)},
           {"basis", to_string(basis_of(r.evaluator))},
           {"two_sided", is_two_sided(r.evaluator)},
           {"matvecs_per_probe", matvec_count(r.evaluator, degree)},
           {"total_matvecs", r.estimate.total_matvecs},
           {"counted_matvecs", r.counted_matvecs},
           {"mean", r.estimate.mean},
           {"sample_stddev", r.estimate.sample_stddev ? json(*r.estimate.sample_stddev) : json(nullptr)},
           {"probe_digest", hex64(r.estimate.probe_digest)},
           {"probe_values", r.estimate.probe_values}};
    std::vector<std::string> checksums;
    checksums.reserve(r.runs.size());
    for (const auto& p : r.runs) checksums.push_back(hex64(p.checksum));
    j["probe_checksums"] = std::move(checksums);
    if (terms) {
        json t = json::array();
        for (const auto& p : r.runs) t.push_back(p.report.terms ? json(*p.report.terms) : json(nullptr));
        j["probe_terms"] = std::move(t);
    }
    return j;
}

json comparison_json(const Comparison& c) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return json{{"reference", to_string(c.reference)},
                {"other", to_string(c.other)},
                {"aggregate_rel_diff", c.aggregate_rel_diff},
                {"max_per_probe_rel_diff", c.max_per_probe_rel_diff},
                {"max_term_rel_diff", opt(c.max_term_rel_diff)},
                {"max_significant_term_rel_diff", opt(c.max_significant_term_rel_diff)},
                {"max_small_term_abs_diff", opt(c.max_small_term_abs_diff)}};
}

// Appends evaluators, comparisons, paired-probe flag and timing to `doc`.
void attach_runs(json& doc, const std::vector<EvaluatorRun>& runs, std::size_t degree, bool terms,
                 unsigned threads) {
    json evaluators = json::array();
    json wall = json::object();
    for (const auto& r : runs) {
        evaluators.push_back(evaluator_json(r, degree, terms));
        wall[std::string(to_string(r.evaluator))] = r.wall_seconds;
    }
    doc["evaluators"] = std::move(evaluators);

    bool paired = true;
    for (const auto& r : runs) paired = paired && r.estimate.probe_digest == runs.front().estimate.probe_digest;
    doc["paired_probes"] = paired;

    json comparisons = json::array();
    for (std::size_t a = 0; a < runs.size(); ++a) {
        for (std::size_t b = a + 1; b < runs.size(); ++b) {
            // Prefer a one-sided evaluator as the reference of a pair.
            const auto& ref = is_two_sided(runs[a].evaluator) && !is_two_sided(runs[b].evaluator) ? runs[b] : runs[a];
            const auto& oth = &ref == &runs[a] ? runs[b] : runs[a];
            comparisons.push_back(comparison_json(compare_runs(ref.evaluator, ref.runs, oth.evaluator, oth.runs)));
        }
    }
    doc["comparisons"] = std::move(comparisons);

    json timing{{"threads", threads}, {"wall_seconds", std::move(wall)}};
    for (const auto& two : runs) {
        if (!is_two_sided(two.evaluator)) continue;
        for (const auto& one : runs) {
            if (is_two_sided(one.evaluator) || basis_of(one.evaluator) != basis_of(two.evaluator)) continue;
            if (two.wall_seconds > 0.0) {
                timing["speedup_" + std::string(to_string(basis_of(two.evaluator)))] =
                    one.wall_seconds / two.wall_seconds;
            }
        }
    }
    doc["timing"] = std::move(timing);
}

struct ExactTraces {
    double of_function = 0.0;
    double of_polynomial = 0.0;
};

// Sums f and p over the eigenvalues of the operator in its original variable.
ExactTraces exact_traces(std::span<const double> eigenvalues, const std::function<double(double)>& f,
                         const PolynomialCoefficients& coeffs) {
    ExactTraces t;
    for (double lambda : eigenvalues) {
        t.of_function += f(lambda);
        t.of_polynomial += eval_scalar(coeffs, lambda);
    }
    return t;
}

}  // namespace

NamedFunction parse_function(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::optional<std::string> param =
        colon == std::string::npos ? std::nullopt : std::optional<std::string>(spec.substr(colon + 1));
    auto param_or = [&](double fallback) { return param ? parse_param(*param, "parameter for " + name) : fallback; };
    auto canonical = [&](double v) { return name + ":" + format_double(v); };

    if (name == "identity") {
        if (param) throw UsageError("identity takes no parameter");
        return {"identity", [](double x) { return x; }};
    }
    if (name == "exp_scaled") {
        const double c = param_or(1.0);
        return {canonical(c), [c](double x) { return std::exp(c * x); }};
    }
    if (name == "power") {
        if (!param) throw UsageError("power requires an exponent, e.g. power:2");
        const double p = param_or(0.0);
        return {canonical(p), [p](double x) { return std::pow(x, p); }};
    }
    if (name == "inverse_shifted") {
        const double eps = param_or(1e-2);
        if (!(eps > 0.0)) throw UsageError("inverse_shifted needs eps > 0");
        return {canonical(eps), [eps](double x) { return 1.0 / (x + 1.0 + eps); }};
    }
    if (name == "log_shifted") {
        const double eps = param_or(1e-2);
        if (!(eps > 0.0)) throw UsageError("log_shifted needs eps > 0");
        return {canonical(eps), [eps](double x) { return std::log(x + 1.0 + eps); }};
    }
    throw UsageError("unknown function '" + name +
                     "' (known: identity, exp_scaled[:c], power:p, inverse_shifted[:eps], log_shifted[:eps])");
}

IntervalChoice parse_interval(const std::string& text) {
    if (text == "exact") return {IntervalSource::Exact};
    if (text == "power") return {IntervalSource::Power};
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw UsageError("interval must be 'exact', 'power' or 'lo,hi'");
    IntervalChoice c{IntervalSource::User};
    c.lo = parse_param(text.substr(0, comma), "interval endpoint");
    c.hi = parse_param(text.substr(comma + 1), "interval endpoint");
    if (!(c.lo < c.hi)) throw UsageError("interval needs lo < hi");
    return c;
}

std::vector<Evaluator> parse_evaluators(const std::string& text) {
    if (text == "all") return {std::begin(kAllEvaluators), std::end(kAllEvaluators)};
    std::vector<Evaluator> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        const auto e = parse_evaluator(item);
        if (!e) throw UsageError("unknown evaluator '" + item + "'");
        if (std::find(out.begin(), out.end(), *e) == out.end()) out.push_back(*e);
    }
    if (out.empty()) throw UsageError("no evaluators selected");
    return out;
}

Comparison compare_runs(Evaluator reference, std::span<const ProbeRun> ref_runs,
                        Evaluator other, std::span<const ProbeRun> other_runs) {
    if (ref_runs.size() != other_runs.size()) throw std::invalid_argument("runs differ in probe count");
    Comparison c;
    c.reference = reference;
    c.other = other;
    double ref_sum = 0.0;
    double oth_sum = 0.0;
    for (std::size_t i = 0; i < ref_runs.size(); ++i) {
        ref_sum += ref_runs[i].report.value;
        oth_sum += other_runs[i].report.value;
        c.max_per_probe_rel_diff = std::max(c.max_per_probe_rel_diff,
                                            rel_diff(other_runs[i].report.value, ref_runs[i].report.value));
    }
    const double m = static_cast<double>(ref_runs.size());
    c.aggregate_rel_diff = rel_diff(oth_sum / m, ref_sum / m);

    if (basis_of(reference) != basis_of(other)) return c;
    double all = 0.0;
    double significant = 0.0;
    double small = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < ref_runs.size(); ++i) {
        const auto& rt = ref_runs[i].report.terms;
        const auto& ot = other_runs[i].report.terms;
        if (!rt || !ot || rt->size() != ot->size()) return c;
        any = true;
        double largest = 0.0;
        for (double t : *rt) largest = std::max(largest, std::abs(t));
        for (std::size_t j = 0; j < rt->size(); ++j) {
            const double r = (*rt)[j];
            const double diff = std::abs((*ot)[j] - r);
            if (r != 0.0) all = std::max(all, diff / std::abs(r));
            if (std::abs(r) > kSignificantTermFraction * largest) {
                significant = std::max(significant, diff / std::abs(r));
            } else if (largest > 0.0) {
                small = std::max(small, diff / largest);
            }
        }
    }
    if (any) {
        c.max_term_rel_diff = all;
        c.max_significant_term_rel_diff = significant;
        c.max_small_term_abs_diff = small;
    }
    return c;
}

std::vector<EvaluatorRun> run_evaluators(const SymmetricOperator& op, const PolynomialCoefficients& coeffs,
                                         std::span<const Evaluator> evaluators, std::size_t m,
                                         std::uint64_t seed, bool terms, unsigned threads) {
    std::optional<PolynomialCoefficients> standard;
    std::vector<EvaluatorRun> out;
    for (const auto e : evaluators) {
        const PolynomialCoefficients* p = &coeffs;
        if (basis_of(e) != coeffs.basis()) {
            if (coeffs.basis() == Basis::Standard) {
                throw ValidationError(std::string(to_string(e)) + " needs Chebyshev coefficients; got standard-basis input");
            }
            if (!standard) standard = chebyshev_to_standard(coeffs);
            p = &*standard;
        }
        CountingOperator counter(op);
        EvaluatorRun r;
        r.evaluator = e;
        const auto start = std::chrono::steady_clock::now();
        r.runs = run_probes(counter, *p, e, m, seed, EstimateOptions{threads, terms});
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.estimate = summarize(r.runs);
        r.counted_matvecs = counter.count();
        if (r.counted_matvecs != r.estimate.total_matvecs || r.counted_matvecs != m * matvec_count(e, p->degree())) {
            throw std::logic_error("matvec accounting mismatch for " + std::string(to_string(e)));
        }
        out.push_back(std::move(r));
    }
    return out;
}

json run_estimate(const BenchConfig& config) {
    if (config.probes == 0) throw UsageError("--probes must be >= 1");
    if (config.evaluators.empty()) throw UsageError("no evaluators selected");
    if (config.function && config.coefficients) throw UsageError("--function and --coeffs are mutually exclusive");
    if (!config.function && !config.coefficients) throw UsageError("one of --function or --coeffs is required");
    if (config.matrix_path.has_value() == (config.synthetic_dim > 0)) {
        throw UsageError("exactly one of --matrix or --synthetic is required");
    }

    std::optional<LoadedOperator> loaded;
    json matrix;
    if (config.matrix_path) {
        loaded = load_matrix_market(*config.matrix_path);
        matrix = {{"source", "file"}, {"path", config.matrix_path->string()},
                  {"storage", std::holds_alternative<SparseSymmetric>(*loaded) ? "sparse" : "dense"}};
    } else {
        loaded = random_symmetric(config.synthetic_dim, config.matrix_seed);
        matrix = {{"source", "synthetic"}, {"seed", config.matrix_seed}, {"storage", "dense"}};
    }
    const SymmetricOperator& op = as_operator(*loaded);
    matrix["dim"] = op.dim();
    if (const auto* sparse = std::get_if<SparseSymmetric>(&*loaded)) matrix["nonzeros"] = sparse->nonzeros();

    // Dense view for oracles, when affordable.
    std::optional<DenseSymmetric> dense_copy;
    const DenseSymmetric* dense = std::get_if<DenseSymmetric>(&*loaded);
    if (!dense && op.dim() <= kDenseOracleLimit) {
        dense_copy = std::get<SparseSymmetric>(*loaded).to_dense();
        dense = &*dense_copy;
    }
    std::optional<Vector> eigenvalues;
    auto need_eigenvalues = [&]() -> const Vector& {
        if (!eigenvalues) eigenvalues = symmetric_eigenvalues(*dense);
        return *eigenvalues;
    };

    std::optional<NamedFunction> fn;
    std::optional<PolynomialCoefficients> coeffs;
    json interval_doc;
    if (config.coefficients) {
        coeffs = load_coefficients(*config.coefficients);
        interval_doc = interval_json(coeffs->interval().lo(), coeffs->interval().hi());
        interval_doc["source"] = "coefficients";
    } else {
        fn = parse_function(*config.function);
        double lo = config.interval.lo;
        double hi = config.interval.hi;
        switch (config.interval.source) {
            case IntervalSource::Exact: {
                if (!dense) throw ValidationError("--interval exact needs a matrix of dimension <= 5000");
                const auto& ev = need_eigenvalues();
                lo = ev.front();
                hi = ev.back();
                if (!(hi - lo >= 1e-14 * std::max({std::abs(lo), std::abs(hi), 1.0}))) {
                    throw DegenerateSpectrum("degenerate spectral interval: operator is a multiple of the identity");
                }
                interval_doc = interval_json(lo, hi);
                break;
            }
            case IntervalSource::Power: {
                const auto est = estimate_interval(op, config.power_iters, config.power_tol, config.seed,
                                                   config.power_margin);
                lo = est.lo;
                hi = est.hi;
                interval_doc = interval_json(lo, hi);
                interval_doc["converged"] = est.converged;
                interval_doc["margin"] = est.margin;
                interval_doc["matvecs"] = est.matvecs;
                break;
            }
            case IntervalSource::User:
                interval_doc = interval_json(lo, hi);
                break;
        }
        interval_doc["source"] = source_name(config.interval.source);
        coeffs = interpolate(fn->fn, config.degree, Interval(lo, hi));
    }

    const Interval domain = coeffs->interval();
    std::optional<ScaledOperator> scaled;
    if (!domain.is_canonical()) scaled.emplace(op, SpectralInterval{domain.lo(), domain.hi()});
    const SymmetricOperator& eval_op = scaled ? static_cast<const SymmetricOperator&>(*scaled) : op;

    json doc{{"schema", kResultSchema}, {"command", "estimate"}};
    doc["config"] = {
        {"function", fn ? json(fn->spec) : json(nullptr)},
        {"coefficients_file", config.coefficients ? json(config.coefficients->string()) : json(nullptr)},
        {"degree", coeffs->degree()},
        {"probes", config.probes},
        {"seed", config.seed},
        {"terms", config.terms},
        {"evaluators", [&] {
             json e = json::array();
             for (auto ev : config.evaluators) e.push_back(to_string(ev));
             return e;
         }()}};
    doc["matrix"] = std::move(matrix);
    doc["interval"] = std::move(interval_doc);
    doc["coefficients"] = coefficients_json(*coeffs);

    if (dense) {
        const auto& ev = need_eigenvalues();
        const auto t = exact_traces(ev, fn ? fn->fn : [](double) { return 0.0; }, *coeffs);
        doc["exact_trace"] = fn ? json(t.of_function) : json(nullptr);
        doc["exact_trace_polynomial"] = t.of_polynomial;
    }

    const auto runs = run_evaluators(eval_op, *coeffs, config.evaluators, config.probes, config.seed,
                                     config.terms, config.threads);
    attach_runs(doc, runs, coeffs->degree(), config.terms, config.threads);
    return doc;
}

json run_reproduce(const ReproduceConfig& config) {
    if (config.dim < 1) throw UsageError("dimension must be >= 1");
    if (config.probes == 0) throw UsageError("probes must be >= 1");

    const auto a = random_symmetric(config.dim, config.matrix_seed);
    const auto ev = symmetric_eigenvalues(a);
    const double lo = ev.front();
    const double hi = ev.back();

    // Scale the matrix itself so its extreme eigenvalues are -1 and 1.
    const auto d = static_cast<Eigen::Index>(config.dim);
    Eigen::MatrixXd scaled = (2.0 / (hi - lo)) * a.matrix();
    const double shift = (lo + hi) / (hi - lo);
    for (Eigen::Index i = 0; i < d; ++i) scaled(i, i) -= shift;
    const DenseSymmetric a_scaled(std::move(scaled));

    std::vector<double> scaled_ev(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) scaled_ev[i] = affine_to_canonical(Interval(lo, hi), ev[i]);

    const auto fn = parse_function("exp_scaled:" + format_double(config.exp_scale));
    const auto coeffs = interpolate(fn.fn, config.degree);
    const auto traces = exact_traces(scaled_ev, fn.fn, coeffs);

    json doc{{"schema", kResultSchema}, {"command", "reproduce"}};
    doc["config"] = {{"function", fn.spec}, {"degree", config.degree}, {"probes", config.probes},
                     {"seed", config.seed}, {"terms", true}};
    doc["matrix"] = {{"source", "synthetic"}, {"seed", config.matrix_seed}, {"storage", "dense"},
                     {"dim", config.dim}, {"original_interval", interval_json(lo, hi)}};
    doc["interval"] = interval_json(-1.0, 1.0);
    doc["interval"]["source"] = "exact";
    doc["coefficients"] = coefficients_json(coeffs);
    doc["exact_trace"] = traces.of_function;
    doc["exact_trace_polynomial"] = traces.of_polynomial;

    const Evaluator evaluators[] = {Evaluator::OneSidedChebyshev, Evaluator::TwoSidedChebyshev};
    const auto runs = run_evaluators(a_scaled, coeffs, evaluators, config.probes, config.seed, true, config.threads);
    attach_runs(doc, runs, coeffs.degree(), true, config.threads);
    return doc;
}

InterpolationResult run_interpolate(const std::string& function, std::size_t degree, const Interval& interval) {
    const auto fn = parse_function(function);
    if (degree == 0) throw UsageError("--degree must be >= 1 for interpolation");
    auto coeffs = interpolate(fn.fn, degree, interval);
    InterpolationResult r{std::move(coeffs)};
    double fmax = 0.0;
    constexpr int kGrid = 1000;
    for (int k = 0; k < kGrid; ++k) {
        const double t = -1.0 + 2.0 * k / (kGrid - 1);
        const double x = affine_from_canonical(interval, t);
        const double fx = fn.fn(x);
        if (!std::isfinite(fx)) continue;
        r.max_abs_residual = std::max(r.max_abs_residual, std::abs(eval_scalar(r.coeffs, x) - fx));
        fmax = std::max(fmax, std::abs(fx));
    }
    r.max_rel_residual = fmax > 0.0 ? r.max_abs_residual / fmax : r.max_abs_residual;
    return r;
}

std::string probe_csv(const json& result) {
    std::ostringstream os;
    const auto& evs = result.at("evaluators");
    os << "probe,checksum";
    for (const auto& e : evs) os << ',' << e.at("name").get<std::string>();
    os << '\n';
    if (evs.empty()) return os.str();
    const auto m = evs.front().at("probe_values").size();
    for (std::size_t i = 0; i < m; ++i) {
        os << i << ',' << evs.front().at("probe_checksums").at(i).get<std::string>();
        for (const auto& e : evs) os << ',' << format_double(e.at("probe_values").at(i).get<double>());
        os << '\n';
    }
    return os.str();
}

std::string summary_text(const json& result) {
    std::ostringstream os;
    os.precision(6);
    const auto& m = result.at("matrix");
    os << result.at("command").get<std::string>() << ": d=" << m.at("dim") << ", degree="
       << result.at("config").at("degree") << ", probes=" << result.at("config").at("probes") << '\n';
    const auto& iv = result.at("interval");
    os << "  interval [" << iv.at("lo").get<double>() << ", " << iv.at("hi").get<double>() << "] ("
       << iv.at("source").get<std::string>() << ")\n";
    if (result.contains("exact_trace") && !result["exact_trace"].is_null()) {
        os << "  exact trace f(A):        " << result["exact_trace"].get<double>() << '\n';
    }
    if (result.contains("exact_trace_polynomial")) {
        os << "  exact trace p(A):        " << result["exact_trace_polynomial"].get<double>() << '\n';
    }
    for (const auto& e : result.at("evaluators")) {
        const auto name = e.at("name").get<std::string>();
        os << "  " << name << ": estimate " << e.at("mean").get<double>();
        if (!e.at("sample_stddev").is_null()) os << " (sd " << e.at("sample_stddev").get<double>() << ")";
        os << ", matvecs " << e.at("total_matvecs") << " (" << e.at("matvecs_per_probe") << "/probe)";
        if (result.contains("timing")) {
            const auto& wall = result["timing"].at("wall_seconds");
            if (wall.contains(name)) os << ", " << wall.at(name).get<double>() << " s";
        }
        os << '\n';
    }
    os.precision(3);
    for (const auto& c : result.at("comparisons")) {
        os << "  " << c.at("other").get<std::string>() << " vs " << c.at("reference").get<std::string>()
           << ": aggregate rel diff " << std::scientific << c.at("aggregate_rel_diff").get<double>()
           << ", max per-probe " << c.at("max_per_probe_rel_diff").get<double>();
        if (!c.at("max_term_rel_diff").is_null()) {
            os << ", max per-term " << c.at("max_term_rel_diff").get<double>() << " (significant "
               << c.at("max_significant_term_rel_diff").get<double>() << ", small/abs "
               << c.at("max_small_term_abs_diff").get<double>() << ")";
        }
        os << std::defaultfloat << '\n';
    }
    os << "  paired probes: " << (result.at("paired_probes").get<bool>() ? "yes" : "NO") << '\n';
    return os.str();
}

json strip_timing(json result) {
    result.erase("timing");
    return result;
}

}  // namespace quadtrace::app
