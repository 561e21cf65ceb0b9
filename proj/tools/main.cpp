// quadtrace command-line driver.
//
// Exit codes: 0 success, 1 usage error, 2 numerical or validation error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app.hpp"
#include "quadtrace/coefficient_io.hpp"

namespace qa = quadtrace::app;

namespace {

constexpr int kUsageExit = 1;
constexpr int kNumericExit = 2;

// Reference figures from a d = 5000 run on another instance; qualitative only.
constexpr const char* kFullScaleReference =
    "reference values at d=5000 (different random instance, qualitative comparison only):\n"
    "  trace f(A) ~ 7.04e5, estimates ~ 7.14e5, aggregate rel diff ~ 1.6e-16,\n"
    "  max per-evaluation rel diff ~ 1.6e-14, max per-term rel diff ~ 3.1e-11\n";

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void emit(const nlohmann::json& doc, const std::string& format, const std::string& out,
          const std::string& csv, const char* extra_text = nullptr) {
    // Build everything first so a failure leaves no partial output.
    const std::string body = format == "json" ? doc.dump(2) + "\n"
                                              : qa::summary_text(doc) + (extra_text ? extra_text : "");
    const std::string table = csv.empty() ? std::string() : qa::probe_csv(doc);
    write_text(out, body);
    if (!csv.empty()) write_text(csv, table);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic trace estimation with two-sided quadratic-form evaluation"};
    app.require_subcommand(1);

    // interpolate
    auto* interp = app.add_subcommand("interpolate", "Chebyshev-interpolate a registered function");
    std::string interp_function;
    std::size_t interp_degree = 20;
    std::string interp_interval = "-1,1";
    std::string interp_out;
    interp->add_option("--function", interp_function, "Function spec, e.g. exp_scaled:10")->required();
    interp->add_option("--degree", interp_degree, "Polynomial degree n >= 1");
    interp->add_option("--interval", interp_interval, "Interval as lo,hi (use --interval=lo,hi for negative lo)");
    interp->add_option("--out", interp_out, "Coefficient file (default: stdout)");

    // estimate
    auto* est = app.add_subcommand("estimate", "Hutchinson trace estimate with selected evaluators");
    qa::BenchConfig cfg;
    std::string matrix_path;
    std::string function;
    std::string coeff_path;
    std::string evaluators = "one_sided_chebyshev,two_sided_chebyshev";
    std::string interval = "exact";
    std::string est_out;
    std::string est_format = "json";
    std::string est_csv;
    auto* matrix_opt = est->add_option("--matrix", matrix_path, "Matrix Market file");
    auto* synth_opt = est->add_option("--synthetic", cfg.synthetic_dim, "Random symmetric matrix of this dimension");
    matrix_opt->excludes(synth_opt);
    est->add_option("--matrix-seed", cfg.matrix_seed, "Seed for --synthetic");
    est->add_option("--seed", cfg.seed, "Probe seed");
    auto* fn_opt = est->add_option("--function", function, "Function spec, e.g. exp_scaled:10");
    auto* coeff_opt = est->add_option("--coeffs", coeff_path, "Coefficient file (user polynomial)");
    fn_opt->excludes(coeff_opt);
    est->add_option("--degree", cfg.degree, "Interpolation degree");
    est->add_option("--probes", cfg.probes, "Number of Rademacher probes m");
    est->add_option("--evaluators", evaluators, "Comma-separated evaluators or 'all'");
    est->add_option("--interval", interval, "exact | power | lo,hi");
    est->add_option("--power-iters", cfg.power_iters, "Power iteration step limit per pass");
    est->add_option("--power-tol", cfg.power_tol, "Power iteration relative tolerance");
    est->add_option("--margin", cfg.power_margin, "Outward margin for power-iteration intervals");
    est->add_flag("--terms", cfg.terms, "Record per-term breakdowns");
    est->add_option("--threads", cfg.threads, "Probe worker threads (0 = hardware)");
    est->add_option("--out", est_out, "Result path (default: stdout)");
    est->add_option("--format", est_format, "json | text")->check(CLI::IsMember({"json", "text"}));
    est->add_option("--csv", est_csv, "Per-probe CSV table path");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "Paired one-/two-sided Chebyshev run on a scaled random matrix");
    qa::ReproduceConfig rcfg;
    bool full = false;
    std::string rep_out;
    std::string rep_format = "text";
    std::string rep_csv;
    auto* desk_opt = rep->add_option("--desk", rcfg.dim, "Desk-scale dimension d >= 50 (default 200)");
    auto* full_opt = rep->add_flag("--full", full, "Full scale, d = 5000");
    desk_opt->excludes(full_opt);
    rep->add_option("--matrix-seed", rcfg.matrix_seed, "Matrix seed");
    rep->add_option("--seed", rcfg.seed, "Probe seed");
    rep->add_option("--probes", rcfg.probes, "Trials");
    rep->add_option("--degree", rcfg.degree, "Interpolation degree");
    rep->add_option("--threads", rcfg.threads, "Probe worker threads (0 = hardware)");
    rep->add_option("--out", rep_out, "Report path (default: stdout)");
    rep->add_option("--format", rep_format, "json | text")->check(CLI::IsMember({"json", "text"}));
    rep->add_option("--csv", rep_csv, "Per-probe CSV table path");

    // matvec-count
    auto* count = app.add_subcommand("matvec-count", "Matvecs per evaluation for a degree");
    std::size_t count_degree = 20;
    std::string count_evaluators = "all";
    count->add_option("--degree", count_degree, "Polynomial degree")->required();
    count->add_option("--evaluators", count_evaluators, "Comma-separated evaluators or 'all'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageExit;
    }

    try {
        if (*interp) {
            const auto iv = qa::parse_interval(interp_interval);
            if (iv.source != qa::IntervalSource::User) throw qa::UsageError("interpolate needs --interval lo,hi");
            const auto r = qa::run_interpolate(interp_function, interp_degree, quadtrace::Interval(iv.lo, iv.hi));
            if (interp_out.empty()) {
                quadtrace::write_coefficients(std::cout, r.coeffs);
            } else {
                quadtrace::save_coefficients(interp_out, r.coeffs);
            }
            std::fprintf(stderr, "max interpolation residual on 1000-point grid: %.3e (relative %.3e)\n",
                         r.max_abs_residual, r.max_rel_residual);
        } else if (*est) {
            if (!matrix_path.empty()) cfg.matrix_path = matrix_path;
            if (!function.empty()) cfg.function = function;
            if (!coeff_path.empty()) cfg.coefficients = coeff_path;
            cfg.evaluators = qa::parse_evaluators(evaluators);
            cfg.interval = qa::parse_interval(interval);
            emit(qa::run_estimate(cfg), est_format, est_out, est_csv);
        } else if (*rep) {
            if (full) rcfg.dim = 5000;
            if (rcfg.dim < 50) throw qa::UsageError("--desk needs d >= 50");
            nlohmann::json doc;
            try {
                doc = qa::run_reproduce(rcfg);
            } catch (const std::bad_alloc&) {
                throw std::runtime_error("out of memory at d = " + std::to_string(rcfg.dim) +
                                         "; try a desk-scale run such as --desk 200");
            }
            emit(doc, rep_format, rep_out, rep_csv, full ? kFullScaleReference : nullptr);
        } else if (*count) {
            for (const auto e : qa::parse_evaluators(count_evaluators)) {
                std::cout << quadtrace::to_string(e) << ' ' << quadtrace::matvec_count(e, count_degree) << '\n';
            }
        }
    } catch (const qa::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericExit;
    }
    return 0;
}
