#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "app.hpp"
#include "quadtrace/coefficient_io.hpp"
#include "quadtrace/matrix_market.hpp"

using namespace quadtrace;
using namespace quadtrace::app;
using nlohmann::json;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << contents;
    return path;
}

const json& evaluator(const json& doc, std::string_view name) {
    for (const auto& e : doc.at("evaluators"))
        if (e.at("name") == name) return e;
    throw std::runtime_error("missing evaluator");
}

}  // namespace

TEST(Registry, Functions) {
    EXPECT_DOUBLE_EQ(parse_function("identity").fn(0.3), 0.3);
    EXPECT_DOUBLE_EQ(parse_function("exp_scaled:10").fn(0.1), std::exp(1.0));
    EXPECT_EQ(parse_function("exp_scaled:10").spec, "exp_scaled:10");
    EXPECT_DOUBLE_EQ(parse_function("exp_scaled").fn(1.0), std::exp(1.0));
    EXPECT_DOUBLE_EQ(parse_function("power:2").fn(-3.0), 9.0);
    EXPECT_DOUBLE_EQ(parse_function("inverse_shifted").fn(-1.0), 100.0);
    EXPECT_DOUBLE_EQ(parse_function("log_shifted:1").fn(0.0), std::log(2.0));
    EXPECT_THROW(parse_function("sinc"), UsageError);
    EXPECT_THROW(parse_function("power"), UsageError);
    EXPECT_THROW(parse_function("exp_scaled:abc"), UsageError);
    EXPECT_THROW(parse_function("inverse_shifted:-1"), UsageError);
}

TEST(Registry, IntervalsAndEvaluators) {
    EXPECT_EQ(parse_interval("exact").source, IntervalSource::Exact);
    EXPECT_EQ(parse_interval("power").source, IntervalSource::Power);
    const auto u = parse_interval("-2,3.5");
    EXPECT_EQ(u.source, IntervalSource::User);
    EXPECT_EQ(u.lo, -2.0);
    EXPECT_EQ(u.hi, 3.5);
    EXPECT_THROW(parse_interval("3,1"), UsageError);
    EXPECT_THROW(parse_interval("wide"), UsageError);
    EXPECT_EQ(parse_evaluators("all").size(), 4u);
    EXPECT_EQ(parse_evaluators("two_sided_chebyshev,two_sided_chebyshev").size(), 1u);
    EXPECT_THROW(parse_evaluators("fast"), UsageError);
}

TEST(Interpolate, Examples) {
    const auto e = run_interpolate("exp_scaled:10", 20, Interval::canonical());
    EXPECT_EQ(e.coeffs.coeffs().size(), 21u);
    EXPECT_GT(e.max_abs_residual, 0.0);
    EXPECT_LT(e.max_rel_residual, 1e-7);

    const auto id = run_interpolate("identity", 1, Interval::canonical());
    EXPECT_NEAR(id.coeffs[0], 0.0, 1e-16);
    EXPECT_NEAR(id.coeffs[1], 1.0, 1e-16);

    const auto sq = run_interpolate("power:2", 2, Interval::canonical());
    EXPECT_NEAR(sq.coeffs[0], 0.5, 1e-16);
    EXPECT_NEAR(sq.coeffs[1], 0.0, 1e-16);
    EXPECT_NEAR(sq.coeffs[2], 0.5, 1e-16);

    EXPECT_THROW(run_interpolate("nope", 3, Interval::canonical()), UsageError);
}

TEST(Estimate, IdentityMatrixFromFile) {
    std::string mtx = "%%MatrixMarket matrix coordinate real symmetric\n10 10 10\n";
    for (int i = 1; i <= 10; ++i) mtx += std::to_string(i) + " " + std::to_string(i) + " 1\n";
    const auto matrix = temp_file("quadtrace_identity.mtx", mtx);
    const auto coeffs = temp_file("quadtrace_identity_coeffs.txt", "");
    save_coefficients(coeffs, PolynomialCoefficients(Basis::Chebyshev, {0.0, 1.0}));

    BenchConfig cfg;
    cfg.matrix_path = matrix;
    cfg.coefficients = coeffs;
    cfg.probes = 1;
    cfg.evaluators = {Evaluator::TwoSidedChebyshev};
    const auto doc = run_estimate(cfg);
    EXPECT_EQ(doc.at("schema"), kResultSchema);
    EXPECT_EQ(doc.at("matrix").at("storage"), "sparse");
    EXPECT_EQ(evaluator(doc, "two_sided_chebyshev").at("mean").get<double>(), 10.0);
    EXPECT_EQ(evaluator(doc, "two_sided_chebyshev").at("total_matvecs"), 1u);
    EXPECT_EQ(doc.at("exact_trace_polynomial").get<double>(), 10.0);
}

TEST(Estimate, SyntheticPairedComparison) {
    BenchConfig cfg;
    cfg.synthetic_dim = 100;
    cfg.function = "exp_scaled:10";
    cfg.degree = 20;
    cfg.probes = 100;
    const auto doc = run_estimate(cfg);
    EXPECT_EQ(evaluator(doc, "one_sided_chebyshev").at("total_matvecs"), 2000u);
    EXPECT_EQ(evaluator(doc, "two_sided_chebyshev").at("total_matvecs"), 1000u);
    EXPECT_EQ(evaluator(doc, "two_sided_chebyshev").at("counted_matvecs"), 1000u);
    ASSERT_EQ(doc.at("comparisons").size(), 1u);
    const auto& c = doc["comparisons"][0];
    EXPECT_EQ(c.at("reference"), "one_sided_chebyshev");
    EXPECT_LE(c.at("max_per_probe_rel_diff").get<double>(), 1e-10);
    EXPECT_TRUE(doc.at("paired_probes").get<bool>());
    EXPECT_EQ(evaluator(doc, "one_sided_chebyshev").at("probe_checksums"),
              evaluator(doc, "two_sided_chebyshev").at("probe_checksums"));
}

TEST(Estimate, DeterministicModuloTimingSerialAndParallel) {
    BenchConfig cfg;
    cfg.synthetic_dim = 60;
    cfg.function = "exp_scaled:0.2";
    cfg.degree = 15;
    cfg.probes = 25;
    cfg.interval = parse_interval("power");
    cfg.evaluators = parse_evaluators("all");
    cfg.terms = true;
    const auto a = strip_timing(run_estimate(cfg)).dump();
    const auto b = strip_timing(run_estimate(cfg)).dump();
    cfg.threads = 4;
    const auto c = strip_timing(run_estimate(cfg)).dump();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
}

TEST(Estimate, AllEvaluatorsAgreeThroughBasisConversion) {
    BenchConfig cfg;
    cfg.synthetic_dim = 50;
    cfg.function = "exp_scaled:0.1";
    cfg.degree = 12;
    cfg.probes = 10;
    cfg.evaluators = parse_evaluators("all");
    cfg.terms = true;
    const auto doc = run_estimate(cfg);
    EXPECT_EQ(doc.at("comparisons").size(), 6u);
    for (const auto& c : doc["comparisons"]) {
        EXPECT_LE(c.at("max_per_probe_rel_diff").get<double>(), 1e-10) << c.dump();
    }
    // Exact trace f(A) is well approximated by the polynomial trace.
    EXPECT_LE(std::abs(doc["exact_trace"].get<double>() - doc["exact_trace_polynomial"].get<double>()),
              1e-8 * std::abs(doc["exact_trace"].get<double>()));
}

TEST(Estimate, UserIntervalAndCsv) {
    BenchConfig cfg;
    cfg.synthetic_dim = 30;
    cfg.function = "identity";
    cfg.degree = 1;
    cfg.probes = 4;
    cfg.interval = parse_interval("-50,50");
    const auto doc = run_estimate(cfg);
    EXPECT_EQ(doc.at("interval").at("source"), "user");
    const auto csv = probe_csv(doc);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "probe,checksum,one_sided_chebyshev,two_sided_chebyshev");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_FALSE(summary_text(doc).empty());
}

TEST(Estimate, ConfigurationErrors) {
    BenchConfig cfg;
    cfg.function = "identity";
    EXPECT_THROW(run_estimate(cfg), UsageError);  // no matrix
    cfg.synthetic_dim = 5;
    cfg.probes = 0;
    EXPECT_THROW(run_estimate(cfg), UsageError);
    cfg.probes = 2;
    cfg.coefficients = "x.txt";
    EXPECT_THROW(run_estimate(cfg), UsageError);  // function and coeffs

    BenchConfig std_cfg;
    std_cfg.synthetic_dim = 5;
    const auto coeffs = temp_file("quadtrace_std_coeffs.txt", "");
    save_coefficients(coeffs, PolynomialCoefficients(Basis::Standard, {1.0, 2.0}));
    std_cfg.coefficients = coeffs;
    EXPECT_THROW(run_estimate(std_cfg), ValidationError);  // Chebyshev evaluators, standard input
    std_cfg.evaluators = parse_evaluators("one_sided_standard,two_sided_standard");
    EXPECT_NO_THROW(run_estimate(std_cfg));
}

TEST(Reproduce, DeskScale) {
    ReproduceConfig cfg;
    cfg.dim = 200;
    const auto doc = run_reproduce(cfg);
    const auto& c = doc.at("comparisons").at(0);
    EXPECT_LE(c.at("aggregate_rel_diff").get<double>(), 1e-13);
    EXPECT_LE(c.at("max_per_probe_rel_diff").get<double>(), 1e-11);
    EXPECT_LE(c.at("max_significant_term_rel_diff").get<double>(), 1e-9);
    EXPECT_LE(c.at("max_small_term_abs_diff").get<double>(), 1e-9);
    EXPECT_EQ(evaluator(doc, "two_sided_chebyshev").at("total_matvecs"), 1000u);
    EXPECT_EQ(evaluator(doc, "one_sided_chebyshev").at("total_matvecs"), 2000u);
    EXPECT_GT(doc.at("exact_trace").get<double>(), 0.0);
    EXPECT_EQ(doc.at("interval").at("lo"), -1.0);
}
