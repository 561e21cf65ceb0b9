#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace {

const std::string kCli = QUADTRACE_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("matvec-count --degree 20"), 0);
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("estimate --synthetic 10 --function nosuch"), 1);
    EXPECT_EQ(run("estimate --synthetic 10 --function identity --evaluators nine_sided"), 1);
    EXPECT_EQ(run("interpolate --function identity --interval 3,1"), 1);
    EXPECT_EQ(run("reproduce --desk 10"), 1);
    // Numerical / validation failures.
    EXPECT_EQ(run("estimate --matrix /nonexistent.mtx --function identity"), 2);
    EXPECT_EQ(run("interpolate --function power:-1 --degree 2"), 2);
    const auto bad = tmp("quadtrace_cli_bad.mtx");
    std::ofstream(bad) << "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 5\n";
    EXPECT_EQ(run("estimate --matrix " + bad.string() + " --function identity"), 2);
}

TEST(Cli, InterpolateWritesCoefficientFile) {
    const auto out = tmp("quadtrace_cli_sq.txt");
    ASSERT_EQ(run("interpolate --function power:2 --degree 2 --out " + out.string()), 0);
    EXPECT_EQ(slurp(out), "%%quadtrace coefficients 1\nbasis chebyshev\ninterval -1 1\ndegree 2\n0.5\n0\n0.5\n");
}

TEST(Cli, EstimateFilesAreDeterministic) {
    const auto a = tmp("quadtrace_cli_a.json");
    const auto b = tmp("quadtrace_cli_b.json");
    const auto csv = tmp("quadtrace_cli_a.csv");
    const std::string args = "estimate --synthetic 40 --function exp_scaled:10 --degree 20 --probes 12 --terms ";
    ASSERT_EQ(run(args + "--out " + a.string() + " --csv " + csv.string()), 0);
    ASSERT_EQ(run(args + "--threads 3 --out " + b.string()), 0);
    auto ja = nlohmann::json::parse(slurp(a));
    auto jb = nlohmann::json::parse(slurp(b));
    ja.erase("timing");
    jb.erase("timing");
    EXPECT_EQ(ja, jb);
    EXPECT_EQ(ja.at("schema"), "quadtrace.result/1");
    EXPECT_EQ(ja.at("config").at("function"), "exp_scaled:10");
    EXPECT_FALSE(slurp(csv).empty());
}

TEST(Cli, ReproduceJson) {
    const auto out = tmp("quadtrace_cli_rep.json");
    ASSERT_EQ(run("reproduce --desk 60 --probes 10 --format json --out " + out.string()), 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(doc.at("command"), "reproduce");
    EXPECT_EQ(doc.at("matrix").at("dim"), 60);
}
