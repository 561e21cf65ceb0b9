#include "quadtrace/coefficient_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "quadtrace/matrix_market.hpp"

namespace quadtrace {

namespace {

constexpr std::string_view kMagic = "%%quadtrace coefficients 1";

double parse_double(const std::string& token, std::size_t line) {
    double v = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw ParseError(line, "invalid number '" + token + "'");
    return v;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

void write_coefficients(std::ostream& out, const PolynomialCoefficients& p) {
    out << kMagic << '\n'
        << "basis " << to_string(p.basis()) << '\n'
        << "interval " << format_double(p.interval().lo()) << ' ' << format_double(p.interval().hi()) << '\n'
        << "degree " << p.degree() << '\n';
    for (double c : p.coeffs()) out << format_double(c) << '\n';
}

void save_coefficients(const std::filesystem::path& path, const PolynomialCoefficients& p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_coefficients(out, p);
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

PolynomialCoefficients read_coefficients(std::istream& in) {
    std::size_t line_no = 0;
    std::string line;
    auto next = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            return true;
        }
        return false;
    };

    if (!next() || line != kMagic) throw ParseError(line_no, "missing '%%quadtrace coefficients 1' header");

    auto keyed = [&](std::string_view key) -> std::vector<std::string> {
        if (!next()) throw ParseError(line_no, "missing '" + std::string(key) + "' line");
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k != key) throw ParseError(line_no, "expected '" + std::string(key) + "'");
        std::vector<std::string> rest;
        for (std::string t; ls >> t;) rest.push_back(t);
        return rest;
    };

    const auto basis_tok = keyed("basis");
    if (basis_tok.size() != 1) throw ParseError(line_no, "basis line takes one value");
    Basis basis;
    if (basis_tok[0] == "chebyshev") {
        basis = Basis::Chebyshev;
    } else if (basis_tok[0] == "standard") {
        basis = Basis::Standard;
    } else {
        throw ParseError(line_no, "unknown basis '" + basis_tok[0] + "'");
    }

    const auto iv = keyed("interval");
    if (iv.size() != 2) throw ParseError(line_no, "interval line takes two values");
    const double lo = parse_double(iv[0], line_no);
    const double hi = parse_double(iv[1], line_no);
    Interval interval;
    try {
        interval = Interval(lo, hi);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
    }

    const auto deg = keyed("degree");
    if (deg.size() != 1) throw ParseError(line_no, "degree line takes one value");
    std::size_t n = 0;
    {
        const auto& t = deg[0];
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
        if (ec != std::errc{} || ptr != t.data() + t.size()) throw ParseError(line_no, "invalid degree '" + t + "'");
    }

    std::vector<double> coeffs;
    coeffs.reserve(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        if (!next()) throw ParseError(line_no, "expected " + std::to_string(n + 1) + " coefficients, found " + std::to_string(j));
        coeffs.push_back(parse_double(line, line_no));
    }
    if (next()) throw ParseError(line_no, "unexpected trailing content");
    try {
        return PolynomialCoefficients(basis, std::move(coeffs), interval);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
    }
}

PolynomialCoefficients load_coefficients(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open coefficient file '" + path.string() + "'");
    return read_coefficients(in);
}

}  // namespace quadtrace
