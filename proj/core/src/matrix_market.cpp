#include "quadtrace/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace quadtrace {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const auto start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    T value{};
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(line, "invalid numeric token '" + std::string(token) + "'");
    }
    return value;
}

struct Header {
    bool coordinate = true;
    bool symmetric = true;
};

Header parse_banner(const std::string& line) {
    const auto tokens = split(line);
    if (tokens.size() != 5 || lower(std::string(tokens[0])) != "%%matrixmarket") {
        throw ParseError(1, "missing or malformed %%MatrixMarket banner");
    }
    if (lower(std::string(tokens[1])) != "matrix") {
        throw ParseError(1, "only 'matrix' objects are supported");
    }
    Header h;
    const auto format = lower(std::string(tokens[2]));
    if (format == "coordinate") {
        h.coordinate = true;
    } else if (format == "array") {
        h.coordinate = false;
    } else {
        throw ParseError(1, "unknown storage format '" + format + "'");
    }
    const auto field = lower(std::string(tokens[3]));
    if (field != "real" && field != "double" && field != "integer") {
        throw ParseError(1, "unsupported field '" + field + "' (expected real, double or integer)");
    }
    const auto symmetry = lower(std::string(tokens[4]));
    if (symmetry == "symmetric") {
        h.symmetric = true;
    } else if (symmetry == "general") {
        h.symmetric = false;
    } else {
        throw ParseError(1, "unsupported symmetry '" + symmetry + "'");
    }
    return h;
}

// Reads the next non-comment, non-blank line. Returns false at EOF.
bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '%') continue;
        return true;
    }
    return false;
}

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= kSymmetryTolerance * std::max(std::abs(a), std::abs(b));
}

[[noreturn]] void asymmetric(std::size_t i, std::size_t j, double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix declared general is not symmetric: entry (" << i + 1 << ", " << j + 1
       << ") = " << a << " but (" << j + 1 << ", " << i + 1 << ") = " << b;
    throw ValidationError(os.str());
}

LoadedOperator read_coordinate(std::istream& in, const Header& header, std::size_t& line_no) {
    std::string line;
    if (!next_data_line(in, line, line_no)) throw ParseError(0, "missing size line");
    const auto size = split(line);
    if (size.size() != 3) throw ParseError(line_no, "size line must be 'rows cols nnz'");
    const auto rows = parse_number<std::size_t>(size[0], line_no);
    const auto cols = parse_number<std::size_t>(size[1], line_no);
    const auto nnz = parse_number<std::size_t>(size[2], line_no);
    if (rows != cols) throw ParseError(line_no, "matrix is not square");
    if (rows == 0) throw ParseError(line_no, "matrix has dimension 0");

    std::map<std::pair<std::size_t, std::size_t>, double> entries;
    for (std::size_t k = 0; k < nnz; ++k) {
        if (!next_data_line(in, line, line_no)) {
            throw ParseError(0, "file ended after " + std::to_string(k) + " of " +
                                    std::to_string(nnz) + " entries");
        }
        const auto tok = split(line);
        if (tok.size() != 3) throw ParseError(line_no, "entry line must be 'row col value'");
        const auto i = parse_number<std::size_t>(tok[0], line_no);
        const auto j = parse_number<std::size_t>(tok[1], line_no);
        const auto v = parse_number<double>(tok[2], line_no);
        if (i == 0 || j == 0 || i > rows || j > cols) {
            throw ParseError(line_no, "index out of range");
        }
        if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value");
        entries[{i - 1, j - 1}] += v;
    }

    std::vector<Triplet> triplets;
    triplets.reserve(2 * entries.size());
    if (header.symmetric) {
        for (const auto& [key, v] : entries) {
            const auto [i, j] = key;
            triplets.push_back({i, j, v});
            if (i != j) triplets.push_back({j, i, v});
        }
    } else {
        for (const auto& [key, v] : entries) {
            const auto [i, j] = key;
            if (i < j) continue;
            if (i == j) {
                triplets.push_back({i, i, v});
                continue;
            }
            const auto partner = entries.find({j, i});
            const double w = partner == entries.end() ? 0.0 : partner->second;
            if (!nearly_equal(v, w)) asymmetric(i, j, v, w);
            const double avg = (v + w) / 2.0;
            triplets.push_back({i, j, avg});
            triplets.push_back({j, i, avg});
        }
        // Upper-triangle entries without a lower partner.
        for (const auto& [key, v] : entries) {
            const auto [i, j] = key;
            if (i < j && !entries.contains({j, i}) && !nearly_equal(v, 0.0)) asymmetric(i, j, v, 0.0);
        }
    }
    return SparseSymmetric::from_triplets(rows, triplets);
}

LoadedOperator read_array(std::istream& in, const Header& header, std::size_t& line_no) {
    std::string line;
    if (!next_data_line(in, line, line_no)) throw ParseError(0, "missing size line");
    const auto size = split(line);
    if (size.size() != 2) throw ParseError(line_no, "size line must be 'rows cols'");
    const auto rows = parse_number<std::size_t>(size[0], line_no);
    const auto cols = parse_number<std::size_t>(size[1], line_no);
    if (rows != cols) throw ParseError(line_no, "matrix is not square");
    if (rows == 0) throw ParseError(line_no, "matrix has dimension 0");

    const auto d = static_cast<Eigen::Index>(rows);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    // Column-major; symmetric files list only the lower triangle.
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = header.symmetric ? j : 0; i < d; ++i) {
            if (!next_data_line(in, line, line_no)) throw ParseError(0, "file ended before all entries were read");
            const auto tok = split(line);
            if (tok.size() != 1) throw ParseError(line_no, "array entry line must hold one value");
            const auto v = parse_number<double>(tok[0], line_no);
            if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value");
            m(i, j) = v;
        }
    }
    if (header.symmetric) {
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index i = j + 1; i < d; ++i) m(j, i) = m(i, j);
    } else {
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index i = j + 1; i < d; ++i) {
                const double a = m(i, j);
                const double b = m(j, i);
                if (!nearly_equal(a, b)) {
                    asymmetric(static_cast<std::size_t>(i), static_cast<std::size_t>(j), a, b);
                }
                m(i, j) = m(j, i) = (a + b) / 2.0;
            }
        }
    }
    return DenseSymmetric(std::move(m));
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

LoadedOperator read_matrix_market(std::istream& in) {
    std::string banner;
    if (!std::getline(in, banner)) throw ParseError(0, "empty input");
    const auto header = parse_banner(banner);
    std::size_t line_no = 1;
    return header.coordinate ? read_coordinate(in, header, line_no) : read_array(in, header, line_no);
}

LoadedOperator load_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file '" + path.string() + "'");
    return read_matrix_market(in);
}

const SymmetricOperator& as_operator(const LoadedOperator& loaded) noexcept {
    return std::visit([](const auto& op) -> const SymmetricOperator& { return op; }, loaded);
}

}  // namespace quadtrace
