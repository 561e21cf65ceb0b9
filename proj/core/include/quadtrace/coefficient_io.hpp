#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "quadtrace/chebyshev.hpp"

namespace quadtrace {

/**
 Plain-text coefficient files:

     %%quadtrace coefficients 1
     basis chebyshev
     interval -1 1
     degree 2
     0.5
     0
     0.5

 One coefficient per line in index order. Numbers use the shortest decimal
 form that round-trips the 64-bit value exactly. Lines starting with '#'
 are comments.
 */
void write_coefficients(std::ostream& out, const PolynomialCoefficients& p);
void save_coefficients(const std::filesystem::path& path, const PolynomialCoefficients& p);

/// Throws ParseError (see matrix_market.hpp) with the offending line.
PolynomialCoefficients read_coefficients(std::istream& in);
PolynomialCoefficients load_coefficients(const std::filesystem::path& path);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace quadtrace
