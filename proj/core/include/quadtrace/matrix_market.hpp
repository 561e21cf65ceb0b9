#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <variant>

#include "quadtrace/operator.hpp"

namespace quadtrace {

/// Malformed Matrix Market input. line() is 1-based; 0 when the error is not
/// tied to a particular line (e.g. truncated file).
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Coordinate files load as SparseSymmetric, array files as DenseSymmetric.
using LoadedOperator = std::variant<SparseSymmetric, DenseSymmetric>;

/**
 Reads a Matrix Market `matrix` of field real, double or integer with
 symmetry `symmetric` or `general`.

 Symmetric files store one triangle; it is mirrored into the full pattern.
 General files must equal their transpose to relative 1e-12 per entry pair
 and are then symmetrized exactly by averaging the pair.
 */
LoadedOperator read_matrix_market(std::istream& in);
LoadedOperator load_matrix_market(const std::filesystem::path& path);

const SymmetricOperator& as_operator(const LoadedOperator& loaded) noexcept;

}  // namespace quadtrace
