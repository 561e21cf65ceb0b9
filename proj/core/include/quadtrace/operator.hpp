#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace quadtrace {

using Vector = std::vector<double>;

/// Thrown when a vector's length does not match an operator dimension.
class DimensionError : public std::invalid_argument {
public:
    DimensionError(std::size_t expected, std::size_t received);

    std::size_t expected() const noexcept { return expected_; }
    std::size_t received() const noexcept { return received_; }

private:
    std::size_t expected_;
    std::size_t received_;
};

/// Thrown when input data violates a structural requirement (asymmetry,
/// unsorted indices, non-finite values, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 A symmetric linear map on R^d, seen only through its action on vectors.

 Implementations must be safe to call concurrently on distinct output
 buffers; none mutate observable state except CountingOperator's counter.
 */
class SymmetricOperator {
public:
    virtual ~SymmetricOperator() = default;

    virtual std::size_t dim() const noexcept = 0;

    /// out = A * in. Both spans must have length dim(); `in` and `out` must not alias.
    void apply(std::span<const double> in, std::span<double> out) const;

    /// Allocating convenience wrapper around apply().
    Vector matvec(std::span<const double> v) const;

protected:
    virtual void apply_unchecked(std::span<const double> in, std::span<double> out) const = 0;
};

/// Dense symmetric matrix stored in full. Symmetry is exact: entries(i,j) == entries(j,i).
class DenseSymmetric final : public SymmetricOperator {
public:
    /// Throws ValidationError unless `entries` is square, finite and exactly symmetric.
    explicit DenseSymmetric(Eigen::MatrixXd entries);

    static DenseSymmetric identity(std::size_t d);
    static DenseSymmetric diagonal(std::span<const double> values);

    std::size_t dim() const noexcept override { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

protected:
    void apply_unchecked(std::span<const double> in, std::span<double> out) const override;

private:
    Eigen::MatrixXd entries_;
};

/// One stored entry of a sparse matrix, 0-based.
struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/**
 Sparse symmetric matrix in compressed row storage. The full pattern
 (both triangles) is stored so a matvec is a single sweep over rows.
 */
class SparseSymmetric final : public SymmetricOperator {
public:
    /// Validates shape, strictly increasing columns per row, finiteness and
    /// exact symmetry of both pattern and values.
    SparseSymmetric(std::size_t d,
                    std::vector<std::size_t> row_offsets,
                    std::vector<std::size_t> col_indices,
                    std::vector<double> values);

    /// Builds from unordered triplets; duplicates are summed. The assembled
    /// matrix must be exactly symmetric.
    static SparseSymmetric from_triplets(std::size_t d, std::span<const Triplet> entries);

    std::size_t dim() const noexcept override { return dim_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
    std::span<const double> values() const noexcept { return values_; }

    DenseSymmetric to_dense() const;

protected:
    void apply_unchecked(std::span<const double> in, std::span<double> out) const override;

private:
    std::size_t dim_;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

/// Non-owning wrapper counting apply() calls. The counter is atomic so
/// concurrent probes can share one wrapper.
class CountingOperator final : public SymmetricOperator {
public:
    explicit CountingOperator(const SymmetricOperator& inner) noexcept : inner_(inner) {}

    std::size_t dim() const noexcept override { return inner_.dim(); }
    std::uint64_t count() const noexcept { return count_.load(std::memory_order_relaxed); }
    void reset() noexcept { count_.store(0, std::memory_order_relaxed); }

protected:
    void apply_unchecked(std::span<const double> in, std::span<double> out) const override;

private:
    const SymmetricOperator& inner_;
    mutable std::atomic<std::uint64_t> count_{0};
};

/// (B + B^T)/2 with B having iid standard-normal entries. Bit-reproducible
/// for a given (d, seed) on a given standard library.
DenseSymmetric random_symmetric(std::size_t d, std::uint64_t seed);

/// All eigenvalues of a dense symmetric matrix, ascending.
Vector symmetric_eigenvalues(const DenseSymmetric& a);

/// Index-ordered dot product; no reassociation or compensation.
double dot(std::span<const double> x, std::span<const double> y);

}  // namespace quadtrace
