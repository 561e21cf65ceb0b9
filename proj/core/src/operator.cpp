#include "quadtrace/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace quadtrace {

namespace {

std::string dimension_message(std::size_t expected, std::size_t received) {
    std::ostringstream os;
    os << "dimension mismatch: expected vector of length " << expected
       << ", received length " << received;
    return os.str();
}

}  // namespace

DimensionError::DimensionError(std::size_t expected, std::size_t received)
    : std::invalid_argument(dimension_message(expected, received)),
      expected_(expected),
      received_(received) {}

void SymmetricOperator::apply(std::span<const double> in, std::span<double> out) const {
    const auto d = dim();
    if (in.size() != d) throw DimensionError(d, in.size());
    if (out.size() != d) throw DimensionError(d, out.size());
    apply_unchecked(in, out);
}

Vector SymmetricOperator::matvec(std::span<const double> v) const {
    Vector out(dim());
    apply(v, out);
    return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError(x.size(), y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// ---------------------------------------------------------------------------
// DenseSymmetric

DenseSymmetric::DenseSymmetric(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw ValidationError("dense operator must be square");
    }
    if (entries_.rows() == 0) throw ValidationError("dense operator must have dimension >= 1");
    const auto d = entries_.rows();
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = j; i < d; ++i) {
            const double a = entries_(i, j);
            if (!std::isfinite(a)) {
                std::ostringstream os;
                os << "non-finite entry at (" << i << ", " << j << ")";
                throw ValidationError(os.str());
            }
            if (a != entries_(j, i)) {
                std::ostringstream os;
                os << "matrix is not symmetric: entry (" << i << ", " << j << ") = " << a
                   << " but (" << j << ", " << i << ") = " << entries_(j, i);
                throw ValidationError(os.str());
            }
        }
    }
}

DenseSymmetric DenseSymmetric::identity(std::size_t d) {
    return DenseSymmetric(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                    static_cast<Eigen::Index>(d)));
}

DenseSymmetric DenseSymmetric::diagonal(std::span<const double> values) {
    Eigen::VectorXd diag(static_cast<Eigen::Index>(values.size()));
    std::copy(values.begin(), values.end(), diag.data());
    return DenseSymmetric(Eigen::MatrixXd(diag.asDiagonal()));
}

void DenseSymmetric::apply_unchecked(std::span<const double> in, std::span<double> out) const {
    const auto d = entries_.rows();
    Eigen::Map<const Eigen::VectorXd> x(in.data(), d);
    Eigen::Map<Eigen::VectorXd> y(out.data(), d);
    y.noalias() = entries_ * x;
}

// ---------------------------------------------------------------------------
// SparseSymmetric

SparseSymmetric::SparseSymmetric(std::size_t d,
                                 std::vector<std::size_t> row_offsets,
                                 std::vector<std::size_t> col_indices,
                                 std::vector<double> values)
    : dim_(d),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
    if (dim_ == 0) throw ValidationError("sparse operator must have dimension >= 1");
    if (row_offsets_.size() != dim_ + 1) {
        throw ValidationError("row offsets must have length dim + 1");
    }
    if (row_offsets_.front() != 0 || row_offsets_.back() != values_.size() ||
        col_indices_.size() != values_.size()) {
        throw ValidationError("inconsistent compressed row storage arrays");
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        const auto begin = row_offsets_[i];
        const auto end = row_offsets_[i + 1];
        if (end < begin) throw ValidationError("row offsets must be non-decreasing");
        for (std::size_t k = begin; k < end; ++k) {
            if (col_indices_[k] >= dim_) {
                std::ostringstream os;
                os << "column index " << col_indices_[k] << " out of range in row " << i;
                throw ValidationError(os.str());
            }
            if (k > begin && col_indices_[k] <= col_indices_[k - 1]) {
                std::ostringstream os;
                os << "column indices not strictly increasing in row " << i;
                throw ValidationError(os.str());
            }
            if (!std::isfinite(values_[k])) {
                std::ostringstream os;
                os << "non-finite entry at (" << i << ", " << col_indices_[k] << ")";
                throw ValidationError(os.str());
            }
        }
    }
    // Symmetry: every (i, j, v) must have a partner (j, i, v).
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            const auto j = col_indices_[k];
            const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[j]);
            const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[j + 1]);
            const auto it = std::lower_bound(first, last, i);
            if (it == last || *it != i || values_[static_cast<std::size_t>(it - col_indices_.begin())] != values_[k]) {
                std::ostringstream os;
                os << "matrix is not symmetric at (" << i << ", " << j << ")";
                throw ValidationError(os.str());
            }
        }
    }
}

SparseSymmetric SparseSymmetric::from_triplets(std::size_t d, std::span<const Triplet> entries) {
    std::vector<Triplet> sorted(entries.begin(), entries.end());
    for (const auto& t : sorted) {
        if (t.row >= d || t.col >= d) {
            std::ostringstream os;
            os << "entry (" << t.row << ", " << t.col << ") outside a " << d << "x" << d << " matrix";
            throw ValidationError(os.str());
        }
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    std::vector<std::size_t> offsets(d + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    cols.reserve(sorted.size());
    vals.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const auto& t = sorted[k];
        if (k > 0 && sorted[k - 1].row == t.row && sorted[k - 1].col == t.col) {
            vals.back() += t.value;
            continue;
        }
        cols.push_back(t.col);
        vals.push_back(t.value);
        ++offsets[t.row + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    return SparseSymmetric(d, std::move(offsets), std::move(cols), std::move(vals));
}

DenseSymmetric SparseSymmetric::to_dense() const {
    const auto d = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_indices_[k])) = values_[k];
        }
    }
    return DenseSymmetric(std::move(m));
}

void SparseSymmetric::apply_unchecked(std::span<const double> in, std::span<double> out) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            s += values_[k] * in[col_indices_[k]];
        }
        out[i] = s;
    }
}

// ---------------------------------------------------------------------------

void CountingOperator::apply_unchecked(std::span<const double> in, std::span<double> out) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    inner_.apply(in, out);
}

DenseSymmetric random_symmetric(std::size_t d, std::uint64_t seed) {
    if (d == 0) throw ValidationError("random_symmetric requires d >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = static_cast<Eigen::Index>(d);
    // Row-major draw order so the stream is independent of Eigen's storage order.
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) = normal(rng);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = (b(i, j) + b(j, i)) / 2.0;
    return DenseSymmetric(std::move(m));
}

Vector symmetric_eigenvalues(const DenseSymmetric& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric eigendecomposition failed to converge");
    }
    const auto& ev = solver.eigenvalues();
    return Vector(ev.data(), ev.data() + ev.size());
}

}  // namespace quadtrace
