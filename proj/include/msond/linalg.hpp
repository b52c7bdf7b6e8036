#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "msond/random.hpp"

namespace msond {

using CVector = std::vector<cplx>;

/// Dense complex matrix, column-major. Sized for the M <= 16 problems the
/// simulator needs; no expression templates, no aliasing tricks.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> column_major);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix from_columns(std::span<const CVector> columns, std::size_t rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

    std::span<const cplx> col(std::size_t c) const noexcept { return {data_.data() + c * rows_, rows_}; }
    std::span<cplx> col(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }

    /// Columns [first, first + count) as a new matrix.
    ComplexMatrix col_block(std::size_t first, std::size_t count) const;

    ComplexMatrix adjoint() const;
    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    CVector operator*(std::span<const cplx> v) const;

    const std::vector<cplx>& data() const noexcept { return data_; }

    bool all_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Orthonormal split of C^M into an interference space (M - S columns) and
/// the signal space (S columns) that is its null space.
struct SubspacePair {
    ComplexMatrix interference;  // Q
    ComplexMatrix signal;        // U
};

/// Haar-distributed dim x dim unitary.
ComplexMatrix random_unitary(std::size_t dim, Rng& rng);

SubspacePair split_spaces(std::size_t m, std::size_t s, Rng& rng);

/// U^H h, the component of h outside span(Q).
CVector project_signal(const ComplexMatrix& u, std::span<const cplx> h);

/// Inverse of a small square matrix by partially pivoted Gauss-Jordan.
/// Throws SingularMatrix when the 1-norm condition estimate exceeds 1e12.
ComplexMatrix invert_small(const ComplexMatrix& a);

inline constexpr double kSingularConditionLimit = 1e12;

double norm_sq(std::span<const cplx> v) noexcept;

/// sum_i a_i * b_i, no conjugation (the v^T h products of the beam model).
cplx dot_transpose(std::span<const cplx> a, std::span<const cplx> b) noexcept;

/// sum_i conj(a_i) * b_i.
cplx dot_adjoint(std::span<const cplx> a, std::span<const cplx> b) noexcept;

/// max |A(i,j) - I(i,j)|.
double max_abs_identity_error(const ComplexMatrix& a) noexcept;

}  // namespace msond
