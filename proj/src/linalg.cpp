#include "msond/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "msond/error.hpp"

namespace msond {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0})
{
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major))
{
    if (data_.size() != rows * cols) {
        throw InvalidDimension("matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                               " given " + std::to_string(data_.size()) + " entries");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim)
{
    ComplexMatrix out(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out(i, i) = 1.0;
    }
    return out;
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const CVector> columns, std::size_t rows)
{
    ComplexMatrix out(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != rows) {
            throw InvalidDimension("column " + std::to_string(c) + " has length " +
                                   std::to_string(columns[c].size()) + ", expected " +
                                   std::to_string(rows));
        }
        std::copy(columns[c].begin(), columns[c].end(), out.col(c).begin());
    }
    return out;
}

ComplexMatrix ComplexMatrix::col_block(std::size_t first, std::size_t count) const
{
    if (first + count > cols_) {
        throw InvalidDimension("column block out of range");
    }
    std::vector<cplx> data(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_),
                           data_.begin() + static_cast<std::ptrdiff_t>((first + count) * rows_));
    return ComplexMatrix(rows_, count, std::move(data));
}

ComplexMatrix ComplexMatrix::adjoint() const
{
    ComplexMatrix out(cols_, rows_);
    for (std::size_t c = 0; c < cols_; ++c) {
        for (std::size_t r = 0; r < rows_; ++r) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const
{
    if (cols_ != rhs.rows_) {
        throw InvalidDimension("product of " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                               " and " + std::to_string(rhs.rows_) + "x" + std::to_string(rhs.cols_));
    }
    ComplexMatrix out(rows_, rhs.cols_);
    for (std::size_t j = 0; j < rhs.cols_; ++j) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const cplx b = rhs(k, j);
            for (std::size_t i = 0; i < rows_; ++i) {
                out(i, j) += (*this)(i, k) * b;
            }
        }
    }
    return out;
}

CVector ComplexMatrix::operator*(std::span<const cplx> v) const
{
    if (cols_ != v.size()) {
        throw InvalidDimension("matrix-vector product: " + std::to_string(cols_) + " columns, vector length " +
                               std::to_string(v.size()));
    }
    CVector out(rows_, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < cols_; ++k) {
        for (std::size_t i = 0; i < rows_; ++i) {
            out[i] += (*this)(i, k) * v[k];
        }
    }
    return out;
}

bool ComplexMatrix::all_finite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double norm_sq(std::span<const cplx> v) noexcept
{
    double acc = 0.0;
    for (const cplx& z : v) {
        acc += std::norm(z);
    }
    return acc;
}

cplx dot_transpose(std::span<const cplx> a, std::span<const cplx> b) noexcept
{
    cplx acc{0.0, 0.0};
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

cplx dot_adjoint(std::span<const cplx> a, std::span<const cplx> b) noexcept
{
    cplx acc{0.0, 0.0};
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

double max_abs_identity_error(const ComplexMatrix& a) noexcept
{
    double worst = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        for (std::size_t r = 0; r < a.rows(); ++r) {
            const cplx target = (r == c) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            worst = std::max(worst, std::abs(a(r, c) - target));
        }
    }
    return worst;
}

namespace {

// Gram-Schmidt with one re-orthogonalization pass. The implied R factor has a
// positive real diagonal, which is what makes Q Haar-distributed when the
// input has i.i.d. CN(0,1) entries.
bool orthonormalize_columns(ComplexMatrix& z)
{
    for (std::size_t j = 0; j < z.cols(); ++j) {
        auto cj = z.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                const auto ci = z.col(i);
                const cplx proj = dot_adjoint(ci, cj);
                for (std::size_t r = 0; r < z.rows(); ++r) {
                    cj[r] -= proj * ci[r];
                }
            }
        }
        const double nrm = std::sqrt(norm_sq(cj));
        if (!(nrm > 1e-10)) {
            return false;
        }
        for (cplx& x : cj) {
            x /= nrm;
        }
    }
    return true;
}

}  // namespace

ComplexMatrix random_unitary(std::size_t dim, Rng& rng)
{
    if (dim == 0) {
        throw InvalidDimension("random_unitary: dimension must be >= 1");
    }
    ComplexMatrix z(dim, dim);
    do {
        for (std::size_t c = 0; c < dim; ++c) {
            for (std::size_t r = 0; r < dim; ++r) {
                z(r, c) = complex_gaussian(rng);
            }
        }
    } while (!orthonormalize_columns(z));
    return z;
}

SubspacePair split_spaces(std::size_t m, std::size_t s, Rng& rng)
{
    if (s == 0 || s > m) {
        throw InvalidConfiguration("split_spaces: need 1 <= S <= M, got S=" + std::to_string(s) +
                                   ", M=" + std::to_string(m));
    }
    const ComplexMatrix basis = random_unitary(m, rng);
    return {basis.col_block(0, m - s), basis.col_block(m - s, s)};
}

CVector project_signal(const ComplexMatrix& u, std::span<const cplx> h)
{
    if (u.rows() != h.size()) {
        throw InvalidDimension("project_signal: U has " + std::to_string(u.rows()) + " rows, h has length " +
                               std::to_string(h.size()));
    }
    CVector out(u.cols());
    for (std::size_t c = 0; c < u.cols(); ++c) {
        out[c] = dot_adjoint(u.col(c), h);
    }
    return out;
}

namespace {

double norm1(const ComplexMatrix& a) noexcept
{
    double worst = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            s += std::abs(a(r, c));
        }
        worst = std::max(worst, s);
    }
    return worst;
}

}  // namespace

ComplexMatrix invert_small(const ComplexMatrix& a)
{
    if (a.rows() != a.cols()) {
        throw InvalidDimension("invert_small: matrix is " + std::to_string(a.rows()) + "x" +
                               std::to_string(a.cols()));
    }
    const std::size_t n = a.rows();
    ComplexMatrix work = a;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    const double scale = norm1(a);
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw SingularMatrix("invert_small: zero or non-finite matrix");
    }

    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(work(r, c)) > std::abs(work(pivot, c))) {
                pivot = r;
            }
        }
        if (std::abs(work(pivot, c)) <= scale * 1e-300) {
            throw SingularMatrix("invert_small: zero pivot in column " + std::to_string(c));
        }
        if (pivot != c) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(work(c, k), work(pivot, k));
                std::swap(inv(c, k), inv(pivot, k));
            }
        }
        const cplx d = work(c, c);
        for (std::size_t k = 0; k < n; ++k) {
            work(c, k) /= d;
            inv(c, k) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) {
                continue;
            }
            const cplx f = work(r, c);
            if (f == cplx{0.0, 0.0}) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                work(r, k) -= f * work(c, k);
                inv(r, k) -= f * inv(c, k);
            }
        }
    }

    const double cond = scale * norm1(inv);
    if (!std::isfinite(cond) || cond > kSingularConditionLimit) {
        throw SingularMatrix("invert_small: condition estimate " + std::to_string(cond) + " exceeds 1e12");
    }
    return inv;
}

}  // namespace msond
