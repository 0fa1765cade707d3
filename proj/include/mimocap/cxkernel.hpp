#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mimocap {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major. Entry (r, c) lives at index r * cols + c;
/// every CSV dump and digest in the project relies on that order.
class ComplexMatrix {
public:
    /// Zero-filled rows x cols matrix. Throws ShapeError if either extent is 0.
    ComplexMatrix(std::size_t rows, std::size_t cols);

    /// Takes ownership of row-major entries. Throws ShapeError on a size mismatch
    /// and DomainError on any non-finite entry.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    /// Nested-list construction, one initializer list per row.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const Complex> entries() const noexcept { return entries_; }

    /// Column c as a rows x 1 matrix.
    ComplexMatrix column(std::size_t c) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scale, ComplexMatrix a);

/// Standard product; ShapeError names both operand shapes on mismatch.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// Conjugate transpose.
ComplexMatrix adjoint(const ComplexMatrix& a);

/// Solves m * X = rhs for Hermitian positive-definite m via Cholesky.
///
/// m must be square (ShapeError), Hermitian to 1e-10 relative to its largest
/// entry (SymmetryError) and positive definite (DefinitenessError, raised when
/// a Cholesky pivot is not safely positive).
ComplexMatrix hermitian_solve(const ComplexMatrix& m, const ComplexMatrix& rhs);

/// Eigenvalues of Gᴴ G (the nonzero part matches G Gᴴ), clamped to >= 0,
/// sorted descending, length min(rows, cols).
std::vector<double> squared_singular_values(const ComplexMatrix& g);

/// log2 det(m) for Hermitian positive-definite m, from the Cholesky pivots.
double logdet_hpd(const ComplexMatrix& m);

/// Sum of |entry|^2.
double frobenius_sq(const ComplexMatrix& m);

/// Real part of the trace. Throws ShapeError for non-square input.
double trace_real(const ComplexMatrix& m);

struct HermitianEigen {
    std::vector<double> values; ///< descending
    ComplexMatrix vectors;      ///< column k is the unit eigenvector of values[k]
};

/// Cyclic complex Jacobi eigendecomposition of a Hermitian matrix. The sweep
/// order is fixed, so identical input always yields identical output.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

} // namespace mimocap
