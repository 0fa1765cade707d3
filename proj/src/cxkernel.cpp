#include "mimocap/cxkernel.hpp"

#include "mimocap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mimocap {

namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr int kMaxJacobiSweeps = 100;

std::string shape_of(const ComplexMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_finite(const ComplexMatrix& m, const char* op) {
    for (const Complex& z : m.entries()) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw DomainError(op, "non-finite matrix entry");
        }
    }
}

double max_abs_entry(const ComplexMatrix& m) {
    double largest = 0.0;
    for (const Complex& z : m.entries()) {
        largest = std::max(largest, std::abs(z));
    }
    return largest;
}

void require_hermitian(const ComplexMatrix& m, const char* op) {
    if (!m.is_square()) {
        throw ShapeError(op, "expected a square matrix, got " + shape_of(m));
    }
    require_finite(m, op);
    const double scale = max_abs_entry(m);
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (std::abs(m(i, j) - std::conj(m(j, i))) > kHermitianTolerance * scale) {
                throw SymmetryError(op, "matrix is not Hermitian within tolerance");
            }
        }
    }
}

// Lower Cholesky factor with real positive diagonal. Pivots below a small
// multiple of machine precision relative to the largest diagonal count as
// non-positive.
ComplexMatrix cholesky(const ComplexMatrix& m, const char* op) {
    require_hermitian(m, op);
    const std::size_t n = m.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_diag = std::max(max_diag, m(i, i).real());
    }
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) * max_diag;

    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = m(j, j).real();
        for (std::size_t k = 0; k < j; ++k) {
            pivot -= std::norm(l(j, k));
        }
        if (!(pivot > floor)) {
            throw DefinitenessError(op, "matrix is not positive definite (pivot " + std::to_string(j) + ")");
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex acc = m(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                acc -= l(i, k) * std::conj(l(j, k));
            }
            l(i, j) = acc / ljj;
        }
    }
    return l;
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("ComplexMatrix", "zero extent " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    entries_.assign(rows * cols, Complex{});
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("ComplexMatrix", "zero extent " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (entries_.size() != rows * cols) {
        throw ShapeError("ComplexMatrix", "expected " + std::to_string(rows * cols) + " entries, got " +
                                              std::to_string(entries_.size()));
    }
    require_finite(*this, "ComplexMatrix");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
    if (rows_ == 0 || cols_ == 0) {
        throw ShapeError("ComplexMatrix", "empty initializer");
    }
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw ShapeError("ComplexMatrix", "ragged initializer rows");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
    require_finite(*this, "ComplexMatrix");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::column(std::size_t c) const {
    ComplexMatrix out(rows_, 1);
    for (std::size_t r = 0; r < rows_; ++r) {
        out(r, 0) = (*this)(r, c);
    }
    return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw ShapeError("add", "operands " + shape_of(*this) + " and " + shape_of(other));
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] += other.entries_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw ShapeError("subtract", "operands " + shape_of(*this) + " and " + shape_of(other));
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] -= other.entries_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
    for (Complex& z : entries_) {
        z *= scale;
    }
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex scale, ComplexMatrix a) { return a *= scale; }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul", "cannot multiply " + shape_of(a) + " by " + shape_of(b));
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(c, r) = std::conj(a(r, c));
        }
    }
    return out;
}

ComplexMatrix hermitian_solve(const ComplexMatrix& m, const ComplexMatrix& rhs) {
    constexpr const char* op = "hermitian_solve";
    if (!m.is_square()) {
        throw ShapeError(op, "expected a square matrix, got " + shape_of(m));
    }
    if (rhs.rows() != m.rows()) {
        throw ShapeError(op, "system " + shape_of(m) + " with right-hand side " + shape_of(rhs));
    }
    require_finite(rhs, op);
    const ComplexMatrix l = cholesky(m, op);
    const std::size_t n = m.rows();

    ComplexMatrix x = rhs;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        // L y = b
        for (std::size_t i = 0; i < n; ++i) {
            Complex acc = x(i, c);
            for (std::size_t k = 0; k < i; ++k) {
                acc -= l(i, k) * x(k, c);
            }
            x(i, c) = acc / l(i, i);
        }
        // Lᴴ x = y
        for (std::size_t ii = n; ii-- > 0;) {
            Complex acc = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) {
                acc -= std::conj(l(k, ii)) * x(k, c);
            }
            x(ii, c) = acc / l(ii, ii);
        }
    }
    return x;
}

double logdet_hpd(const ComplexMatrix& m) {
    const ComplexMatrix l = cholesky(m, "logdet_hpd");
    double sum = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) {
        sum += std::log2(l(i, i).real());
    }
    return 2.0 * sum;
}

double frobenius_sq(const ComplexMatrix& m) {
    double sum = 0.0;
    for (const Complex& z : m.entries()) {
        sum += std::norm(z);
    }
    return sum;
}

double trace_real(const ComplexMatrix& m) {
    if (!m.is_square()) {
        throw ShapeError("trace", "expected a square matrix, got " + shape_of(m));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        sum += m(i, i).real();
    }
    return sum;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
    constexpr const char* op = "hermitian_eigen";
    require_hermitian(m, op);
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double total = frobenius_sq(a);
    const double stop = total * 1e-30;

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::norm(a(p, q));
            }
        }
        if (off <= stop) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag == 0.0) {
                    continue;
                }
                // Unitary U = diag(1, e^{-i phi}) * real rotation; zeroes a(p, q).
                const Complex phase = std::conj(a(p, q)) / mag;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex upp = c;
                const Complex upq = s;
                const Complex uqp = -s * phase;
                const Complex uqq = c * phase;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * upp + akq * uqp;
                    a(k, q) = akp * upq + akq * uqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
                    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * upp + vkq * uqp;
                    v(k, q) = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    HermitianEigen result{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        result.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) {
            result.vectors(r, k) = v(r, order[k]);
        }
    }
    return result;
}

std::vector<double> squared_singular_values(const ComplexMatrix& g) {
    require_finite(g, "squared_singular_values");
    const ComplexMatrix gram = g.rows() >= g.cols() ? matmul(adjoint(g), g) : matmul(g, adjoint(g));
    std::vector<double> values = hermitian_eigen(gram).values;
    for (double& x : values) {
        x = std::max(x, 0.0);
    }
    return values;
}

} // namespace mimocap
