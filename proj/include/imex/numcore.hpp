#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace imex {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& values() const noexcept { return data_; }
    std::vector<T>& values() noexcept { return data_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using DenseMatrix = Matrix<double>;
using ComplexMatrix = Matrix<std::complex<double>>;
using Vector = std::vector<double>;

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
Vector multiply(const DenseMatrix& a, const Vector& x);
Vector multiply_transposed(const DenseMatrix& a, const Vector& x);
double max_abs(const DenseMatrix& m);
double frobenius_norm(const DenseMatrix& m);

struct SymEigResult {
    Vector values;        // ascending
    DenseMatrix vectors;  // column j pairs with values[j]; empty unless requested
};

// Householder tridiagonalization followed by implicit QL with Wilkinson shifts.
SymEigResult sym_eig(const DenseMatrix& m, bool want_vectors = false, double symmetry_tol = 1e-12);

// Hessenberg reduction followed by single-shift complex QR.
std::vector<std::complex<double>> complex_eig(const ComplexMatrix& m, bool balance = true);

// LU factorization with partial pivoting, reusable across right-hand sides.
class LuFactor {
public:
    explicit LuFactor(const DenseMatrix& m, double pivot_tol = 1e-14);
    Vector solve(const Vector& rhs) const;
    std::size_t size() const noexcept { return lu_.rows(); }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

Vector linear_solve(const DenseMatrix& m, const Vector& rhs);

// Forward substitution for a lower-triangular matrix.
Vector forward_substitution(const DenseMatrix& lower, const Vector& rhs);
DenseMatrix lower_triangular_inverse(const DenseMatrix& lower);

// Tridiagonal system without pivoting; sub[i] couples rows i+1 and i.
class TridiagonalFactor {
public:
    TridiagonalFactor(Vector sub, Vector diag, Vector super, double pivot_tol = 1e-14);
    Vector solve(const Vector& rhs) const;

private:
    Vector sub_, diag_, super_;
};

struct PowerIterationResult {
    double value = 0.0;  // dominant eigenvalue estimate of the iterated operator
    int iterations = 0;
    bool converged = false;
};

// Spectral norm sqrt(lambda_max(M^T M)) by power iteration from a seeded random start.
PowerIterationResult spectral_norm(const DenseMatrix& m, double tol = 1e-10, int max_iter = 10000,
                                   std::uint64_t seed = 20240531);

}  // namespace imex
