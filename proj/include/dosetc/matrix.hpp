#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dosetc {

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct symmetry_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct rank_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct no_solution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense real matrix, row-major. Sized for desk-scale control problems
/// (n <= ~12); every public operation rejects NaN/Inf entries.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> entries);

    static Matrix identity(std::size_t n);
    static Matrix zeros(std::size_t rows, std::size_t cols);
    static Matrix diag(const std::vector<double>& d);
    static Matrix column(const std::vector<double>& v);
    static Matrix row(const std::vector<double>& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transpose() const;
    Matrix operator+(const Matrix& other) const;
    Matrix operator-(const Matrix& other) const;
    Matrix operator*(const Matrix& other) const;
    Matrix operator*(double s) const;
    Matrix operator-() const;
    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);

    std::vector<double> apply(const std::vector<double>& v) const;

    /// Largest absolute entry; 0 for the empty matrix.
    double max_abs() const;
    double frobenius_norm() const;
    bool all_finite() const;
    bool is_square() const { return rows_ == cols_; }

    /// Copies `block` into this matrix with upper-left corner (r0, c0).
    void set_block(std::size_t r0, std::size_t c0, const Matrix& block);
    Matrix block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(double s, const Matrix& m);

struct SymEig {
    std::vector<double> eigenvalues;  // ascending
    Matrix basis;                     // orthonormal columns, M = V diag(w) V^T
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// Inputs within the relative symmetry tolerance 1e-9 are symmetrized as
/// (M + M^T)/2 before decomposition; anything worse is rejected.
SymEig sym_eig(const Matrix& m);

double lambda_min(const Matrix& symmetric);
double lambda_max(const Matrix& symmetric);

/// Largest eigenvalue of the symmetric part (M + M^T)/2. Upper-bounds the
/// quadratic form x^T M x / x^T x for general square M.
double lambda_max_symmetric_part(const Matrix& m);

bool is_positive_definite(const Matrix& m, double tol);

/// Largest singular value, computed as sqrt(lambda_max(M^T M)).
double spectral_norm(const Matrix& m);

/// Solves the linear system A x = b by LU with partial pivoting.
std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b);
Matrix inverse(const Matrix& a);

Matrix kron(const Matrix& a, const Matrix& b);

/// Solves A^T P + P A = -Q for symmetric P via the Kronecker-vectorized
/// linear system. Rejects non-Hurwitz A through the residual/PD check
/// rather than an eigenvalue test.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

/// C^T (C C^T)^{-1} for full-row-rank C with rows <= cols.
Matrix right_pseudo_inverse(const Matrix& c);

/// Numerical rank by singular-value threshold rel_tol * sigma_max.
std::size_t numerical_rank(const Matrix& m, double rel_tol = 1e-9);

double vector_norm(const std::vector<double>& v);

}  // namespace dosetc
