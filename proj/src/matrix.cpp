#include "dosetc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dosetc {

namespace {

void require_finite(const Matrix& m, const char* what) {
    if (!m.all_finite()) {
        throw numeric_error(std::string(what) + ": non-finite entries");
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> entries)
    : rows_(rows), cols_(cols), data_(entries) {
    if (data_.size() != rows * cols) {
        throw dimension_error("Matrix: initializer size mismatch");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

Matrix Matrix::diag(const std::vector<double>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::column(const std::vector<double>& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

Matrix Matrix::row(const std::vector<double>& v) {
    Matrix m(1, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::operator+(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw dimension_error("Matrix::operator+: shape mismatch");
    }
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += other.data_[i];
    return out;
}

Matrix Matrix::operator-(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw dimension_error("Matrix::operator-: shape mismatch");
    }
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= other.data_[i];
    return out;
}

Matrix Matrix::operator*(const Matrix& other) const {
    if (cols_ != other.rows_) {
        throw dimension_error("Matrix::operator*: inner dimension mismatch");
    }
    Matrix out(rows_, other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(r, k);
            if (a == 0.0) continue;
            for (std::size_t c = 0; c < other.cols_; ++c) {
                out(r, c) += a * other(k, c);
            }
        }
    }
    return out;
}

Matrix Matrix::operator*(double s) const {
    Matrix out = *this;
    for (double& x : out.data_) x *= s;
    return out;
}

Matrix Matrix::operator-() const { return (*this) * -1.0; }

Matrix& Matrix::operator+=(const Matrix& other) {
    *this = *this + other;
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    *this = *this - other;
    return *this;
}

std::vector<double> Matrix::apply(const std::vector<double>& v) const {
    if (v.size() != cols_) {
        throw dimension_error("Matrix::apply: vector length mismatch");
    }
    std::vector<double> out(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
    return out;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& blk) {
    if (r0 + blk.rows_ > rows_ || c0 + blk.cols_ > cols_) {
        throw dimension_error("Matrix::set_block: block out of range");
    }
    for (std::size_t r = 0; r < blk.rows_; ++r)
        for (std::size_t c = 0; c < blk.cols_; ++c) (*this)(r0 + r, c0 + c) = blk(r, c);
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const {
    if (r0 + nrows > rows_ || c0 + ncols > cols_) {
        throw dimension_error("Matrix::block: block out of range");
    }
    Matrix out(nrows, ncols);
    for (std::size_t r = 0; r < nrows; ++r)
        for (std::size_t c = 0; c < ncols; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
    return out;
}

Matrix operator*(double s, const Matrix& m) { return m * s; }

SymEig sym_eig(const Matrix& m) {
    require_finite(m, "sym_eig");
    if (!m.is_square()) {
        throw dimension_error("sym_eig: matrix not square");
    }
    const std::size_t n = m.rows();
    const Matrix defect = m - m.transpose();
    if (defect.max_abs() > 1e-9 * (1.0 + m.max_abs())) {
        throw symmetry_error("sym_eig: matrix not symmetric within tolerance");
    }
    Matrix a = (m + m.transpose()) * 0.5;
    Matrix v = Matrix::identity(n);

    // Cyclic Jacobi sweeps; dimensions are tiny so convergence is fast.
    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-15 * (1.0 + a.max_abs())) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-18 * (1.0 + a.max_abs())) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymEig out;
    out.eigenvalues.resize(n);
    out.basis = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.basis(i, j) = v(i, order[j]);
    }
    return out;
}

double lambda_min(const Matrix& symmetric) { return sym_eig(symmetric).eigenvalues.front(); }
double lambda_max(const Matrix& symmetric) { return sym_eig(symmetric).eigenvalues.back(); }

double lambda_max_symmetric_part(const Matrix& m) {
    if (!m.is_square()) {
        throw dimension_error("lambda_max_symmetric_part: matrix not square");
    }
    return lambda_max((m + m.transpose()) * 0.5);
}

bool is_positive_definite(const Matrix& m, double tol) { return lambda_min(m) > tol; }

double spectral_norm(const Matrix& m) {
    if (m.empty()) {
        throw dimension_error("spectral_norm: empty matrix");
    }
    require_finite(m, "spectral_norm");
    const Matrix gram = m.transpose() * m;
    const double lmax = lambda_max(gram);
    return std::sqrt(std::max(0.0, lmax));
}

std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b) {
    if (!a.is_square() || a.rows() != b.size()) {
        throw dimension_error("solve_linear: shape mismatch");
    }
    require_finite(a, "solve_linear");
    const std::size_t n = a.rows();
    Matrix lu = a;
    std::vector<double> x = b;
    std::vector<std::size_t> piv(n);
    std::iota(piv.begin(), piv.end(), 0);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(lu(r, k)) > std::abs(lu(pr, k))) pr = r;
        if (std::abs(lu(pr, k)) < 1e-14 * (1.0 + a.max_abs())) {
            throw rank_error("solve_linear: singular matrix");
        }
        if (pr != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(lu(k, c), lu(pr, c));
            std::swap(x[k], x[pr]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = lu(r, k) / lu(k, k);
            lu(r, k) = f;
            for (std::size_t c = k + 1; c < n; ++c) lu(r, c) -= f * lu(k, c);
            x[r] -= f * x[k];
        }
    }
    for (std::size_t ri = n; ri-- > 0;) {
        double s = x[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= lu(ri, c) * x[c];
        x[ri] = s / lu(ri, ri);
    }
    return x;
}

Matrix inverse(const Matrix& a) {
    if (!a.is_square()) {
        throw dimension_error("inverse: matrix not square");
    }
    const std::size_t n = a.rows();
    Matrix out(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        const std::vector<double> col = solve_linear(a, e);
        for (std::size_t r = 0; r < n; ++r) out(r, c) = col[r];
    }
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const double f = a(ar, ac);
            if (f == 0.0) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = f * b(br, bc);
        }
    return out;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
    if (!a.is_square() || !q.is_square() || a.rows() != q.rows()) {
        throw dimension_error("solve_lyapunov: shape mismatch");
    }
    require_finite(a, "solve_lyapunov");
    const Matrix qdefect = q - q.transpose();
    if (qdefect.max_abs() > 1e-9 * (1.0 + q.max_abs())) {
        throw symmetry_error("solve_lyapunov: Q not symmetric");
    }
    const std::size_t n = a.rows();
    const Matrix at = a.transpose();
    // vec(A^T P) + vec(P A) = (I (x) A^T + A^T (x) I) vec(P), column-stacked.
    const Matrix coeff = kron(Matrix::identity(n), at) + kron(at, Matrix::identity(n));

    std::vector<double> rhs(n * n, 0.0);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) rhs[c * n + r] = -q(r, c);

    std::vector<double> pv;
    try {
        pv = solve_linear(coeff, rhs);
    } catch (const rank_error&) {
        throw no_solution_error("solve_lyapunov: A has eigenvalues summing to zero (not Hurwitz)");
    }

    Matrix p(n, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) p(r, c) = pv[c * n + r];
    p = (p + p.transpose()) * 0.5;

    const Matrix residual = at * p + p * a + q;
    const double scale = 1.0 + q.max_abs() + p.max_abs() * (1.0 + a.max_abs());
    if (residual.max_abs() > 1e-8 * scale) {
        throw no_solution_error("solve_lyapunov: residual too large");
    }
    // Hurwitz screen: with Q > 0 a valid solution must be positive definite.
    if (lambda_min(q) > 0.0 && lambda_min(p) <= 0.0) {
        throw no_solution_error("solve_lyapunov: A not Hurwitz (P not positive definite)");
    }
    return p;
}

Matrix right_pseudo_inverse(const Matrix& c) {
    if (c.rows() > c.cols()) {
        throw dimension_error("right_pseudo_inverse: requires rows <= cols");
    }
    require_finite(c, "right_pseudo_inverse");
    if (numerical_rank(c, 1e-10) < c.rows()) {
        throw rank_error("right_pseudo_inverse: C not full row rank");
    }
    return c.transpose() * inverse(c * c.transpose());
}

std::size_t numerical_rank(const Matrix& m, double rel_tol) {
    if (m.empty()) return 0;
    // Singular values via the symmetric embedding [[0, M], [M^T, 0]], whose
    // eigenvalues are +/- sigma_i. Unlike the Gram route, small singular
    // values come out with absolute (not square-root) accuracy, which the
    // 1e-9 relative threshold needs.
    const std::size_t r = m.rows();
    const std::size_t c = m.cols();
    Matrix embed = Matrix::zeros(r + c, r + c);
    embed.set_block(0, r, m);
    embed.set_block(r, 0, m.transpose());
    const SymEig eig = sym_eig(embed);
    const double smax = std::max(std::abs(eig.eigenvalues.front()), eig.eigenvalues.back());
    if (smax == 0.0) return 0;
    std::size_t rank = 0;
    for (double w : eig.eigenvalues) {
        if (w > rel_tol * smax) ++rank;
    }
    return rank;
}

double vector_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace dosetc
