#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "dosetc/matrix.hpp"
#include "dosetc/rng.hpp"

using namespace dosetc;

namespace {

Matrix random_matrix(CounterRng& rng, std::size_t r, std::size_t c, double lo = -1.0,
                     double hi = 1.0) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

Matrix random_symmetric(CounterRng& rng, std::size_t n) {
    Matrix m = random_matrix(rng, n, n);
    return (m + m.transpose()) * 0.5;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier:
// p(x) = x^n + c_1 x^{n-1} + ... + c_n.
std::vector<double> char_poly(const Matrix& a) {
    const std::size_t n = a.rows();
    std::vector<double> c(n + 1, 0.0);
    c[0] = 1.0;
    Matrix m = Matrix::zeros(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i) m(i, i) += c[k - 1];
        m = a * m;
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += m(i, i);
        c[k] = -tr / static_cast<double>(k);
    }
    return c;
}

// Durand-Kerner simultaneous root iteration; independent of the Jacobi path.
std::vector<double> real_poly_roots(const std::vector<double>& coeffs) {
    const std::size_t n = coeffs.size() - 1;
    std::vector<std::complex<double>> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = std::pow(std::complex<double>(0.4, 0.9), static_cast<double>(i + 1));
    }
    const auto eval = [&coeffs](std::complex<double> x) {
        std::complex<double> p = coeffs[0];
        for (std::size_t i = 1; i < coeffs.size(); ++i) p = p * x + coeffs[i];
        return p;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> denom = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) denom *= z[i] - z[j];
            }
            const std::complex<double> d = eval(z[i]) / denom;
            z[i] -= d;
            step = std::max(step, std::abs(d));
        }
        if (step < 1e-14) break;
    }
    std::vector<double> roots;
    for (const auto& r : z) roots.push_back(r.real());
    std::sort(roots.begin(), roots.end());
    return roots;
}

// Leading-principal-minor determinants via fraction-free-ish LU on a copy.
double leading_minor_det(const Matrix& m, std::size_t k) {
    Matrix a = m.block(0, 0, k, k);
    double det = 1.0;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
        }
        if (piv != col) {
            for (std::size_t c = 0; c < k; ++c) std::swap(a(col, c), a(piv, c));
            det = -det;
        }
        if (a(col, col) == 0.0) return 0.0;
        det *= a(col, col);
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < k; ++c) a(r, c) -= f * a(col, c);
        }
    }
    return det;
}

}  // namespace

TEST_CASE("symmetric eigendecomposition on fixed inputs") {
    const SymEig id = sym_eig(Matrix::identity(2));
    CHECK(id.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(id.eigenvalues[1] == doctest::Approx(1.0));

    const SymEig d = sym_eig(Matrix::diag({3.0, -1.0}));
    CHECK(d.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(d.eigenvalues[1] == doctest::Approx(3.0));
}

TEST_CASE("eigenvalues of a random symmetric 5x5 match polynomial roots") {
    CounterRng rng(7, 0);
    const Matrix m = random_symmetric(rng, 5);
    const SymEig e = sym_eig(m);
    const std::vector<double> roots = real_poly_roots(char_poly(m));
    REQUIRE(roots.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(e.eigenvalues[i] == doctest::Approx(roots[i]).epsilon(1e-8));
    }
}

TEST_CASE("eigendecomposition reconstructs the input") {
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.below(7));
        const Matrix m = random_symmetric(rng, n);
        const SymEig e = sym_eig(m);
        Matrix rebuilt = e.basis * Matrix::diag(e.eigenvalues) * e.basis.transpose();
        CHECK((m - rebuilt).max_abs() <= 1e-8 * (1.0 + m.max_abs()));
        const Matrix gram = e.basis.transpose() * e.basis;
        CHECK((gram - Matrix::identity(n)).max_abs() <= 1e-10);
        for (std::size_t i = 1; i < n; ++i) CHECK(e.eigenvalues[i - 1] <= e.eigenvalues[i]);
    }
}

TEST_CASE("eigendecomposition rejects bad shapes") {
    CHECK_THROWS_AS(sym_eig(Matrix::zeros(2, 3)), dimension_error);
    Matrix skew(2, 2, {0.0, 1.0, -1.0, 0.0});
    CHECK_THROWS_AS(sym_eig(skew), symmetry_error);
}

TEST_CASE("positive definiteness on fixed inputs") {
    CHECK(is_positive_definite(Matrix::identity(3), 0.0));
    CHECK_FALSE(is_positive_definite(Matrix::diag({1.0, -1.0}), 0.0));
    CHECK_FALSE(is_positive_definite(Matrix::diag({1e-12, 1.0}), 1e-9));
}

TEST_CASE("positive definiteness agrees with leading principal minors") {
    CounterRng rng(13, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.below(5));
        const Matrix m = random_symmetric(rng, n);
        bool minors_positive = true;
        for (std::size_t k = 1; k <= n; ++k) {
            if (leading_minor_det(m, k) <= 0.0) minors_positive = false;
        }
        // Skip the knife's edge where the two tests may disagree on roundoff.
        if (std::fabs(lambda_min(m)) < 1e-10) continue;
        CHECK(is_positive_definite(m, 0.0) == minors_positive);
    }
}

TEST_CASE("spectral norm on fixed inputs") {
    CHECK(spectral_norm(Matrix::identity(4)) == doctest::Approx(1.0));
    CHECK(spectral_norm(Matrix::row({3.0, 4.0})) == doctest::Approx(5.0));
}

TEST_CASE("spectral norm matches power iteration") {
    CounterRng rng(17, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix m = random_matrix(rng, 4, 3);
        const Matrix g = m.transpose() * m;
        std::vector<double> v(3);
        for (double& x : v) x = rng.uniform(0.1, 1.0);
        double lam = 0.0;
        for (int it = 0; it < 3000; ++it) {
            std::vector<double> nv = g.apply(v);
            lam = vector_norm(nv);
            for (double& x : nv) x /= lam;
            v = nv;
        }
        CHECK(spectral_norm(m) == doctest::Approx(std::sqrt(lam)).epsilon(1e-8));
    }
}

TEST_CASE("Lyapunov solves on fixed inputs") {
    const Matrix p1 = solve_lyapunov(-1.0 * Matrix::identity(2), 2.0 * Matrix::identity(2));
    CHECK((p1 - Matrix::identity(2)).max_abs() <= 1e-10);

    const Matrix p2 = solve_lyapunov(Matrix::diag({-1.0, -2.0}), Matrix::diag({2.0, 4.0}));
    CHECK((p2 - Matrix::identity(2)).max_abs() <= 1e-10);
}

TEST_CASE("Lyapunov residual on random stable systems") {
    CounterRng rng(19, 0);
    for (int trial = 0; trial < 15; ++trial) {
        Matrix a = random_matrix(rng, 4, 4);
        for (std::size_t i = 0; i < 4; ++i) a(i, i) -= 4.0;  // diagonally dominant, Hurwitz
        const Matrix q = Matrix::identity(4);
        const Matrix p = solve_lyapunov(a, q);
        const Matrix residual = a.transpose() * p + p * a + q;
        CHECK(residual.max_abs() <= 1e-8 * (1.0 + p.max_abs()));
        CHECK((p - p.transpose()).max_abs() <= 1e-12);
        CHECK(is_positive_definite(p, 0.0));
    }
}

TEST_CASE("Lyapunov rejects unstable dynamics") {
    CHECK_THROWS_AS(solve_lyapunov(Matrix::identity(2), Matrix::identity(2)), no_solution_error);
    Matrix shear(2, 2, {0.0, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(solve_lyapunov(shear, Matrix::identity(2)), no_solution_error);
}

TEST_CASE("right pseudo inverse on fixed inputs") {
    const Matrix a = right_pseudo_inverse(Matrix::row({1.0, 0.0}));
    CHECK(a(0, 0) == doctest::Approx(1.0));
    CHECK(a(1, 0) == doctest::Approx(0.0));

    const Matrix b = right_pseudo_inverse(Matrix::row({2.0, 0.0}));
    CHECK(b(0, 0) == doctest::Approx(0.5));

    const Matrix c = right_pseudo_inverse(Matrix::identity(3));
    CHECK((c - Matrix::identity(3)).max_abs() <= 1e-12);
}

TEST_CASE("right pseudo inverse is a right inverse") {
    CounterRng rng(23, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix c = random_matrix(rng, 2, 4);
        const Matrix pinv = right_pseudo_inverse(c);
        CHECK((c * pinv - Matrix::identity(2)).max_abs() <= 1e-8);
    }
    Matrix deficient(2, 3, {1.0, 2.0, 3.0, 2.0, 4.0, 6.0});
    CHECK_THROWS_AS(right_pseudo_inverse(deficient), rank_error);
}

TEST_CASE("linear solve and inverse") {
    Matrix a(2, 2, {2.0, 1.0, 1.0, 3.0});
    const std::vector<double> x = solve_linear(a, {5.0, 10.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(3.0));
    CHECK((a * inverse(a) - Matrix::identity(2)).max_abs() <= 1e-12);
    Matrix singular(2, 2, {1.0, 2.0, 2.0, 4.0});
    CHECK_THROWS_AS(inverse(singular), rank_error);
}

TEST_CASE("Kronecker product shape and a hand case") {
    Matrix a(2, 2, {1.0, 2.0, 3.0, 4.0});
    const Matrix k = kron(a, Matrix::identity(2));
    REQUIRE(k.rows() == 4);
    CHECK(k(0, 0) == 1.0);
    CHECK(k(0, 2) == 2.0);
    CHECK(k(1, 3) == 2.0);
    CHECK(k(2, 0) == 3.0);
    CHECK(k(3, 3) == 4.0);
}
