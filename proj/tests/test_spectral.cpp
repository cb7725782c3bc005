#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "sigmanet/rng.hpp"
#include "sigmanet/spectral.hpp"

using namespace sigmanet;

namespace {

CMatrix random_complex(int n, Rng& rng) {
    CMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = Complex(rng.uniform_real(-1, 1), rng.uniform_real(-1, 1));
    return g;
}

CMatrix random_hermitian(int n, Rng& rng) {
    const CMatrix g = random_complex(n, rng);
    return 0.5 * (g + g.adjoint());
}

CMatrix random_hermitian_psd(int n, Rng& rng) {
    const CMatrix g = random_complex(n, rng);
    return g * g.adjoint();
}

}  // namespace

TEST_CASE("hermitian_eig: worked 2x2 example") {
    CMatrix m(2, 2);
    m(0, 0) = Complex(1, 0);
    m(0, 1) = Complex(0, -1);
    m(1, 0) = Complex(0, 1);
    m(1, 1) = Complex(1, 0);
    const EigenDecomposition d = hermitian_eig(m);
    CHECK(d.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
    // columns really are eigenvectors
    const double resid =
        (m * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal())
            .cwiseAbs()
            .maxCoeff();
    CHECK(resid < 1e-12);
}

TEST_CASE("hermitian_eig: residual, unitarity, ordering on random inputs") {
    Rng rng(201);
    for (int n : {2, 3, 5, 12, 30, 50, 200}) {
        const CMatrix m = random_hermitian(n, rng);
        const EigenDecomposition d = hermitian_eig(m);
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        const double resid =
            (m * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal())
                .cwiseAbs()
                .maxCoeff();
        CHECK(resid <= 1e-10 * scale * n);
        const double ortho =
            (d.eigenvectors.adjoint() * d.eigenvectors - CMatrix::Identity(n, n))
                .cwiseAbs()
                .maxCoeff();
        CHECK(ortho <= 1e-10 * n);
        for (int i = 1; i < n; ++i)
            CHECK(d.eigenvalues(i) >= d.eigenvalues(i - 1));
        // trace equals eigenvalue sum
        CHECK(d.eigenvalues.sum() ==
              doctest::Approx(m.trace().real()).epsilon(1e-9));
    }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 1) = Complex(1.0, 0.0);
    CHECK_THROWS_AS(hermitian_eig(bad), ValidationError);
    CMatrix rect = CMatrix::Zero(2, 3);
    CHECK_THROWS_AS(hermitian_eig(rect), ValidationError);
}

TEST_CASE("chebyshev_T: trigonometric identity and explicit polynomials") {
    for (int k = 0; k <= 6; ++k)
        for (double theta : {0.0, 0.3, 1.1, 1.5707963267948966, 2.8, 3.14159265358979})
            CHECK(chebyshev_T(k, std::cos(theta)) ==
                  doctest::Approx(std::cos(k * theta)).epsilon(1e-12));

    Rng rng(202);
    for (int t = 0; t < 20; ++t) {
        const double x = rng.uniform_real(-1, 1);
        CHECK(chebyshev_T(0, x) == 1.0);
        CHECK(chebyshev_T(1, x) == x);
        CHECK(chebyshev_T(2, x) == doctest::Approx(2 * x * x - 1).epsilon(1e-14));
        CHECK(chebyshev_T(3, x) == doctest::Approx(4 * x * x * x - 3 * x).epsilon(1e-13));
    }
    for (int k = 0; k <= 8; ++k) {
        CHECK(chebyshev_T(k, 1.0) == doctest::Approx(1.0));
        CHECK(chebyshev_T(k, -1.0) == doctest::Approx(k % 2 == 0 ? 1.0 : -1.0));
    }
    CHECK_THROWS_AS(chebyshev_T(-1, 0.0), ValidationError);
    CHECK_THROWS_AS(chebyshev_T(2, 1.5), ValidationError);
    CHECK_THROWS_AS(chebyshev_T(2, -1.0001), ValidationError);
}

TEST_CASE("convolution_apply: worked example and K=1 equivalence") {
    CMatrix m(2, 2);
    m(0, 0) = Complex(1, 0);
    m(0, 1) = Complex(0, -1);
    m(1, 0) = Complex(0, 1);
    m(1, 1) = Complex(1, 0);
    CVector x(2);
    x << Complex(1, 0), Complex(0, 0);
    const CVector y = convolution_apply(m, x, 1.0);
    // 2x - Mx = (2,0) - (1,i) = (1,-i)
    CHECK(std::abs(y(0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(y(1) - Complex(0, -1)) < 1e-15);

    // tied coefficients (theta0, -theta0) through the generic path
    Rng rng(203);
    for (int t = 0; t < 10; ++t) {
        const int n = 4;
        const CMatrix h = random_hermitian(n, rng);
        CVector v(n);
        for (int i = 0; i < n; ++i)
            v(i) = Complex(rng.uniform_real(-1, 1), rng.uniform_real(-1, 1));
        const double theta0 = rng.uniform_real(-2, 2);
        const CVector lhs = convolution_apply(h, v, theta0);
        const CVector rhs =
            convolution_apply_full(h, v, {{theta0, -theta0}}, 2.0);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("filter recursion matches spectral-domain evaluation") {
    Rng rng(204);
    for (int t = 0; t < 50; ++t) {
        const int n = 10;
        const CMatrix m = random_hermitian_psd(n, rng);
        const EigenDecomposition d = hermitian_eig(m);
        const double lambda_max = std::max(d.eigenvalues.maxCoeff(), 1e-6);

        const int order = 1 + static_cast<int>(rng.index(4));  // K in [1,4]
        ChebCoefficients coeffs;
        for (int k = 0; k <= order; ++k)
            coeffs.theta.push_back(rng.uniform_real(-1, 1));

        CVector x(n);
        for (int i = 0; i < n; ++i)
            x(i) = Complex(rng.uniform_real(-1, 1), rng.uniform_real(-1, 1));

        // g(lambda) = sum_k theta_k T_k(2 lambda / lambda_max - 1) applied in
        // the eigenbasis — an independent route to the same filter
        Vector g(n);
        for (int i = 0; i < n; ++i) {
            double lam = 2.0 * d.eigenvalues(i) / lambda_max - 1.0;
            lam = std::min(1.0, std::max(-1.0, lam));
            double acc = 0.0;
            for (int k = 0; k <= order; ++k)
                acc += coeffs.theta[k] * chebyshev_T(k, lam);
            g(i) = acc;
        }
        const CVector spectral = d.eigenvectors *
                                 (g.cast<Complex>().asDiagonal() *
                                  (d.eigenvectors.adjoint() * x));
        const CVector recursive = convolution_apply_full(m, x, coeffs, lambda_max);
        CHECK((spectral - recursive).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("filter input validation") {
    CMatrix m = CMatrix::Identity(3, 3);
    CVector x = CVector::Ones(2);
    CHECK_THROWS_AS(convolution_apply(m, x, 1.0), ValidationError);
    CVector x3 = CVector::Ones(3);
    CHECK_THROWS_AS(convolution_apply_full(m, x3, {{}}, 2.0), ValidationError);
    CHECK_THROWS_AS(convolution_apply_full(m, x3, {{1.0}}, 0.0), ValidationError);
    CHECK_THROWS_AS(convolution_apply_full(m, x3, {{1.0}}, -2.0), ValidationError);
    CHECK_NOTHROW(convolution_apply_full(m, x3, {{1.0}}, 2.0));
}
