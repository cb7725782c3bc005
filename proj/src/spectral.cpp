#include "sigmanet/spectral.hpp"

#include <cmath>

namespace sigmanet {

EigenDecomposition hermitian_eig(const CMatrix& m) {
    if (m.rows() != m.cols())
        throw ValidationError("hermitian_eig: non-square input");
    double asym = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i; j < m.cols(); ++j)
            asym = std::max(asym, std::abs(m(i, j) - std::conj(m(j, i))));
    if (asym > 1e-10)
        throw ValidationError("hermitian_eig: input is not Hermitian (max asymmetry " +
                              std::to_string(asym) + ")");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_eig: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double chebyshev_T(int k, double x) {
    if (k < 0) throw ValidationError("chebyshev_T: negative order");
    if (x < -1.0 || x > 1.0)
        throw ValidationError("chebyshev_T: argument outside [-1, 1]");
    if (k == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int i = 2; i <= k; ++i) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

CVector convolution_apply(const CMatrix& m_norm, const CVector& x, double theta0) {
    if (m_norm.rows() != m_norm.cols() || m_norm.cols() != x.size())
        throw ValidationError("convolution_apply: dimension mismatch");
    return theta0 * (2.0 * x - m_norm * x);
}

CVector convolution_apply_full(const CMatrix& m_norm, const CVector& x,
                               const ChebCoefficients& coeffs, double lambda_max) {
    if (m_norm.rows() != m_norm.cols() || m_norm.cols() != x.size())
        throw ValidationError("convolution_apply_full: dimension mismatch");
    if (coeffs.theta.empty())
        throw ValidationError("convolution_apply_full: no coefficients");
    if (!(lambda_max > 0.0))
        throw ValidationError("convolution_apply_full: lambda_max must be positive");

    const double scale = 2.0 / lambda_max;
    auto apply_shifted = [&](const CVector& v) -> CVector {
        return scale * (m_norm * v) - v;
    };

    CVector t_prev = x;
    CVector acc = coeffs.theta[0] * t_prev;
    if (coeffs.theta.size() == 1) return acc;
    CVector t_cur = apply_shifted(x);
    acc += coeffs.theta[1] * t_cur;
    for (std::size_t k = 2; k < coeffs.theta.size(); ++k) {
        CVector t_next = 2.0 * apply_shifted(t_cur) - t_prev;
        t_prev = std::move(t_cur);
        t_cur = std::move(t_next);
        acc += coeffs.theta[k] * t_cur;
    }
    return acc;
}

}  // namespace sigmanet
