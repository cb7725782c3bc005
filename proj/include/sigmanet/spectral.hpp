#pragma once

#include <vector>

#include "sigmanet/types.hpp"

namespace sigmanet {

struct EigenDecomposition {
    Vector eigenvalues;     // ascending
    CMatrix eigenvectors;   // unitary, columns match eigenvalues
};

// Full decomposition M = U diag(lambda) U*. Requires the input to be Hermitian
// within 1e-10; throws NumericalError if the solver does not converge.
EigenDecomposition hermitian_eig(const CMatrix& m);

// First-kind Chebyshev polynomial T_k on [-1, 1] via the three-term recursion.
double chebyshev_T(int k, double x);

struct ChebCoefficients {
    std::vector<double> theta;  // theta[k] weights T_k; order K = size - 1
};

// Order-1 filter with the tied coefficients (theta0, -theta0) and the spectral
// bound 2 folded in: y = theta0 * (2I - M) x.
CVector convolution_apply(const CMatrix& m_norm, const CVector& x, double theta0);

// General filter sum theta_k T_k(Mt) x with Mt = (2/lambda_max) M - I,
// evaluated by the matrix three-term recursion (no eigendecomposition).
CVector convolution_apply_full(const CMatrix& m_norm, const CVector& x,
                               const ChebCoefficients& coeffs,
                               double lambda_max = 2.0);

}  // namespace sigmanet
