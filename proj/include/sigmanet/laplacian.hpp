#pragma once

#include <string>

#include "sigmanet/types.hpp"

namespace sigmanet {

// Exact-zero sign: -1, 0, or +1. No epsilon; equality means bitwise equality
// of the compared doubles.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// 1/sqrt(d) with the pseudo-inverse convention rsqrt(0) = 0 for isolated nodes.
inline double rsqrt(double d) { return d == 0.0 ? 0.0 : 1.0 / std::sqrt(d); }

// Hermitian edge operator built from the symmetrized weights:
//   H(i,j) = As(i,j) * ( [A(i,j) == A(j,i)] + i * sgn(|A(i,j)| - |A(j,i)|) )
// A single edge (i,j,w) lands as i*w/2 at (i,j); an antiparallel pair with
// equal weights stays real; unequal magnitudes turn the pair purely imaginary
// with the sign of the larger magnitude. Entries are mirrored so the result
// is Hermitian bit-exactly.
CMatrix sign_magnetic_H(const Matrix& a);

// D - H with D = Diag(|As| e), or the normalized form I - D^-1/2 H D^-1/2.
CMatrix sign_magnetic_laplacian(const Matrix& a, bool normalized);

// Phase-based edge operator H = As .* exp(i * 2*pi*q * (A - A^T)).
CMatrix magnetic_H(const Matrix& a, double q);

// D - H with the signed degree D = Diag(As e), or I - D^-1/2 H D^-1/2.
CMatrix magnetic_laplacian(const Matrix& a, double q, bool normalized);

// Propagation matrix with unit self-loops: builds the selected operator from
// A + I and returns D^-1/2 H D^-1/2. Every degree is >= 1, so no isolated-node
// special case remains. Spectral radius <= 1 (+ fp slack).
CMatrix renormalized_propagation(const Matrix& a, bool use_sign_magnetic = true,
                                 double q = 0.25);

struct HermitianCheckReport {
    bool is_hermitian = false;
    double max_asymmetry = 0.0;   // max |M(i,j) - conj(M(j,i))|
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
};

// Asymmetry scan plus an eigenvalue range. A non-Hermitian input is reported
// as such; its eigenvalue range is then taken from the Hermitian part
// (M + M*)/2 so the report always carries a defined min <= max.
HermitianCheckReport verify_hermitian_psd(const CMatrix& m, double tol);

// Text dump, one nonzero entry per line: "row,col,re,im" after a "# matrix
// rows cols" header. Values are printed with 17 significant digits.
void write_matrix_dump(const std::string& path, const CMatrix& m);
CMatrix read_matrix_dump(const std::string& path);

}  // namespace sigmanet
