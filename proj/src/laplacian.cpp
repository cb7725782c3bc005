#include "sigmanet/laplacian.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sigmanet/graph.hpp"
#include "sigmanet/spectral.hpp"

namespace sigmanet {

namespace {

void require_square(const Matrix& a, const char* who) {
    if (a.rows() != a.cols())
        throw ValidationError(std::string(who) + ": non-square input");
}

Vector abs_row_sums(const Matrix& s) {
    return s.cwiseAbs().rowwise().sum();
}

// I - R H R with R = diag(r); mirrored so the result is Hermitian bit-exactly.
CMatrix normalized_from(const CMatrix& h, const Vector& r) {
    const Eigen::Index n = h.rows();
    CMatrix l(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        l(i, i) = 1.0 - r(i) * h(i, i).real() * r(i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Complex v = -(r(i) * h(i, j) * r(j));
            l(i, j) = v;
            l(j, i) = std::conj(v);
        }
    }
    return l;
}

}  // namespace

CMatrix sign_magnetic_H(const Matrix& a) {
    require_square(a, "sign_magnetic_H");
    const Eigen::Index n = a.rows();
    CMatrix h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = Complex(a(i, i), 0.0);  // diagonal factor is 1 + 0i
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double w_ij = a(i, j), w_ji = a(j, i);
            const double as = 0.5 * (w_ij + w_ji);
            const double re_factor = (w_ij == w_ji) ? 1.0 : 0.0;
            const double im_factor = sgn(std::abs(w_ij) - std::abs(w_ji));
            const Complex v(as * re_factor, as * im_factor);
            h(i, j) = v;
            h(j, i) = std::conj(v);
        }
    }
    return h;
}

CMatrix sign_magnetic_laplacian(const Matrix& a, bool normalized) {
    require_square(a, "sign_magnetic_laplacian");
    const CMatrix h = sign_magnetic_H(a);
    const Vector deg = abs_row_sums(symmetrize(a));
    if (normalized) {
        Vector r = deg.unaryExpr([](double d) { return rsqrt(d); });
        return normalized_from(h, r);
    }
    CMatrix l = -h;
    for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = deg(i) - h(i, i);
    return l;
}

CMatrix magnetic_H(const Matrix& a, double q) {
    require_square(a, "magnetic_H");
    const Eigen::Index n = a.rows();
    CMatrix h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = Complex(a(i, i), 0.0);  // phase of a zero difference is 0
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double as = 0.5 * (a(i, j) + a(j, i));
            const double theta = 2.0 * std::numbers::pi * q * (a(i, j) - a(j, i));
            const Complex v = as * Complex(std::cos(theta), std::sin(theta));
            h(i, j) = v;
            h(j, i) = std::conj(v);
        }
    }
    return h;
}

CMatrix magnetic_laplacian(const Matrix& a, double q, bool normalized) {
    require_square(a, "magnetic_laplacian");
    const CMatrix h = magnetic_H(a, q);
    const Vector deg = symmetrize(a).rowwise().sum();  // signed degrees
    if (normalized) {
        Vector r = deg.unaryExpr([](double d) { return rsqrt(d); });
        return normalized_from(h, r);
    }
    CMatrix l = -h;
    for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = deg(i) - h(i, i);
    return l;
}

CMatrix renormalized_propagation(const Matrix& a, bool use_sign_magnetic, double q) {
    require_square(a, "renormalized_propagation");
    const Eigen::Index n = a.rows();
    const Matrix at = a + Matrix::Identity(n, n);
    const CMatrix h = use_sign_magnetic ? sign_magnetic_H(at) : magnetic_H(at, q);
    const Matrix s = symmetrize(at);
    const Vector deg = use_sign_magnetic ? Vector(abs_row_sums(s))
                                         : Vector(s.rowwise().sum());
    CMatrix p(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ri = rsqrt(deg(i));
        p(i, i) = ri * h(i, i).real() * ri;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Complex v = ri * h(i, j) * rsqrt(deg(j));
            p(i, j) = v;
            p(j, i) = std::conj(v);
        }
    }
    return p;
}

HermitianCheckReport verify_hermitian_psd(const CMatrix& m, double tol) {
    if (m.rows() != m.cols())
        throw ValidationError("verify_hermitian_psd: non-square input");
    HermitianCheckReport rep;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            rep.max_asymmetry =
                std::max(rep.max_asymmetry, std::abs(m(i, j) - std::conj(m(j, i))));
    rep.is_hermitian = rep.max_asymmetry <= tol;
    const CMatrix sym = rep.is_hermitian ? m : CMatrix(0.5 * (m + m.adjoint()));
    const EigenDecomposition eig = hermitian_eig(sym);
    rep.min_eigenvalue = eig.eigenvalues.minCoeff();
    rep.max_eigenvalue = eig.eigenvalues.maxCoeff();
    return rep;
}

void write_matrix_dump(const std::string& path, const CMatrix& m) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write matrix dump: " + path);
    out << "# matrix " << m.rows() << " " << m.cols() << "\n";
    char buf[128];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const Complex v = m(i, j);
            if (v == Complex(0.0, 0.0)) continue;
            std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g",
                          static_cast<long long>(i), static_cast<long long>(j),
                          v.real(), v.imag());
            out << buf << "\n";
        }
}

CMatrix read_matrix_dump(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix dump: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("matrix dump: empty file: " + path);
    long long rows = 0, cols = 0;
    {
        std::istringstream hs(line);
        std::string hash, word;
        if (!(hs >> hash >> word >> rows >> cols) || hash != "#" || word != "matrix" ||
            rows < 0 || cols < 0)
            throw ValidationError("matrix dump: bad header in " + path);
    }
    CMatrix m = CMatrix::Zero(rows, cols);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        long long i, j;
        double re, im;
        if (std::sscanf(line.c_str(), "%lld,%lld,%lf,%lf", &i, &j, &re, &im) != 4)
            throw ValidationError("matrix dump: parse error at " + path + ":" +
                                  std::to_string(line_no));
        if (i < 0 || i >= rows || j < 0 || j >= cols)
            throw ValidationError("matrix dump: index out of range at " + path + ":" +
                                  std::to_string(line_no));
        m(i, j) = Complex(re, im);
    }
    return m;
}

}  // namespace sigmanet
