#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace qfikit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Input failed a domain-type invariant (Hermiticity, trace, purity, shape).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A serialized payload does not match the expected schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative numerical routine failed to converge.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Max-abs deviation from Hermiticity, ||M - M^dagger||_max.
inline double hermitian_deviation(const ComplexMatrix& m) {
    return max_abs(m - m.adjoint());
}

/// Eigensystem of a Hermitian matrix. Eigenvalues ascending, eigenvector
/// columns orthonormal with a deterministic phase: the largest-magnitude
/// component of each column is real positive.
struct SpectralDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }

    /// V diag(e) V^dagger.
    ComplexMatrix reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal() *
               eigenvectors.adjoint();
    }
};

namespace detail {

inline void fix_column_phases(ComplexMatrix& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            const double a = std::abs(v(r, c));
            if (a > best) {  // strict: first maximal entry wins ties
                best = a;
                pivot = r;
            }
        }
        if (best <= 0.0) continue;
        const Complex phase = std::conj(v(pivot, c)) / best;
        v.col(c) *= phase;
        v(pivot, c) = Complex(std::abs(v(pivot, c)), 0.0);
    }
}

}  // namespace detail

/// Hermitian eigendecomposition with deterministic phase fixing.
/// The caller is responsible for H being (numerically) Hermitian.
inline SpectralDecomposition eig_hermitian(const ComplexMatrix& h) {
    if (h.rows() != h.cols() || h.rows() < 1)
        throw ValidationError("eig_hermitian: matrix must be square, got " +
                              std::to_string(h.rows()) + "x" +
                              std::to_string(h.cols()));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw SolverError(
            "hermitian eigensolver did not converge for dimension " +
            std::to_string(h.rows()));
    SpectralDecomposition s{solver.eigenvalues(), solver.eigenvectors()};
    detail::fix_column_phases(s.eigenvectors);
    return s;
}

/// Spectral calculus: V diag(f(e_j)) V^dagger for a scalar map f: R -> C.
template <typename F>
ComplexMatrix matrix_function(const SpectralDecomposition& s, F&& f) {
    ComplexVector fe(s.dim());
    for (Eigen::Index i = 0; i < s.dim(); ++i) fe(i) = f(s.eigenvalues(i));
    return s.eigenvectors * fe.asDiagonal() * s.eigenvectors.adjoint();
}

/// exp(-i H t) from the spectrum of H.
inline ComplexMatrix evolution_operator(const SpectralDecomposition& s,
                                        double t = 1.0) {
    return matrix_function(
        s, [t](double x) { return std::exp(Complex(0.0, -x * t)); });
}

/// Principal square root of a PSD matrix; negative eigenvalue dust is
/// clipped to zero before the root.
inline ComplexMatrix sqrt_psd(const SpectralDecomposition& s) {
    return matrix_function(
        s, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

/// Sum of singular values (trace norm).
inline double trace_norm(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

/// Uhlmann fidelity F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)),
/// computed as the trace norm of sqrt(rho) sqrt(sigma).
inline double uhlmann_fidelity(const ComplexMatrix& rho,
                               const ComplexMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw ValidationError("uhlmann_fidelity: dimension mismatch, " +
                              std::to_string(rho.rows()) + " vs " +
                              std::to_string(sigma.rows()));
    const ComplexMatrix a = sqrt_psd(eig_hermitian(rho));
    const ComplexMatrix b = sqrt_psd(eig_hermitian(sigma));
    return std::clamp(trace_norm(a * b), 0.0, 1.0);
}

}  // namespace qfikit
