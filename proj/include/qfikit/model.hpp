#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "qfikit/linalg.hpp"

namespace qfikit {

// Validation bands: deviations below the accept tolerance are numerical
// dust; deviations up to the reject tolerance are repaired silently
// (symmetrize / clip / renormalize); anything larger is rejected.
inline constexpr double kHermitianRejectTol = 1e-8;
inline constexpr double kTraceRejectTol = 1e-8;
inline constexpr double kEigenvalueRejectTol = 1e-8;
inline constexpr double kPurityTol = 1e-10;

/// A square matrix certified Hermitian. Construction goes through
/// validate_hermitian(), which symmetrizes; the stored matrix satisfies
/// M(i,j) == conj(M(j,i)) exactly.
class HermitianOperator {
public:
    /// Wraps a matrix the caller guarantees is already exactly Hermitian
    /// (e.g. a real-linear combination of validated operators).
    static HermitianOperator unchecked(ComplexMatrix m) {
        return HermitianOperator(std::move(m));
    }

    const ComplexMatrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

    SpectralDecomposition spectrum() const { return eig_hermitian(mat_); }

private:
    explicit HermitianOperator(ComplexMatrix m) : mat_(std::move(m)) {}
    ComplexMatrix mat_;
};

/// Accepts a square matrix whose anti-Hermitian part is within
/// kHermitianRejectTol * (1 + ||M||_max) and returns the symmetrized
/// operator (M + M^dagger)/2; rejects anything worse.
inline HermitianOperator validate_hermitian(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw ValidationError("operator must be a square matrix, got " +
                              std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()));
    const double dev = hermitian_deviation(m);
    const double scale = 1.0 + max_abs(m);
    if (dev > kHermitianRejectTol * scale) {
        std::ostringstream os;
        os << "matrix is not Hermitian: max |M - M^dagger| = " << dev;
        throw ValidationError(os.str());
    }
    return HermitianOperator::unchecked(0.5 * (m + ComplexMatrix(m.adjoint())));
}

/// A density operator in canonical form: Hermitian, eigenvalues clipped to
/// [0, 1] and renormalized to unit sum. The spectral decomposition is kept
/// alongside the matrix so downstream code never re-diagonalizes.
class DensityMatrix {
public:
    const ComplexMatrix& matrix() const { return mat_; }
    const SpectralDecomposition& spectrum() const { return spectrum_; }
    const RealVector& eigenvalues() const { return spectrum_.eigenvalues; }
    Eigen::Index dim() const { return mat_.rows(); }

    /// Largest eigenvalue within kPurityTol of 1.
    bool is_pure() const {
        return spectrum_.eigenvalues(spectrum_.dim() - 1) >= 1.0 - kPurityTol;
    }

    friend DensityMatrix validate_density(const ComplexMatrix& m);

private:
    DensityMatrix(ComplexMatrix m, SpectralDecomposition s)
        : mat_(std::move(m)), spectrum_(std::move(s)) {}

    ComplexMatrix mat_;
    SpectralDecomposition spectrum_;
};

/// Accepts a matrix that is Hermitian, unit-trace within kTraceRejectTol
/// and PSD up to eigenvalue dust of -kEigenvalueRejectTol; clips negative
/// dust, renormalizes the spectrum to sum exactly to 1 and rebuilds the
/// canonical matrix.
inline DensityMatrix validate_density(const ComplexMatrix& m) {
    const HermitianOperator h = validate_hermitian(m);
    const double tr = h.matrix().trace().real();
    if (std::abs(tr - 1.0) > kTraceRejectTol) {
        std::ostringstream os;
        os << "density matrix must have unit trace, got " << tr;
        throw ValidationError(os.str());
    }
    SpectralDecomposition s = h.spectrum();
    const double emin = s.eigenvalues(0);
    if (emin < -kEigenvalueRejectTol) {
        std::ostringstream os;
        os << "density matrix is not positive semidefinite: smallest "
              "eigenvalue "
           << emin;
        throw ValidationError(os.str());
    }
    s.eigenvalues = s.eigenvalues.cwiseMax(0.0);
    s.eigenvalues /= s.eigenvalues.sum();
    ComplexMatrix canon = s.reconstruct();
    canon = 0.5 * (canon + ComplexMatrix(canon.adjoint()));
    return DensityMatrix(std::move(canon), std::move(s));
}

/// Rank-one density matrix |psi><psi| from a nonzero state vector.
inline DensityMatrix pure_state(const ComplexVector& psi) {
    const double n = psi.norm();
    if (!(n > 0.0))
        throw ValidationError("pure state vector must be nonzero");
    const ComplexVector u = psi / n;
    return validate_density(u * u.adjoint());
}

/// Unitary dynamics generated by lambda * G + eta * D, where G is the
/// generator coupled to the estimated amplitude lambda and D is a known
/// disturbance of strength eta.
struct DisturbedModel {
    HermitianOperator generator;
    HermitianOperator disturbance;
    double lambda = 0.0;
    double eta = 0.0;

    DisturbedModel(HermitianOperator g, HermitianOperator d, double l,
                   double e)
        : generator(std::move(g)),
          disturbance(std::move(d)),
          lambda(l),
          eta(e) {
        if (generator.dim() != disturbance.dim())
            throw ValidationError(
                "generator and disturbance dimensions differ: " +
                std::to_string(generator.dim()) + " vs " +
                std::to_string(disturbance.dim()));
        if (!std::isfinite(lambda) || !std::isfinite(eta))
            throw ValidationError("lambda and eta must be finite");
    }

    Eigen::Index dim() const { return generator.dim(); }
};

/// Total Hamiltonian lambda * G + eta * D at the model's parameters,
/// optionally overriding lambda (used by finite-difference probes).
inline HermitianOperator hamiltonian_at(
    const DisturbedModel& m, std::optional<double> lambda = std::nullopt) {
    const double l = lambda.value_or(m.lambda);
    return HermitianOperator::unchecked(l * m.generator.matrix() +
                                        m.eta * m.disturbance.matrix());
}

/// 1/sqrt(nu * Q); +infinity when Q == 0 (the parameter is then
/// unidentifiable at this operating point).
inline double cramer_rao_bound(double qfi, std::int64_t nu) {
    if (!(qfi >= 0.0))
        throw ValidationError("quantum Fisher information must be >= 0");
    if (nu < 1) throw ValidationError("number of probes must be >= 1");
    if (qfi == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(static_cast<double>(nu) * qfi);
}

enum class Method { closed_form, finite_difference };

inline const char* method_name(Method m) {
    return m == Method::closed_form ? "closed_form" : "finite_difference";
}

/// Result bundle for a QFI evaluation. Optional fields are populated only
/// by the routines that compute them (e.g. the optimal-probe search).
struct QfiReport {
    double qfi = 0.0;
    double crlb = std::numeric_limits<double>::infinity();
    Method method = Method::closed_form;
    std::optional<double> qfi_max;
    std::optional<double> spectral_width;
    std::optional<DensityMatrix> optimal_state;

    /// Same report with the bound recomputed for nu repetitions.
    QfiReport with_repetitions(std::int64_t nu) const {
        QfiReport r = *this;
        r.crlb = cramer_rao_bound(r.qfi, nu);
        return r;
    }
};

}  // namespace qfikit
