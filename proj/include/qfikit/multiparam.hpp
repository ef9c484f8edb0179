#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "qfikit/linalg.hpp"
#include "qfikit/model.hpp"
#include "qfikit/qfi.hpp"

namespace qfikit {

// Determinant floor below which the joint estimation problem is treated
// as degenerate (one parameter combination is unidentifiable).
inline constexpr double kQfiMatrixSingularTol = 1e-12;

/// 2x2 quantum Fisher information matrix for joint estimation of the
/// amplitude lambda and the disturbance strength eta.
struct QfiMatrix2 {
    double q_ll = 0.0;  // lambda-lambda
    double q_ee = 0.0;  // eta-eta
    double q_le = 0.0;  // off-diagonal

    double det() const { return q_ll * q_ee - q_le * q_le; }
    bool singular(double tol = kQfiMatrixSingularTol) const {
        return det() <= tol;
    }

    /// Inverse as {ll, le, el, ee}; nullopt when singular. Scaled by 1/nu
    /// this is the joint Cramer-Rao covariance bound.
    std::optional<std::array<double, 4>> inverse(
        double tol = kQfiMatrixSingularTol) const {
        const double dt = det();
        if (dt <= tol) return std::nullopt;
        return std::array<double, 4>{q_ee / dt, -q_le / dt, -q_le / dt,
                                     q_ll / dt};
    }
};

/// QFI matrix of a probe rho: diagonal entries are the single-parameter
/// QFIs for the time-averaged generator and disturbance; the off-diagonal
/// entry uses the same population weights with the mixed matrix-element
/// product Re <j|Gbar|k><k|Dbar|j>.
inline QfiMatrix2 qfi_matrix(const DensityMatrix& rho,
                             const DisturbedModel& m) {
    if (rho.dim() != m.dim())
        throw ValidationError("qfi_matrix: state dimension " +
                              std::to_string(rho.dim()) +
                              " does not match model dimension " +
                              std::to_string(m.dim()));
    const auto [gbar, dbar] = average_hamiltonian_pair(m);
    const SpectralDecomposition& s = rho.spectrum();
    const ComplexMatrix bg =
        s.eigenvectors.adjoint() * gbar.op.matrix() * s.eigenvectors;
    const ComplexMatrix bd =
        s.eigenvectors.adjoint() * dbar.op.matrix() * s.eigenvectors;
    const RealVector& p = s.eigenvalues;

    QfiMatrix2 q;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        for (Eigen::Index k = j + 1; k < p.size(); ++k) {
            const double sum = p(j) + p(k);
            if (sum <= kPopulationPairFloor) continue;
            const double diff = p(j) - p(k);
            const double w = diff * diff / sum;
            q.q_ll += w * std::norm(bg(j, k));
            q.q_ee += w * std::norm(bd(j, k));
            q.q_le += w * (bg(j, k) * bd(k, j)).real();
        }
    }
    q.q_ll *= 4.0;
    q.q_ee *= 4.0;
    q.q_le *= 4.0;
    return q;
}

/// Off-diagonal entry recovered from three single-parameter QFIs along
/// rotated parameter directions: with the balanced generator
/// (Gbar + Dbar)/sqrt(2), Q_mu = (Q_ll + Q_ee)/2 + Q_le. Provides an
/// independent cross-check of qfi_matrix.
inline double offdiag_via_reparam(const DensityMatrix& rho,
                                  const DisturbedModel& m) {
    if (rho.dim() != m.dim())
        throw ValidationError("offdiag_via_reparam: state dimension " +
                              std::to_string(rho.dim()) +
                              " does not match model dimension " +
                              std::to_string(m.dim()));
    const auto [gbar, dbar] = average_hamiltonian_pair(m);
    const ComplexMatrix balanced =
        (gbar.op.matrix() + dbar.op.matrix()) / std::sqrt(2.0);
    const double q_mu = qfi_mixed(rho, balanced);
    const double q_ll = qfi_mixed(rho, gbar);
    const double q_ee = qfi_mixed(rho, dbar);
    return q_mu - 0.5 * (q_ll + q_ee);
}

}  // namespace qfikit
