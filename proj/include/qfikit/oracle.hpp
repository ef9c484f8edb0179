#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "qfikit/linalg.hpp"
#include "qfikit/model.hpp"
#include "qfikit/qfi.hpp"

namespace qfikit {

// Step sizes above this still work but sit outside the regime where the
// extrapolated finite difference meets its accuracy target.
inline constexpr double kFdRecommendedMaxStep = 1e-2;

namespace detail {

// 1 - F(U1 rho U1^dag, U2 rho U2^dag) evaluated as a sum of per-mode
// differences p_i - s_i, where p are the eigenvalues of rho (descending)
// and s the singular values of sqrt(rho) W sqrt(rho), W = U1^dag U2.
// Pairing the sorted sequences avoids the catastrophic cancellation of
// forming 1 - F directly when F is within rounding of 1.
inline double fidelity_deficit(const ComplexMatrix& sqrt_rho,
                               const RealVector& p_desc,
                               const ComplexMatrix& w) {
    Eigen::JacobiSVD<ComplexMatrix> svd(
        ComplexMatrix(sqrt_rho * w * sqrt_rho));
    const RealVector s = svd.singularValues();  // descending
    double deficit = 0.0;
    for (Eigen::Index i = 0; i < p_desc.size(); ++i)
        deficit += p_desc(i) - s(i);
    return deficit;
}

}  // namespace detail

/// Finite-difference QFI probe: evolves rho under the full Hamiltonian at
/// lambda -/+ d/2 for unit time, converts the fidelity deficit between the
/// two branches via Q = 8 (1 - F) / d^2, and removes the leading step-size
/// error by Richardson extrapolation, (4 Q_{d/2} - Q_d) / 3.
inline double qfi_fd(const DensityMatrix& rho, const DisturbedModel& m,
                     double dl = 1e-3) {
    if (!(dl > 0.0))
        throw ValidationError("finite-difference step must be positive, got " +
                              std::to_string(dl));
    if (rho.dim() != m.dim())
        throw ValidationError("qfi_fd: state dimension " +
                              std::to_string(rho.dim()) +
                              " does not match model dimension " +
                              std::to_string(m.dim()));
    const ComplexMatrix sqrt_rho = sqrt_psd(rho.spectrum());
    const RealVector p_desc = rho.eigenvalues().reverse();

    auto q_at = [&](double step) {
        const ComplexMatrix u_minus = evolution_operator(
            hamiltonian_at(m, m.lambda - 0.5 * step).spectrum());
        const ComplexMatrix u_plus = evolution_operator(
            hamiltonian_at(m, m.lambda + 0.5 * step).spectrum());
        const ComplexMatrix w = u_minus.adjoint() * u_plus;
        return 8.0 * detail::fidelity_deficit(sqrt_rho, p_desc, w) /
               (step * step);
    };

    const double q = (4.0 * q_at(0.5 * dl) - q_at(dl)) / 3.0;
    return std::max(q, 0.0);
}

/// Time-averaged part of the Hamiltonian by composite Simpson quadrature
/// of integral_0^1 e^{iHt} H_X e^{-iHt} dt, an integration route fully
/// independent of the gap-filter evaluation in average_hamiltonian().
inline AverageHamiltonian average_hamiltonian_quadrature(
    const DisturbedModel& m, int panels = 1000,
    Which which = Which::generator) {
    if (panels < 2 || panels % 2 != 0)
        throw ValidationError(
            "Simpson quadrature needs an even panel count >= 2, got " +
            std::to_string(panels));
    const SpectralDecomposition s = hamiltonian_at(m).spectrum();
    const ComplexMatrix& hx = which == Which::generator
                                  ? m.generator.matrix()
                                  : m.disturbance.matrix();
    const int nodes = panels + 1;
    const double h = 1.0 / panels;
    ComplexMatrix acc = ComplexMatrix::Zero(m.dim(), m.dim());
    for (int i = 0; i < nodes; ++i) {
        const double t = i * h;
        const double w =
            (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const ComplexMatrix u = evolution_operator(s, t);
        acc += w * (u.adjoint() * hx * u);
    }
    acc *= h / 3.0;
    acc = 0.5 * (acc + ComplexMatrix(acc.adjoint()));
    return AverageHamiltonian{HermitianOperator::unchecked(std::move(acc)),
                              m.lambda, m.eta};
}

/// Max-abs residual of the first-order factorization of the evolution:
/// || U_{lambda+d} - U_lambda exp(-i d Gbar) ||_max, which shrinks as
/// O(d^2). Quartering the step should quarter the residual.
inline double first_order_factorization_residual(const DisturbedModel& m,
                                                 double dl) {
    if (!(dl > 0.0))
        throw ValidationError("factorization step must be positive, got " +
                              std::to_string(dl));
    const ComplexMatrix u0 =
        evolution_operator(hamiltonian_at(m).spectrum());
    const ComplexMatrix u1 = evolution_operator(
        hamiltonian_at(m, m.lambda + dl).spectrum());
    const AverageHamiltonian gbar = average_hamiltonian(m, Which::generator);
    const ComplexMatrix step =
        evolution_operator(gbar.op.spectrum(), dl);
    return max_abs(u1 - u0 * step);
}

}  // namespace qfikit
