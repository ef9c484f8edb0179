#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qfikit/linalg.hpp"
#include "qfikit/model.hpp"

namespace qfikit {

// Eigenvalue pairs whose populations sum below this are dropped from the
// mixed-state QFI sum (the corresponding subspace carries no information).
inline constexpr double kPopulationPairFloor = 1e-12;

// Below this energy gap the time-average filter switches to its Taylor
// form to avoid cancellation in sinc.
inline constexpr double kFilterTaylorGap = 1e-6;

enum class Which { generator, disturbance };

/// Scalar filter picked up by a matrix element across an energy gap delta
/// when the generator is averaged over one unit of evolution:
/// integral_0^1 e^{i delta t} dt = e^{i delta/2} sinc(delta/2).
inline Complex time_average_filter(double delta) {
    if (std::abs(delta) < kFilterTaylorGap)
        return Complex(1.0 - delta * delta / 6.0, 0.5 * delta);
    const double half = 0.5 * delta;
    return std::exp(Complex(0.0, half)) * (std::sin(half) / half);
}

/// Time-averaged generator together with the operating point it was
/// evaluated at.
struct AverageHamiltonian {
    HermitianOperator op;
    double lambda = 0.0;
    double eta = 0.0;
};

namespace detail {

inline ComplexMatrix apply_average_filter(const ComplexMatrix& hx,
                                          const SpectralDecomposition& s) {
    ComplexMatrix b = s.eigenvectors.adjoint() * hx * s.eigenvectors;
    for (Eigen::Index j = 0; j < b.rows(); ++j)
        for (Eigen::Index k = 0; k < b.cols(); ++k)
            b(j, k) *= time_average_filter(s.eigenvalues(j) -
                                           s.eigenvalues(k));
    ComplexMatrix out = s.eigenvectors * b * s.eigenvectors.adjoint();
    return 0.5 * (out + ComplexMatrix(out.adjoint()));
}

}  // namespace detail

/// Time average of the chosen part of the Hamiltonian in the interaction
/// picture of the full dynamics: integral_0^1 e^{iHt} H_X e^{-iHt} dt with
/// H = lambda * G + eta * D, evaluated by spectral calculus.
inline AverageHamiltonian average_hamiltonian(const DisturbedModel& m,
                                              Which which = Which::generator) {
    const SpectralDecomposition s = hamiltonian_at(m).spectrum();
    const ComplexMatrix& hx = which == Which::generator
                                  ? m.generator.matrix()
                                  : m.disturbance.matrix();
    return AverageHamiltonian{
        HermitianOperator::unchecked(detail::apply_average_filter(hx, s)),
        m.lambda, m.eta};
}

/// Both time-averaged parts from a single diagonalization of H.
inline std::pair<AverageHamiltonian, AverageHamiltonian>
average_hamiltonian_pair(const DisturbedModel& m) {
    const SpectralDecomposition s = hamiltonian_at(m).spectrum();
    auto make = [&](const ComplexMatrix& hx) {
        return AverageHamiltonian{
            HermitianOperator::unchecked(detail::apply_average_filter(hx, s)),
            m.lambda, m.eta};
    };
    return {make(m.generator.matrix()), make(m.disturbance.matrix())};
}

/// QFI of a mixed probe rho for the amplitude conjugate to hbar:
/// 4 * sum_{j<k} (p_j - p_k)^2 / (p_j + p_k) |<j|hbar|k>|^2 over the
/// eigenpairs of rho, skipping pairs with vanishing total population.
inline double qfi_mixed(const DensityMatrix& rho, const ComplexMatrix& hbar) {
    if (rho.dim() != hbar.rows() || hbar.rows() != hbar.cols())
        throw ValidationError("qfi_mixed: operator dimension " +
                              std::to_string(hbar.rows()) +
                              " does not match state dimension " +
                              std::to_string(rho.dim()));
    const SpectralDecomposition& s = rho.spectrum();
    const ComplexMatrix b =
        s.eigenvectors.adjoint() * hbar * s.eigenvectors;
    const RealVector& p = s.eigenvalues;
    double q = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        for (Eigen::Index k = j + 1; k < p.size(); ++k) {
            const double sum = p(j) + p(k);
            if (sum <= kPopulationPairFloor) continue;
            const double diff = p(j) - p(k);
            q += (diff * diff / sum) * std::norm(b(j, k));
        }
    }
    return 4.0 * q;
}

inline double qfi_mixed(const DensityMatrix& rho,
                        const AverageHamiltonian& hbar) {
    return qfi_mixed(rho, hbar.op.matrix());
}

/// QFI of a pure probe: 4 * variance of hbar in the state.
inline double qfi_pure(const DensityMatrix& rho, const ComplexMatrix& hbar) {
    if (rho.dim() != hbar.rows() || hbar.rows() != hbar.cols())
        throw ValidationError("qfi_pure: operator dimension " +
                              std::to_string(hbar.rows()) +
                              " does not match state dimension " +
                              std::to_string(rho.dim()));
    if (!rho.is_pure())
        throw ValidationError(
            "qfi_pure requires a pure state; largest eigenvalue is " +
            std::to_string(rho.eigenvalues()(rho.dim() - 1)));
    const ComplexVector psi =
        rho.spectrum().eigenvectors.col(rho.dim() - 1);
    const ComplexVector hpsi = hbar * psi;
    const double mean = (psi.adjoint() * hpsi)(0).real();
    return 4.0 * (hpsi.squaredNorm() - mean * mean);
}

inline double qfi_pure(const DensityMatrix& rho,
                       const AverageHamiltonian& hbar) {
    return qfi_pure(rho, hbar.op.matrix());
}

namespace detail {

// First eigenvector index belonging to the top eigenspace, and the bottom
// one is always index 0; ties resolved toward the smallest index so the
// optimal probe is deterministic under eigenvalue degeneracy.
inline Eigen::Index first_of_top_eigenspace(const RealVector& e) {
    const Eigen::Index d = e.size();
    const double top = e(d - 1);
    const double tol = 1e-12 * (1.0 + std::abs(top));
    Eigen::Index j = d - 1;
    while (j > 0 && e(j - 1) >= top - tol) --j;
    return j;
}

}  // namespace detail

/// Best achievable QFI over input probes at the model's operating point:
/// the squared spectral width of the time-averaged generator. The report
/// carries the optimal probe, an equal superposition of the extremal
/// eigenvectors.
inline QfiReport qfi_max(const DisturbedModel& m) {
    const AverageHamiltonian hbar = average_hamiltonian(m, Which::generator);
    const SpectralDecomposition s = hbar.op.spectrum();
    const Eigen::Index d = s.dim();
    const double width = s.eigenvalues(d - 1) - s.eigenvalues(0);

    QfiReport report;
    report.qfi = width * width;
    report.qfi_max = report.qfi;
    report.spectral_width = width;
    report.method = Method::closed_form;
    report.crlb = cramer_rao_bound(report.qfi, 1);
    if (d >= 2) {
        const Eigen::Index jtop = std::max<Eigen::Index>(
            detail::first_of_top_eigenspace(s.eigenvalues), 1);
        const ComplexVector psi =
            (s.eigenvectors.col(0) + s.eigenvectors.col(jtop)) /
            std::sqrt(2.0);
        report.optimal_state = pure_state(psi);
    } else {
        report.optimal_state = pure_state(s.eigenvectors.col(0));
    }
    return report;
}

/// Partial-sum comparison between the spectra of the bare generator and
/// its time average: averaging can only shrink the spectrum (the bare
/// spectrum majorizes the averaged one).
struct ContractionCheck {
    bool ok = false;
    double worst_margin = 0.0;  // min over partial-sum and edge margins
    double top_margin = 0.0;    // g_max - gbar_max
    double bottom_margin = 0.0; // gbar_min - g_min
    double trace_delta = 0.0;   // |tr G - tr Gbar|
};

inline ContractionCheck spectral_width_contraction_check(
    const DisturbedModel& m, double tol = 1e-9) {
    const RealVector eg = m.generator.spectrum().eigenvalues;
    const RealVector eb =
        average_hamiltonian(m, Which::generator).op.spectrum().eigenvalues;
    const Eigen::Index d = eg.size();

    ContractionCheck c;
    c.top_margin = eg(d - 1) - eb(d - 1);
    c.bottom_margin = eb(0) - eg(0);
    c.worst_margin = std::min(c.top_margin, c.bottom_margin);
    double sg = 0.0, sb = 0.0;
    for (Eigen::Index k = 0; k < d - 1; ++k) {  // top-k sums, k = 1..d-1
        sg += eg(d - 1 - k);
        sb += eb(d - 1 - k);
        c.worst_margin = std::min(c.worst_margin, sg - sb);
    }
    c.trace_delta = std::abs((sg + eg(0)) - (sb + eb(0)));
    c.ok = c.worst_margin >= -tol && c.trace_delta <= tol * (1.0 + std::abs(sg + eg(0)));
    return c;
}

}  // namespace qfikit
